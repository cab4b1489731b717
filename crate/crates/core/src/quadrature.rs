//! Product Gauss-Legendre x trapezoid quadrature on the unit sphere, the closed-form
//! monomial integral table, and a real spherical-harmonic test basis.

use std::f64::consts::PI;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::field::{FieldValue, SphereField};
use crate::sphere::Direction;

#[derive(Debug, Clone)]
pub struct SphereGrid {
    nodes: Vec<(Direction, f64)>,
    degree: usize,
}

impl SphereGrid {
    pub fn nodes(&self) -> &[(Direction, f64)] {
        &self.nodes
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Grid exact for polynomials in `x` of total degree at most `degree`.
pub fn build_grid(degree: usize) -> Result<SphereGrid> {
    if degree < 2 {
        return Err(Error::GridDegree(degree));
    }
    let n_theta = (degree + 2) / 2;
    let n_phi = degree + 1;
    let (z, w) = gauss_legendre(n_theta);
    let dphi = 2.0 * PI / n_phi as f64;
    let mut nodes = Vec::with_capacity(n_theta * n_phi);
    for (zi, wi) in z.iter().zip(&w) {
        let s = (1.0 - zi * zi).sqrt();
        for k in 0..n_phi {
            let phi = dphi * k as f64;
            let x = Vector3::new(s * phi.cos(), s * phi.sin(), *zi);
            nodes.push((Direction::from_vector(x).expect("unit"), wi * dphi));
        }
    }
    Ok(SphereGrid { nodes, degree })
}

/// Sum in a fixed binary-tree order, independent of thread count.
pub fn pairwise_sum<T: FieldValue>(values: &[T]) -> T {
    match values.len() {
        0 => T::zero(),
        n if n <= 8 => values[1..].iter().fold(values[0].clone(), |acc, v| acc.add(v)),
        n => {
            let (a, b) = values.split_at(n / 2);
            pairwise_sum(a).add(&pairwise_sum(b))
        }
    }
}

pub fn integrate<T: FieldValue>(f: &SphereField<T>, grid: &SphereGrid) -> T {
    integrate_fn(grid, |x| f.eval(x))
}

pub fn integrate_fn<T: FieldValue>(grid: &SphereGrid, f: impl Fn(&Direction) -> T) -> T {
    let terms: Vec<T> = grid.nodes.iter().map(|(x, w)| f(x).scale(*w)).collect();
    pairwise_sum(&terms)
}

fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

fn big_delta(i: usize, j: usize, k: usize, l: usize) -> f64 {
    delta(i, j) * delta(k, l) + delta(i, k) * delta(j, l) + delta(i, l) * delta(j, k)
}

/// `int x^{i1} ... x^{in} dS` from the closed-form table; indices are in `1..=3`.
pub fn monomial_integral(indices: &[usize]) -> Result<f64> {
    if let Some(&bad) = indices.iter().find(|i| !(1..=3).contains(*i)) {
        return Err(Error::SpatialIndex(bad));
    }
    let ix: Vec<usize> = indices.iter().map(|i| i - 1).collect();
    match ix.as_slice() {
        [] => Ok(4.0 * PI),
        &[i, j] => Ok(4.0 * PI / 3.0 * delta(i, j)),
        &[i, j, k, l] => Ok(4.0 * PI / 15.0 * big_delta(i, j, k, l)),
        &[i, j, k, l, m, n] => Ok(4.0 * PI / 105.0
            * (delta(i, j) * big_delta(k, l, m, n)
                + delta(i, k) * big_delta(j, l, m, n)
                + delta(i, l) * big_delta(j, k, m, n)
                + delta(i, m) * big_delta(j, k, l, n)
                + delta(i, n) * big_delta(j, k, l, m))),
        _ if ix.len() % 2 == 1 && ix.len() < 7 => Ok(0.0),
        _ => Err(Error::Arity(ix.len())),
    }
}

/// Real spherical harmonic written as a homogeneous polynomial in `x`.
#[derive(Debug, Clone)]
pub struct Harmonic {
    pub degree: usize,
    terms: Vec<([i32; 3], f64)>,
}

impl Harmonic {
    pub fn eval(&self, x: &Direction) -> f64 {
        let v = x.vector();
        self.terms
            .iter()
            .map(|(p, c)| c * v[0].powi(p[0]) * v[1].powi(p[1]) * v[2].powi(p[2]))
            .sum()
    }

    /// Eigenvalue of the round Laplacian, `-l(l+1)`.
    pub fn eigenvalue(&self) -> f64 {
        -((self.degree * (self.degree + 1)) as f64)
    }
}

fn monomials(degree: usize) -> Vec<[i32; 3]> {
    let d = degree as i32;
    let mut out = Vec::new();
    for a in (0..=d).rev() {
        for b in (0..=d - a).rev() {
            out.push([a, b, d - a - b]);
        }
    }
    out
}

/// Orthonormal real harmonics of degrees `0..=max_degree`.
///
/// Built by Gram-Schmidt over monomials in increasing degree: after removing all
/// lower degrees, the degree-`l` monomials span exactly the degree-`l` harmonics.
pub fn harmonic_basis(max_degree: usize) -> Vec<Harmonic> {
    let grid = build_grid((2 * max_degree).max(2)).expect("degree >= 2");
    let inner = |a: &Harmonic, b: &Harmonic| integrate_fn(&grid, |x| a.eval(x) * b.eval(x));
    let mut basis: Vec<Harmonic> = Vec::new();
    for degree in 0..=max_degree {
        for m in monomials(degree) {
            let mut h = Harmonic {
                degree,
                terms: vec![(m, 1.0)],
            };
            for _ in 0..2 {
                for b in &basis {
                    let c = inner(&h, b);
                    h.terms.extend(b.terms.iter().map(|(p, v)| (*p, -c * v)));
                }
                h.terms = collect(&h.terms);
            }
            let norm = inner(&h, &h).sqrt();
            if norm > 1e-8 {
                h.terms.iter_mut().for_each(|t| t.1 /= norm);
                basis.push(h);
            }
        }
    }
    // lower-degree pieces are multiplied by |x|^2 to make each polynomial homogeneous
    basis.into_iter().map(homogenize).collect()
}

fn collect(terms: &[([i32; 3], f64)]) -> Vec<([i32; 3], f64)> {
    let mut out: Vec<([i32; 3], f64)> = Vec::new();
    for (p, c) in terms {
        match out.iter_mut().find(|(q, _)| q == p) {
            Some(entry) => entry.1 += c,
            None => out.push((*p, *c)),
        }
    }
    out.retain(|(_, c)| c.abs() > 1e-15);
    out
}

fn homogenize(h: Harmonic) -> Harmonic {
    let mut terms = Vec::new();
    for (p, c) in &h.terms {
        let mut acc = vec![(*p, *c)];
        let mut deg = (p[0] + p[1] + p[2]) as usize;
        while deg < h.degree {
            acc = acc
                .iter()
                .flat_map(|(q, v)| {
                    (0..3).map(move |k| {
                        let mut r = *q;
                        r[k] += 2;
                        (r, *v)
                    })
                })
                .collect();
            deg += 2;
        }
        terms.extend(acc);
    }
    Harmonic {
        degree: h.degree,
        terms: collect(&terms),
    }
}
