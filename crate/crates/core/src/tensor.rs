//! Curvature algebra at a single point, in an orthonormal frame with metric
//! `diag(-1, 1, 1, 1)`.
//!
//! Ricci is the contraction `Ric_bc = g^{ad} R_abcd`, so that `R_abba` has the sign of
//! the sectional curvature and `Ric(L, L) = 8 pi T(L, L)` for any null `L`.

use std::fmt;
use std::ops::{Add, Index, Sub};

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};

use crate::error::{Error, Identity, Result};
use crate::observer::Observer;

pub const ETA: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

const SYMMETRY_TOL: f64 = 1e-12;
const VACUUM_TOL: f64 = 1e-12;
const EM_TOL: f64 = 1e-14;

pub fn minkowski(u: &Vector4<f64>, v: &Vector4<f64>) -> f64 {
    -u[0] * v[0] + u[1] * v[1] + u[2] * v[2] + u[3] * v[3]
}

/// Spatial Levi-Civita symbol on 0-based indices, `eps(0, 1, 2) = 1`.
pub fn levi_civita3(i: usize, j: usize, k: usize) -> f64 {
    if i == j || j == k || i == k {
        return 0.0;
    }
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        _ => -1.0,
    }
}

/// Dense 4x4x4x4 array of lower-index components.
#[derive(Clone, PartialEq)]
pub struct Rank4 {
    data: [f64; 256],
}

#[inline]
fn idx4(a: usize, b: usize, c: usize, d: usize) -> usize {
    ((a * 4 + b) * 4 + c) * 4 + d
}

impl Rank4 {
    pub fn zeros() -> Self {
        Self { data: [0.0; 256] }
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        t.data[idx4(a, b, c, d)] = f(a, b, c, d);
                    }
                }
            }
        }
        t
    }

    pub fn from_slice(values: &[f64]) -> Option<Self> {
        let data: [f64; 256] = values.try_into().ok()?;
        Some(Self { data })
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.data[idx4(a, b, c, d)]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, d: usize, v: f64) {
        self.data[idx4(a, b, c, d)] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut t = self.clone();
        t.data.iter_mut().for_each(|v| *v *= s);
        t
    }

    /// Full contraction with four contravariant vectors.
    pub fn contract(
        &self,
        u: &Vector4<f64>,
        v: &Vector4<f64>,
        w: &Vector4<f64>,
        z: &Vector4<f64>,
    ) -> f64 {
        let mut sum = 0.0;
        for a in 0..4 {
            if u[a] == 0.0 {
                continue;
            }
            for b in 0..4 {
                if v[b] == 0.0 {
                    continue;
                }
                let uv = u[a] * v[b];
                for c in 0..4 {
                    if w[c] == 0.0 {
                        continue;
                    }
                    let uvw = uv * w[c];
                    for d in 0..4 {
                        sum += uvw * z[d] * self.data[idx4(a, b, c, d)];
                    }
                }
            }
        }
        sum
    }
}

impl Index<(usize, usize, usize, usize)> for Rank4 {
    type Output = f64;
    fn index(&self, (a, b, c, d): (usize, usize, usize, usize)) -> &f64 {
        &self.data[idx4(a, b, c, d)]
    }
}

impl Add for &Rank4 {
    type Output = Rank4;
    fn add(self, rhs: &Rank4) -> Rank4 {
        Rank4::from_fn(|a, b, c, d| self.get(a, b, c, d) + rhs.get(a, b, c, d))
    }
}

impl Sub for &Rank4 {
    type Output = Rank4;
    fn sub(self, rhs: &Rank4) -> Rank4 {
        Rank4::from_fn(|a, b, c, d| self.get(a, b, c, d) - rhs.get(a, b, c, d))
    }
}

impl fmt::Debug for Rank4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nonzero: Vec<_> = (0..256)
            .filter(|&i| self.data[i] != 0.0)
            .map(|i| (format!("{}{}{}{}", i / 64, (i / 16) % 4, (i / 4) % 4, i % 4), self.data[i]))
            .collect();
        f.debug_map().entries(nonzero).finish()
    }
}

pub fn component_name(a: usize, b: usize, c: usize, d: usize) -> String {
    format!("R_{a}{b}{c}{d}")
}

/// Ricci contraction `Ric_bc = g^{ad} R_abcd`.
pub fn ricci_of(r: &Rank4) -> Matrix4<f64> {
    Matrix4::from_fn(|b, c| (0..4).map(|a| ETA[a] * r.get(a, b, c, a)).sum())
}

/// Validated Riemann tensor at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureAtPoint {
    riemann: Rank4,
    ricci: Matrix4<f64>,
    is_vacuum: bool,
}

impl CurvatureAtPoint {
    pub fn zero() -> Self {
        Self {
            riemann: Rank4::zeros(),
            ricci: Matrix4::zeros(),
            is_vacuum: true,
        }
    }

    pub fn riemann(&self) -> &Rank4 {
        &self.riemann
    }

    pub fn component(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.riemann.get(a, b, c, d)
    }

    pub fn ricci(&self) -> &Matrix4<f64> {
        &self.ricci
    }

    pub fn scalar_curvature(&self) -> f64 {
        (0..4).map(|a| ETA[a] * self.ricci[(a, a)]).sum()
    }

    pub fn is_vacuum(&self) -> bool {
        self.is_vacuum
    }

    pub fn require_vacuum(&self) -> Result<()> {
        if self.is_vacuum {
            Ok(())
        } else {
            Err(Error::NotVacuum(self.ricci.amax()))
        }
    }

    /// `Wbar_{0m0n}` as a 3x3 matrix.
    pub fn electric(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|m, n| self.riemann.get(0, m + 1, 0, n + 1))
    }

    /// `Wbar_{0ijk}` on 0-based spatial indices.
    pub fn w0(&self, i: usize, j: usize, k: usize) -> f64 {
        self.riemann.get(0, i + 1, j + 1, k + 1)
    }
}

pub fn validate_riemann(raw: &Rank4) -> Result<CurvatureAtPoint> {
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    if !raw.get(a, b, c, d).is_finite() {
                        return Err(Error::NonFinite(component_name(a, b, c, d)));
                    }
                }
            }
        }
    }
    let tol = SYMMETRY_TOL * raw.max_abs();
    type Check = fn(&Rank4, usize, usize, usize, usize) -> (f64, [usize; 4]);
    let checks: [(Identity, Check); 4] = [
        (Identity::FirstPairAntisymmetry, |r, a, b, c, d| {
            (r.get(a, b, c, d) + r.get(b, a, c, d), [b, a, c, d])
        }),
        (Identity::SecondPairAntisymmetry, |r, a, b, c, d| {
            (r.get(a, b, c, d) + r.get(a, b, d, c), [a, b, d, c])
        }),
        (Identity::PairSymmetry, |r, a, b, c, d| {
            (r.get(a, b, c, d) - r.get(c, d, a, b), [c, d, a, b])
        }),
        (Identity::FirstBianchi, |r, a, b, c, d| {
            (r.get(a, b, c, d) + r.get(a, c, d, b) + r.get(a, d, b, c), [a, b, c, d])
        }),
    ];
    for (identity, check) in checks {
        let mut worst = (0.0, [0usize; 4]);
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let (res, partner) = check(raw, a, b, c, d);
                        if res.abs() > worst.0 {
                            worst = (res.abs(), partner);
                        }
                    }
                }
            }
        }
        if worst.0 > tol {
            let [a, b, c, d] = worst.1;
            return Err(Error::Symmetry {
                identity,
                component: component_name(a, b, c, d),
                residual: worst.0,
            });
        }
    }
    let ricci = ricci_of(raw);
    let is_vacuum = ricci.amax() <= VACUUM_TOL * raw.max_abs();
    Ok(CurvatureAtPoint {
        riemann: raw.clone(),
        ricci,
        is_vacuum,
    })
}

/// Riemann tensor with prescribed Weyl part and Ricci tensor.
pub fn curvature_from_weyl_and_ricci(weyl: &Rank4, ricci: &Matrix4<f64>) -> Result<CurvatureAtPoint> {
    let g = |a: usize, b: usize| if a == b { ETA[a] } else { 0.0 };
    let ric = 0.5 * (ricci + ricci.transpose());
    let scalar: f64 = (0..4).map(|a| ETA[a] * ric[(a, a)]).sum();
    let r = Rank4::from_fn(|a, b, c, d| {
        weyl.get(a, b, c, d)
            - 0.5
                * (g(a, c) * ric[(b, d)] - g(a, d) * ric[(b, c)] + g(b, d) * ric[(a, c)]
                    - g(b, c) * ric[(a, d)])
            + scalar / 6.0 * (g(a, c) * g(b, d) - g(a, d) * g(b, c))
    });
    validate_riemann(&r)
}

/// Electric and magnetic 3x3 parts of a vacuum Weyl tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectricMagneticParts {
    d: Matrix3<f64>,
    e: Matrix3<f64>,
}

fn symmetric_traceless_residual(m: &Matrix3<f64>) -> f64 {
    (m - m.transpose()).amax().max(m.trace().abs())
}

impl ElectricMagneticParts {
    pub fn new(d: Matrix3<f64>, e: Matrix3<f64>) -> Result<Self> {
        for (name, m) in [("D", &d), ("E", &e)] {
            if !m.iter().all(|v| v.is_finite()) {
                return Err(Error::NotSymmetricTraceless {
                    name,
                    residual: f64::NAN,
                });
            }
            let residual = symmetric_traceless_residual(m);
            if residual > EM_TOL * m.amax().max(1.0) {
                return Err(Error::NotSymmetricTraceless { name, residual });
            }
        }
        Ok(Self { d, e })
    }

    pub fn zero() -> Self {
        Self {
            d: Matrix3::zeros(),
            e: Matrix3::zeros(),
        }
    }

    pub fn d(&self) -> &Matrix3<f64> {
        &self.d
    }

    pub fn e(&self) -> &Matrix3<f64> {
        &self.e
    }
}

pub fn weyl_from_electric_magnetic(parts: &ElectricMagneticParts) -> Result<CurvatureAtPoint> {
    let d = parts.d;
    let e = parts.e;
    let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let mut w = Rank4::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let v = d[(i, j)];
            w.set(0, i + 1, 0, j + 1, v);
            w.set(i + 1, 0, j + 1, 0, v);
            w.set(0, i + 1, j + 1, 0, -v);
            w.set(i + 1, 0, 0, j + 1, -v);
            for k in 0..3 {
                let m: f64 = (0..3).map(|n| levi_civita3(j, k, n) * e[(i, n)]).sum();
                w.set(0, i + 1, j + 1, k + 1, m);
                w.set(i + 1, 0, j + 1, k + 1, -m);
                w.set(j + 1, k + 1, 0, i + 1, m);
                w.set(j + 1, k + 1, i + 1, 0, -m);
                for l in 0..3 {
                    let s = delta(i, k) * d[(j, l)] + delta(j, l) * d[(i, k)]
                        - delta(i, l) * d[(j, k)]
                        - delta(j, k) * d[(i, l)];
                    w.set(i + 1, j + 1, k + 1, l + 1, s);
                }
            }
        }
    }
    let c = validate_riemann(&w)?;
    c.require_vacuum()?;
    Ok(c)
}

pub fn electric_magnetic_from_weyl(c: &CurvatureAtPoint) -> Result<ElectricMagneticParts> {
    c.require_vacuum()?;
    let d = c.electric();
    let e = Matrix3::from_fn(|i, n| {
        let mut s = 0.0;
        for j in 0..3 {
            for k in 0..3 {
                s += levi_civita3(j, k, n) * c.w0(i, j, k);
            }
        }
        0.5 * s
    });
    Ok(ElectricMagneticParts { d, e })
}

/// Totally symmetric Bel-Robinson tensor with lower indices.
#[derive(Debug, Clone, PartialEq)]
pub struct BelRobinsonTensor {
    q: Rank4,
}

impl BelRobinsonTensor {
    pub fn q(&self) -> &Rank4 {
        &self.q
    }

    pub fn contract(
        &self,
        u: &Vector4<f64>,
        v: &Vector4<f64>,
        w: &Vector4<f64>,
        z: &Vector4<f64>,
    ) -> f64 {
        self.q.contract(u, v, w, z)
    }

    /// Largest deviation between any component and its index permutations.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let v = self.q.get(a, b, c, d);
                        for p in permutations4([a, b, c, d]) {
                            worst = worst.max((v - self.q.get(p[0], p[1], p[2], p[3])).abs());
                        }
                    }
                }
            }
        }
        worst
    }
}

/// All 24 orderings of four indices.
pub fn permutations4(idx: [usize; 4]) -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let mut seen = [false; 4];
                    for &p in &[i, j, k, l] {
                        seen[p] = true;
                    }
                    if seen.iter().all(|&s| s) {
                        out.push([idx[i], idx[j], idx[k], idx[l]]);
                    }
                }
            }
        }
    }
    out
}

pub fn bel_robinson(c: &CurvatureAtPoint) -> Result<BelRobinsonTensor> {
    c.require_vacuum()?;
    let w = &c.riemann;
    // W_a^{rst} W_{brst}
    let square = Matrix4::from_fn(|a, b| {
        let mut s = 0.0;
        for r in 0..4 {
            for p in 0..4 {
                for t in 0..4 {
                    s += ETA[r] * ETA[p] * ETA[t] * w.get(a, r, p, t) * w.get(b, r, p, t);
                }
            }
        }
        s
    });
    let q = Rank4::from_fn(|m, n, a, b| {
        let mut s = 0.0;
        for r in 0..4 {
            for p in 0..4 {
                let g = ETA[r] * ETA[p];
                s += g * (w.get(r, m, p, a) * w.get(r, n, p, b) + w.get(r, m, p, b) * w.get(r, n, p, a));
            }
        }
        if m == n {
            s -= 0.5 * ETA[m] * square[(a, b)];
        }
        s
    });
    Ok(BelRobinsonTensor { q })
}

fn v_components(c: &CurvatureAtPoint) -> Vector4<f64> {
    let d = c.electric();
    let mut v0 = d.norm_squared();
    for k in 0..3 {
        for m in 0..3 {
            for n in 0..3 {
                v0 += 0.5 * c.w0(k, m, n).powi(2);
            }
        }
    }
    let mut v = Vector4::new(v0, 0.0, 0.0, 0.0);
    for i in 0..3 {
        let mut s = 0.0;
        for m in 0..3 {
            for n in 0..3 {
                s += d[(m, n)] * c.w0(m, i, n);
            }
        }
        v[i + 1] = 2.0 * s;
    }
    v
}

/// The component formula `V0 a0 + V.a`, which is the Bel-Robinson contraction
/// `Q(e0, e0, e0, u)` with `u = (a0, a1, a2, a3)`.
pub fn q_contract(c: &CurvatureAtPoint, t0: &Observer) -> Result<f64> {
    c.require_vacuum()?;
    let v = v_components(c);
    let a = t0.a();
    Ok(v[0] * t0.a0() + v[1] * a[0] + v[2] * a[1] + v[3] * a[2])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CausalClass {
    TimelikeFuture,
    NullFuture,
    Spacelike,
    Zero,
    TimelikePast,
    NullPast,
}

impl CausalClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            CausalClass::TimelikeFuture => "timelike-future",
            CausalClass::NullFuture => "null-future",
            CausalClass::Spacelike => "spacelike",
            CausalClass::Zero => "zero",
            CausalClass::TimelikePast => "timelike-past",
            CausalClass::NullPast => "null-past",
        }
    }
}

impl fmt::Display for CausalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CausalVector {
    pub components: Vector4<f64>,
    pub class: CausalClass,
}

impl CausalVector {
    /// Null when `|<v, v>| <= 1e-12 max(1, v0^2)`.
    pub fn classify(components: Vector4<f64>) -> Self {
        let norm = minkowski(&components, &components);
        let band = 1e-12 * components[0].powi(2).max(1.0);
        let class = if components.iter().all(|&x| x == 0.0) {
            CausalClass::Zero
        } else if norm > band {
            CausalClass::Spacelike
        } else if norm.abs() <= band {
            if components[0] > 0.0 {
                CausalClass::NullFuture
            } else if components[0] < 0.0 {
                CausalClass::NullPast
            } else {
                CausalClass::Zero
            }
        } else if components[0] > 0.0 {
            CausalClass::TimelikeFuture
        } else {
            CausalClass::TimelikePast
        };
        Self { components, class }
    }

    pub fn norm(&self) -> f64 {
        minkowski(&self.components, &self.components)
    }

    pub fn spatial(&self) -> Vector3<f64> {
        Vector3::new(self.components[1], self.components[2], self.components[3])
    }
}

pub fn v_vector(c: &CurvatureAtPoint) -> Result<CausalVector> {
    c.require_vacuum()?;
    Ok(CausalVector::classify(v_components(c)))
}
