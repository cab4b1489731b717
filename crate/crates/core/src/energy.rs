//! The vacuum energy at order `r^5`: closed-form coefficients, the quadrature
//! assembly from the three Hamiltonian pieces, and the minimizing observer.
//!
//! `E5(a) = (1/90) [Q(e0, e0, e0, T0) + sum D^2 / (2 a0)]
//!        = (1/8pi) [A0 a0 + A_i a^i + A_ij a^i a^j / a0]`.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};

use crate::calculus::{component_gradients, laplacian};
use crate::error::Result;
use crate::expansion::k3_minus_h3_integral;
use crate::observer::Observer;
use crate::quadrature::{integrate_fn, SphereGrid};
use crate::sphere::{
    aa3_field, beta_norm_sq_field, p_vector_field, rij_sj_fields, w0_field, w_vector_field, xi3_vector_field,
};
use crate::tensor::{q_contract, v_vector, CausalClass, CurvatureAtPoint};

pub const DEFAULT_GRID_DEGREE: usize = 12;

const MAX_ITERATIONS: usize = 200;
const DIVERGENCE_RADIUS: f64 = 1e6;
const ARMIJO: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyCoefficients {
    pub a0: f64,
    pub ai: Vector3<f64>,
    pub aij: Matrix3<f64>,
}

impl EnergyCoefficients {
    /// `(A0 a0 + A_i a^i + A_ij a^i a^j / a0) / 8pi`.
    pub fn e5(&self, t0: &Observer) -> f64 {
        let a = t0.a();
        let a0 = t0.a0();
        (self.a0 * a0 + self.ai.dot(&a) + a.dot(&(self.aij * a)) / a0) / (8.0 * PI)
    }
}

fn sum_d2(c: &CurvatureAtPoint) -> f64 {
    c.electric().norm_squared()
}

pub fn coefficients_closed_form(c: &CurvatureAtPoint) -> Result<EnergyCoefficients> {
    c.require_vacuum()?;
    let d = c.electric();
    let d2 = d.norm_squared();
    let mut w2 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                w2 += c.w0(i, j, k).powi(2);
            }
        }
    }
    let ai = Vector3::from_fn(|i, _| {
        let mut s = 0.0;
        for n in 0..3 {
            for m in 0..3 {
                s += d[(n, m)] * c.w0(m, i, n);
            }
        }
        8.0 * PI / 45.0 * s
    });
    Ok(EnergyCoefficients {
        a0: 4.0 * PI / 15.0 * (w2 / 6.0 + 0.5 * d2),
        ai,
        aij: Matrix3::identity() * (-2.0 * PI / 45.0 * d2),
    })
}

pub fn e5_closed_form(c: &CurvatureAtPoint, t0: &Observer) -> Result<f64> {
    Ok((q_contract(c, t0)? + sum_d2(c) / (2.0 * t0.a0())) / 90.0)
}

/// Gradient of `E5` in `a`.
pub fn e5_gradient(c: &CurvatureAtPoint, a: &Vector3<f64>) -> Result<Vector3<f64>> {
    let v = v_vector(c)?;
    let a0 = (1.0 + a.norm_squared()).sqrt();
    let v0 = v.components[0];
    let d2 = sum_d2(c);
    Ok((a * (v0 / a0) + v.spatial() - a * (0.5 * d2 / a0.powi(3))) / 90.0)
}

/// Hessian of `E5` in `a`.
pub fn e5_hessian(c: &CurvatureAtPoint, a: &Vector3<f64>) -> Result<Matrix3<f64>> {
    let v = v_vector(c)?;
    let a0 = (1.0 + a.norm_squared()).sqrt();
    let v0 = v.components[0];
    let d2 = sum_d2(c);
    let aat = a * a.transpose();
    let id = Matrix3::identity();
    Ok(((id / a0 - aat / a0.powi(3)) * v0 - (id / a0.powi(3) - aat * (3.0 / a0.powi(5))) * (0.5 * d2)) / 90.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinimizerStatus {
    UniqueMinimum,
    NullVNoMinimum,
    ZeroCurvature,
}

impl MinimizerStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            MinimizerStatus::UniqueMinimum => "unique-minimum",
            MinimizerStatus::NullVNoMinimum => "null-V-no-minimum",
            MinimizerStatus::ZeroCurvature => "zero-curvature",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizerResult {
    pub a_bar: Vector3<f64>,
    pub e5_min: f64,
    pub gradient_norm: f64,
    pub hessian_min_eigenvalue: f64,
    pub iterations: usize,
    /// Whether the iterates left the ball `|a| <= 1e6`.
    pub diverged: bool,
    pub status: MinimizerStatus,
}

fn e5_at(c: &CurvatureAtPoint, a: &Vector3<f64>) -> Result<f64> {
    e5_closed_form(c, &Observer::new(*a)?)
}

/// Damped Newton iteration from `a = 0`.
///
/// With null `V` the infimum is approached only as `|a| -> infinity`; the
/// iteration then runs until it leaves the ball of radius `1e6` or hits the
/// iteration cap, and the status records the degeneracy.
pub fn minimize(c: &CurvatureAtPoint) -> Result<MinimizerResult> {
    let v = v_vector(c)?;
    if v.class == CausalClass::Zero {
        return Ok(MinimizerResult {
            a_bar: Vector3::zeros(),
            e5_min: 0.0,
            gradient_norm: 0.0,
            hessian_min_eigenvalue: 0.0,
            iterations: 0,
            diverged: false,
            status: MinimizerStatus::ZeroCurvature,
        });
    }
    let null = v.class == CausalClass::NullFuture;
    let tol = 1e-12 * coefficients_closed_form(c)?.a0.abs().max(1.0);
    let mut a = Vector3::zeros();
    let mut iterations = 0;
    let mut diverged = false;
    while iterations < MAX_ITERATIONS {
        let g = e5_gradient(c, &a)?;
        if !null && g.norm() <= tol {
            break;
        }
        let h = e5_hessian(c, &a)?;
        let step = match h.cholesky() {
            Some(ch) => -ch.solve(&g),
            None => -g,
        };
        let f0 = e5_at(c, &a)?;
        let slope = g.dot(&step);
        let mut t = 1.0;
        while t > 1e-12 && e5_at(c, &(a + step * t))? > f0 + ARMIJO * t * slope {
            t *= 0.5;
        }
        a += step * t;
        iterations += 1;
        if a.norm() > DIVERGENCE_RADIUS {
            diverged = true;
            break;
        }
    }
    let g = e5_gradient(c, &a)?;
    let h = e5_hessian(c, &a)?;
    Ok(MinimizerResult {
        a_bar: a,
        e5_min: e5_at(c, &a)?,
        gradient_norm: g.norm(),
        hessian_min_eigenvalue: h.symmetric_eigenvalues().min(),
        iterations,
        diverged,
        status: if null {
            MinimizerStatus::NullVNoMinimum
        } else {
            MinimizerStatus::UniqueMinimum
        },
    })
}

/// Limit of `r^-5` times the energy-component integral, assembled from sphere fields.
pub fn energy_component_limit(c: &CurvatureAtPoint, t0: &Observer, grid: &SphereGrid) -> Result<f64> {
    let a = t0.a();
    let a0 = t0.a0();
    let w0 = w0_field(c)?;
    let aa3 = aa3_field(c)?;
    let p = p_vector_field(c)?;
    let (r, s) = rij_sj_fields(c)?;
    let x3 = xi3_vector_field(c)?;
    let x3_plus_p = x3.sum(&p);
    let k3h3 = k3_minus_h3_integral(c, grid)?;

    let isotropic = integrate_fn(grid, |x| {
        let w = w0.eval(x);
        let pv = p.eval(x);
        let aa = aa3.eval(x).norm_squared();
        0.5 * aa - 2.0 / 3.0 * w * w - 30.0 * a.dot(&pv).powi(2) / (a0 * a0)
    });
    let coupled = integrate_fn(grid, |x| {
        let w = w0.eval(x);
        let xv = x.vector();
        let grads = component_gradients(&x3_plus_p, x);
        let bracket = r.eval(x) + grads * 2.0
            + xv * (s.eval(x) - laplacian(&x3, x) + p.eval(x) * 12.0).transpose();
        -0.75 / a0 * w * w * a.dot(xv).powi(2) + 0.5 / a0 * w * a.dot(&(bracket * a))
    });
    Ok(a0 * (isotropic + k3h3) + coupled)
}

/// Limit of `r^-5` times the reference Hamiltonian.
pub fn reference_hamiltonian_limit(c: &CurvatureAtPoint, t0: &Observer, grid: &SphereGrid) -> Result<f64> {
    let a = t0.a();
    let a0 = t0.a0();
    let w0 = w0_field(c)?;
    let p = p_vector_field(c)?;
    Ok(integrate_fn(grid, |x| {
        let w = w0.eval(x);
        4.0 / 3.0 * a0 * w * w - 10.0 / a0 * a.dot(x.vector()) * w * a.dot(&p.eval(x))
    }))
}

/// Limit of `r^-5` times the physical Hamiltonian.
pub fn physical_hamiltonian_limit(c: &CurvatureAtPoint, t0: &Observer, grid: &SphereGrid) -> Result<f64> {
    let a = t0.a();
    let a0 = t0.a0();
    let w0 = w0_field(c)?;
    let wv = w_vector_field(c)?;
    let beta2 = beta_norm_sq_field(c)?;
    Ok(integrate_fn(grid, |x| {
        let w = w0.eval(x);
        4.0 * a0 / 3.0 * w * w + 2.0 / 3.0 * a.dot(&wv.eval(x)) * w - a.dot(x.vector()) * beta2.eval(x)
    }))
}

/// The three Hamiltonian pieces at one observer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyPieces {
    pub energy_component: f64,
    pub reference_hamiltonian: f64,
    pub physical_hamiltonian: f64,
}

impl EnergyPieces {
    pub fn e5(&self) -> f64 {
        (self.energy_component + self.reference_hamiltonian - self.physical_hamiltonian) / (8.0 * PI)
    }
}

pub fn energy_pieces(c: &CurvatureAtPoint, t0: &Observer, grid: &SphereGrid) -> Result<EnergyPieces> {
    Ok(EnergyPieces {
        energy_component: energy_component_limit(c, t0, grid)?,
        reference_hamiltonian: reference_hamiltonian_limit(c, t0, grid)?,
        physical_hamiltonian: physical_hamiltonian_limit(c, t0, grid)?,
    })
}

pub fn e5_from_pieces(c: &CurvatureAtPoint, t0: &Observer, grid: &SphereGrid) -> Result<f64> {
    Ok(energy_pieces(c, t0, grid)?.e5())
}

/// Recovers `(A0, A_i, A_ij)` from the quadrature assembly by evaluating it at
/// a few observers and solving the resulting linear relations.
pub fn coefficients_from_pieces(c: &CurvatureAtPoint, grid: &SphereGrid) -> Result<EnergyCoefficients> {
    let eval = |a: Vector3<f64>| -> Result<f64> { Ok(8.0 * PI * e5_from_pieces(c, &Observer::new(a)?, grid)?) };
    let a0 = eval(Vector3::zeros())?;
    let e = |i: usize| Vector3::ith(i, 1.0);
    let mut ai = Vector3::zeros();
    // even part: A0 a0 + a^T A a / a0
    let even = |a: Vector3<f64>| -> Result<f64> {
        let n0 = (1.0 + a.norm_squared()).sqrt();
        Ok(((eval(a)? + eval(-a)?) / 2.0 - a0 * n0) * n0)
    };
    let mut aij = Matrix3::zeros();
    for i in 0..3 {
        aij[(i, i)] = even(e(i))?;
    }
    for i in 0..3 {
        for j in 0..i {
            let v = (even(e(i) + e(j))? - aij[(i, i)] - aij[(j, j)]) / 2.0;
            aij[(i, j)] = v;
            aij[(j, i)] = v;
        }
    }
    for i in 0..3 {
        ai[i] = (eval(e(i))? - eval(-e(i))?) / 2.0;
    }
    Ok(EnergyCoefficients { a0, ai, aij })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::build_grid;
    use crate::random::{random_observer_a, random_vacuum};
    use crate::tensor::{weyl_from_electric_magnetic, ElectricMagneticParts};
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn diag_electric() -> CurvatureAtPoint {
        let d = Matrix3::from_diagonal(&Vector3::new(2.0, -1.0, -1.0));
        weyl_from_electric_magnetic(&ElectricMagneticParts::new(d, Matrix3::zeros()).unwrap()).unwrap()
    }

    fn null_pair(b: f64) -> CurvatureAtPoint {
        let d = Matrix3::from_diagonal(&Vector3::new(0.0, b, -b));
        let mut e = Matrix3::zeros();
        e[(1, 2)] = b;
        e[(2, 1)] = b;
        weyl_from_electric_magnetic(&ElectricMagneticParts::new(d, e).unwrap()).unwrap()
    }

    #[test]
    fn zero_curvature() {
        let c = CurvatureAtPoint::zero();
        let k = coefficients_closed_form(&c).unwrap();
        assert_eq!((k.a0, k.ai, k.aij), (0.0, Vector3::zeros(), Matrix3::zeros()));
        let t0 = Observer::new(Vector3::new(0.3, -1.0, 2.0)).unwrap();
        assert_eq!(e5_closed_form(&c, &t0).unwrap(), 0.0);
        assert_eq!(e5_gradient(&c, &t0.a()).unwrap(), Vector3::zeros());
        let grid = build_grid(DEFAULT_GRID_DEGREE).unwrap();
        assert_eq!(e5_from_pieces(&c, &t0, &grid).unwrap(), 0.0);
        assert_eq!(minimize(&c).unwrap().status, MinimizerStatus::ZeroCurvature);
    }

    #[test]
    fn electric_coefficients() {
        let k = coefficients_closed_form(&diag_electric()).unwrap();
        assert!((k.a0 - 4.0 * PI / 5.0).abs() < 1e-14);
        assert_eq!(k.ai, Vector3::zeros());
        assert!((k.aij - Matrix3::identity() * (-4.0 * PI / 15.0)).amax() < 1e-14);
    }

    #[test]
    fn worked_values() {
        let rest = Observer::rest();
        assert!((e5_closed_form(&diag_electric(), &rest).unwrap() - 0.1).abs() < 1e-15);
        assert!((e5_closed_form(&null_pair(1.0), &rest).unwrap() - 1.0 / 18.0).abs() < 1e-15);
        let k = coefficients_closed_form(&diag_electric()).unwrap();
        assert!((k.e5(&rest) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = StdRng::seed_from_u64(1);
        for _ in 0..20 {
            let c = random_vacuum(&mut rng);
            let a = random_observer_a(&mut rng, 1.5);
            let g = e5_gradient(&c, &a).unwrap();
            let h = 1e-5;
            for i in 0..3 {
                let e = Vector3::ith(i, h);
                let fd = (e5_at(&c, &(a + e)).unwrap() - e5_at(&c, &(a - e)).unwrap()) / (2.0 * h);
                assert!((fd - g[i]).abs() < 1e-8);
            }
            let hess = e5_hessian(&c, &a).unwrap();
            for i in 0..3 {
                let e = Vector3::ith(i, h);
                let fd = (e5_gradient(&c, &(a + e)).unwrap() - e5_gradient(&c, &(a - e)).unwrap()) / (2.0 * h);
                assert!((fd - hess.column(i)).amax() < 1e-8);
            }
        }
        let g = e5_gradient(&diag_electric(), &Vector3::zeros()).unwrap();
        assert_eq!(g, Vector3::zeros());
    }

    #[test]
    fn minimizer_electric() {
        let r = minimize(&diag_electric()).unwrap();
        assert_eq!(r.status, MinimizerStatus::UniqueMinimum);
        assert_eq!(r.a_bar, Vector3::zeros());
        assert!((r.e5_min - 0.1).abs() < 1e-15);
        assert!(r.hessian_min_eigenvalue > 0.0);
        // grid search over |a| <= 2
        let c = diag_electric();
        let mut best = f64::INFINITY;
        for i in -20..=20 {
            for j in -20..=20 {
                let a = Vector3::new(i as f64 * 0.1, j as f64 * 0.1, 0.0);
                best = best.min(e5_at(&c, &a).unwrap());
            }
        }
        assert!(r.e5_min <= best + 1e-15);
    }

    #[test]
    fn minimizer_null() {
        let r = minimize(&null_pair(1.0)).unwrap();
        assert_eq!(r.status, MinimizerStatus::NullVNoMinimum);
        assert!(r.a_bar.norm() > 10.0);
    }

    #[test]
    fn minimizer_random() {
        let mut rng = StdRng::seed_from_u64(2);
        for _ in 0..10 {
            let c = random_vacuum(&mut rng);
            let r = minimize(&c).unwrap();
            assert_eq!(r.status, MinimizerStatus::UniqueMinimum);
            assert!(r.gradient_norm <= 1e-10);
            assert!(r.hessian_min_eigenvalue > 0.0);
        }
    }

    #[test]
    fn pieces_at_rest() {
        let c = diag_electric();
        let grid = build_grid(DEFAULT_GRID_DEGREE).unwrap();
        let rest = Observer::rest();
        let rh = reference_hamiltonian_limit(&c, &rest, &grid).unwrap();
        let ph = physical_hamiltonian_limit(&c, &rest, &grid).unwrap();
        assert!((rh - 4.0 / 3.0 * 8.0 * PI / 15.0 * 6.0).abs() < 1e-12);
        assert!((rh - ph).abs() < 1e-12);
        assert!((e5_from_pieces(&c, &rest, &grid).unwrap() - 0.1).abs() < 1e-8);
    }

    #[test]
    fn pieces_match_closed_form() {
        let mut rng = StdRng::seed_from_u64(3);
        let grid = build_grid(DEFAULT_GRID_DEGREE).unwrap();
        for _ in 0..3 {
            let c = random_vacuum(&mut rng);
            let t0 = Observer::new(random_observer_a(&mut rng, 1.0)).unwrap();
            let a = e5_from_pieces(&c, &t0, &grid).unwrap();
            let b = e5_closed_form(&c, &t0).unwrap();
            assert!((a - b).abs() <= 1e-8 * b.abs());
        }
    }

    #[test]
    fn recovered_coefficients() {
        let mut rng = StdRng::seed_from_u64(4);
        let grid = build_grid(DEFAULT_GRID_DEGREE).unwrap();
        let c = random_vacuum(&mut rng);
        let q = coefficients_from_pieces(&c, &grid).unwrap();
        let k = coefficients_closed_form(&c).unwrap();
        let scale = k.a0.abs();
        assert!((q.a0 - k.a0).abs() <= 1e-8 * scale);
        assert!((q.ai - k.ai).amax() <= 1e-7 * scale);
        assert!((q.aij - k.aij).amax() <= 1e-7 * scale);
    }
}
