//! Small-sphere limit at order `r^3` in the presence of matter.
//!
//! With `T0 = (a0, -a)` the limit is `(4pi/3) T(e0, T0) = (4pi/3)(a0 T_00 - a^i T_0i)`,
//! so a positive density gives a positive energy for the static observer.

use std::f64::consts::PI;

use nalgebra::{Matrix4, Vector3, Vector4};

use crate::error::{Error, Result};
use crate::expansion::nonvacuum_data;
use crate::observer::Observer;
use crate::quadrature::{integrate_fn, SphereGrid};
use crate::tensor::{minkowski, CausalClass, CausalVector, CurvatureAtPoint, ETA};

const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressEnergy {
    t: Matrix4<f64>,
}

impl StressEnergy {
    pub fn new(t: Matrix4<f64>) -> Result<Self> {
        if let Some(bad) = t.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("T = {bad}")));
        }
        let residual = (t - t.transpose()).amax();
        if residual > SYMMETRY_TOL * t.amax().max(1.0) {
            return Err(Error::NotSymmetric(residual));
        }
        Ok(Self {
            t: (t + t.transpose()) * 0.5,
        })
    }

    pub fn zero() -> Self {
        Self { t: Matrix4::zeros() }
    }

    pub fn perfect_fluid(density: f64, pressure: f64) -> Self {
        Self {
            t: Matrix4::from_diagonal(&Vector4::new(density, pressure, pressure, pressure)),
        }
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.t
    }

    /// `T(u, v)` for contravariant `u`, `v`.
    pub fn eval(&self, u: &Vector4<f64>, v: &Vector4<f64>) -> f64 {
        u.dot(&(self.t * v))
    }

    /// Future-pointing vector dual to `-T(e0, .)`, i.e. `(T_00, -T_01, -T_02, -T_03)`.
    pub fn dual_vector(&self) -> CausalVector {
        CausalVector::classify(Vector4::new(self.t[(0, 0)], -self.t[(0, 1)], -self.t[(0, 2)], -self.t[(0, 3)]))
    }

    /// Sampled dominant energy check: the dual vector is future causal and
    /// `T(u, v) >= 0` for `u, v` in `e0` plus the 26 null vectors `(1, n)`,
    /// `n` running over the normalized nonzero points of `{-1, 0, 1}^3`.
    pub fn dominant_energy(&self) -> bool {
        let dual_ok = matches!(
            self.dual_vector().class,
            CausalClass::TimelikeFuture | CausalClass::NullFuture | CausalClass::Zero
        );
        let net = causal_net();
        let tol = 1e-12 * self.t.amax().max(1.0);
        dual_ok && net.iter().all(|u| net.iter().all(|v| self.eval(u, v) >= -tol))
    }
}

fn causal_net() -> Vec<Vector4<f64>> {
    let mut out = vec![Vector4::new(1.0, 0.0, 0.0, 0.0)];
    for i in -1i32..=1 {
        for j in -1i32..=1 {
            for k in -1i32..=1 {
                if (i, j, k) != (0, 0, 0) {
                    let n = Vector3::new(i as f64, j as f64, k as f64).normalize();
                    out.push(Vector4::new(1.0, n[0], n[1], n[2]));
                }
            }
        }
    }
    out
}

fn metric() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::from(ETA))
}

/// `T = (Ric - R g / 2) / 8pi`.
pub fn stress_from_curvature(c: &CurvatureAtPoint) -> StressEnergy {
    let t = (c.ricci() - metric() * (0.5 * c.scalar_curvature())) / (8.0 * PI);
    StressEnergy {
        t: (t + t.transpose()) * 0.5,
    }
}

/// Ricci tensor solving the Einstein equation for `T`: `Ric = 8pi (T - tr(T) g / 2)`.
pub fn ricci_from_stress(t: &StressEnergy) -> Matrix4<f64> {
    let trace: f64 = (0..4).map(|i| ETA[i] * t.t[(i, i)]).sum();
    (t.t - metric() * (0.5 * trace)) * (8.0 * PI)
}

pub fn limit_energy(t: &StressEnergy, t0: &Observer) -> f64 {
    4.0 * PI / 3.0 * t.eval(&Vector4::new(1.0, 0.0, 0.0, 0.0), &t0.four_vector())
}

/// `(1/8pi) int x^i div alpha_H`, the leading momentum coefficient.
pub fn momentum_components(c: &CurvatureAtPoint, grid: &SphereGrid) -> Vector3<f64> {
    let data = nonvacuum_data(c);
    integrate_fn(grid, |x| x.vector() * data.div_ah.eval(x)) / (8.0 * PI)
}

/// Closed form `-(4pi/3) T_0i` of the same momentum.
pub fn momentum_closed_form(c: &CurvatureAtPoint) -> Vector3<f64> {
    let t = stress_from_curvature(c);
    Vector3::new(t.t[(0, 1)], t.t[(0, 2)], t.t[(0, 3)]) * (-4.0 * PI / 3.0)
}

/// Observer minimizing `limit_energy` and the minimum `(4pi/3) sqrt(-<V, V>)`.
pub fn min_energy_over_observers(t: &StressEnergy) -> Result<(Observer, f64)> {
    let v = t.dual_vector();
    if v.class != CausalClass::TimelikeFuture {
        let c = v.components;
        return Err(Error::NotTimelike {
            components: [c[0], c[1], c[2], c[3]],
            class: v.class,
        });
    }
    let m = (-minkowski(&v.components, &v.components)).sqrt();
    let p = Vector3::new(t.t[(0, 1)], t.t[(0, 2)], t.t[(0, 3)]);
    Ok((Observer::new(p / m)?, 4.0 * PI / 3.0 * m))
}
