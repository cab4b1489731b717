//! Finite-difference calculus on the unit sphere.
//!
//! Derivatives are taken along great circles with central differences at step
//! `h` and `h / 2`, combined by one Richardson step; `h = 1e-3` for first
//! derivatives and `1e-2` for second derivatives, where roundoff scales as `1/h^2`. Tangent-valued fields
//! are differentiated in Cartesian form and projected back to the tangent plane,
//! which is the Levi-Civita connection of the round metric.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::field::{FieldValue, SphereField};
use crate::sphere::{frame_at, Direction};

pub const STEP: f64 = 1e-3;
pub const SECOND_STEP: f64 = 1e-2;
const TANGENT_TOL: f64 = 1e-10;

/// Point at arclength `s` on the great circle through `x` with unit tangent `t`.
pub fn great_circle(x: &Direction, t: &Vector3<f64>, s: f64) -> Direction {
    Direction::from_vector(x.vector() * s.cos() + t * s.sin()).expect("unit inputs")
}

fn central<T: FieldValue>(f: &SphereField<T>, x: &Direction, t: &Vector3<f64>, h: f64) -> T {
    f.eval(&great_circle(x, t, h))
        .add(&f.eval(&great_circle(x, t, -h)).scale(-1.0))
        .scale(0.5 / h)
}

fn second<T: FieldValue>(f: &SphereField<T>, x: &Direction, t: &Vector3<f64>, h: f64, center: &T) -> T {
    f.eval(&great_circle(x, t, h))
        .add(&f.eval(&great_circle(x, t, -h)))
        .add(&center.scale(-2.0))
        .scale(1.0 / (h * h))
}

fn finish<T: FieldValue>(f: &SphereField<T>, x: &Direction, value: T) -> T {
    if f.kind().is_tangent() {
        value.project_tangent(x.vector())
    } else {
        value
    }
}

fn raw_derivative<T: FieldValue>(f: &SphereField<T>, x: &Direction, t: &Vector3<f64>) -> T {
    let coarse = central(f, x, t, STEP);
    let fine = central(f, x, t, STEP / 2.0);
    fine.scale(4.0 / 3.0).add(&coarse.scale(-1.0 / 3.0))
}

/// Covariant derivative of `f` at `x` along the unit tangent `t`.
pub fn directional_derivative<T: FieldValue>(f: &SphereField<T>, x: &Direction, t: &Vector3<f64>) -> Result<T> {
    let dot = x.vector().dot(t);
    let norm = t.norm();
    if dot.abs() > TANGENT_TOL || (norm - 1.0).abs() > TANGENT_TOL {
        return Err(Error::NotTangent { dot, norm });
    }
    Ok(finish(f, x, raw_derivative(f, x, t)))
}

/// Covariant derivative along an arbitrary tangent vector `v` (not necessarily unit).
pub fn derivative_along<T: FieldValue>(f: &SphereField<T>, x: &Direction, v: &Vector3<f64>) -> T {
    let v = v - x.vector() * x.vector().dot(v);
    let n = v.norm();
    if n < 1e-14 {
        return T::zero();
    }
    finish(f, x, raw_derivative(f, x, &(v / n))).scale(n)
}

/// Second derivative along the geodesic with unit tangent `t`, i.e. the Hessian at `(t, t)`.
pub fn second_derivative<T: FieldValue>(f: &SphereField<T>, x: &Direction, t: &Vector3<f64>) -> T {
    let center = f.eval(x);
    let coarse = second(f, x, t, SECOND_STEP, &center);
    let fine = second(f, x, t, SECOND_STEP / 2.0, &center);
    fine.scale(4.0 / 3.0).add(&coarse.scale(-1.0 / 3.0))
}

/// Laplace-Beltrami operator of the round metric, for scalar or component fields.
pub fn laplacian<T: FieldValue>(f: &SphereField<T>, x: &Direction) -> T {
    let frame = frame_at(x);
    second_derivative(f, x, &frame.t[0]).add(&second_derivative(f, x, &frame.t[1]))
}

/// Gradient of a scalar field as a Cartesian tangent vector.
pub fn gradient(f: &SphereField<f64>, x: &Direction) -> Vector3<f64> {
    let frame = frame_at(x);
    frame.t[0] * raw_derivative(f, x, &frame.t[0]) + frame.t[1] * raw_derivative(f, x, &frame.t[1])
}

/// Gradients of each component of a component field; column `j` is the gradient of component `j`.
pub fn component_gradients(f: &SphereField<Vector3<f64>>, x: &Direction) -> Matrix3<f64> {
    let frame = frame_at(x);
    let d0 = raw_derivative(f, x, &frame.t[0]);
    let d1 = raw_derivative(f, x, &frame.t[1]);
    frame.t[0] * d0.transpose() + frame.t[1] * d1.transpose()
}

/// Divergence of a tangent vector field.
pub fn divergence(f: &SphereField<Vector3<f64>>, x: &Direction) -> f64 {
    let frame = frame_at(x);
    (0..2)
        .map(|a| frame.t[a].dot(&raw_derivative(f, x, &frame.t[a])))
        .sum()
}

/// Divergence `nabla^a T_ab` of a tangent 2-tensor field, as a Cartesian tangent vector.
pub fn tensor_divergence(f: &SphereField<Matrix3<f64>>, x: &Direction) -> Vector3<f64> {
    let frame = frame_at(x);
    let mut out = Vector3::zeros();
    for a in 0..2 {
        out += raw_derivative(f, x, &frame.t[a]).transpose() * frame.t[a];
    }
    x.projector() * out
}
