//! Fields on the unit sphere of directions.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};

use crate::sphere::Direction;

/// Values a sphere field may take: closed under addition and real scaling.
pub trait FieldValue: Clone + Send + Sync + 'static {
    fn zero() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn scale(&self, s: f64) -> Self;
    fn max_abs(&self) -> f64;
    /// Orthogonal projection onto the tangent plane at `x`, applied to every slot.
    fn project_tangent(&self, _x: &Vector3<f64>) -> Self {
        self.clone()
    }
}

impl FieldValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn scale(&self, s: f64) -> Self {
        self * s
    }
    fn max_abs(&self) -> f64 {
        self.abs()
    }
}

impl FieldValue for Vector3<f64> {
    fn zero() -> Self {
        Vector3::zeros()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn scale(&self, s: f64) -> Self {
        self * s
    }
    fn max_abs(&self) -> f64 {
        self.amax()
    }
    fn project_tangent(&self, x: &Vector3<f64>) -> Self {
        self - x * x.dot(self)
    }
}

impl FieldValue for Matrix3<f64> {
    fn zero() -> Self {
        Matrix3::zeros()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn scale(&self, s: f64) -> Self {
        self * s
    }
    fn max_abs(&self) -> f64 {
        self.amax()
    }
    fn project_tangent(&self, x: &Vector3<f64>) -> Self {
        let p = Matrix3::identity() - x * x.transpose();
        p * self * p
    }
}

/// How the value of a field transforms on the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Scalar,
    /// A fixed set of scalar functions, e.g. one per ambient index.
    Components,
    /// A tangent vector in Cartesian form.
    TangentVector,
    /// A tangent 2-tensor in Cartesian form.
    TangentTensor,
}

impl FieldKind {
    pub fn is_tangent(self) -> bool {
        matches!(self, FieldKind::TangentVector | FieldKind::TangentTensor)
    }
}

type Evaluator<T> = Arc<dyn Fn(&Direction) -> T + Send + Sync>;

#[derive(Clone)]
pub struct SphereField<T> {
    kind: FieldKind,
    eval: Evaluator<T>,
}

impl<T: FieldValue> SphereField<T> {
    pub fn new(kind: FieldKind, f: impl Fn(&Direction) -> T + Send + Sync + 'static) -> Self {
        Self {
            kind,
            eval: Arc::new(f),
        }
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn eval(&self, x: &Direction) -> T {
        (self.eval)(x)
    }

    pub fn map<U: FieldValue>(
        &self,
        kind: FieldKind,
        f: impl Fn(T) -> U + Send + Sync + 'static,
    ) -> SphereField<U> {
        let inner = self.eval.clone();
        SphereField::new(kind, move |x| f(inner(x)))
    }

    pub fn zero(kind: FieldKind) -> Self {
        Self::new(kind, |_| T::zero())
    }

    pub fn sum(&self, other: &Self) -> Self {
        let a = self.eval.clone();
        let b = other.eval.clone();
        Self::new(self.kind, move |x| a(x).add(&b(x)))
    }

    pub fn scaled(&self, s: f64) -> Self {
        let a = self.eval.clone();
        Self::new(self.kind, move |x| a(x).scale(s))
    }
}

impl SphereField<f64> {
    pub fn scalar(f: impl Fn(&Direction) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(FieldKind::Scalar, f)
    }

    pub fn product(&self, other: &Self) -> Self {
        let a = self.eval.clone();
        let b = other.eval.clone();
        Self::scalar(move |x| a(x) * b(x))
    }
}

impl SphereField<Vector3<f64>> {
    pub fn component(&self, i: usize) -> SphereField<f64> {
        self.map(FieldKind::Scalar, move |v| v[i])
    }
}

impl<T> fmt::Debug for SphereField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SphereField").field("kind", &self.kind).finish_non_exhaustive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algebra() {
        let x = Direction::from_vector(Vector3::new(1.0, 2.0, 2.0)).unwrap();
        let f = SphereField::scalar(|d| d.vector()[0]);
        let g = f.sum(&f.scaled(2.0)).product(&f);
        assert!((g.eval(&x) - 3.0 / 9.0).abs() < 1e-15);
        let v = SphereField::new(FieldKind::Components, |d: &Direction| *d.vector());
        assert!((v.component(2).eval(&x) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn projection_is_tangent() {
        let x = Vector3::new(0.0, 0.6, 0.8);
        let m = Matrix3::from_fn(|i, j| (i * 3 + j) as f64);
        let p = m.project_tangent(&x);
        assert!((p * x).amax() < 1e-14);
        assert!((p.transpose() * x).amax() < 1e-14);
    }
}
