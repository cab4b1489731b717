use nalgebra::{Vector3, Vector4};

use crate::error::{Error, Result};

/// Future unit timelike observer `T0 = (a0, -a)` parameterized by its spatial part `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observer {
    a: Vector3<f64>,
}

impl Observer {
    pub fn new(a: Vector3<f64>) -> Result<Self> {
        if a.iter().all(|v| v.is_finite()) {
            Ok(Self { a })
        } else {
            Err(Error::Observer)
        }
    }

    /// The static observer `e0`.
    pub fn rest() -> Self {
        Self { a: Vector3::zeros() }
    }

    pub fn a(&self) -> Vector3<f64> {
        self.a
    }

    pub fn a0(&self) -> f64 {
        (1.0 + self.a.norm_squared()).sqrt()
    }

    /// Contravariant components `(a0, -a1, -a2, -a3)`.
    pub fn four_vector(&self) -> Vector4<f64> {
        Vector4::new(self.a0(), -self.a[0], -self.a[1], -self.a[2])
    }
}

impl Default for Observer {
    fn default() -> Self {
        Self::rest()
    }
}
