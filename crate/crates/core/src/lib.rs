//! Small-sphere limit of quasi-local energy from curvature at a point.
//!
//! The input is the Riemann tensor at `p` in an orthonormal frame with metric
//! `diag(-1, 1, 1, 1)`. In vacuum everything is driven by the electric and
//! magnetic parts `(D, E)` of the Weyl tensor. The crate provides
//!
//! - curvature validation, the Bel-Robinson tensor and the vector `V` ([`tensor`]),
//! - the null frame and curvature fields on the sphere of directions ([`sphere`]),
//! - finite-difference calculus and quadrature on the sphere ([`calculus`], [`quadrature`]),
//! - expansion coefficients of the data on the small spheres ([`expansion`]),
//! - the energy at order `r^5` and its minimizing observer ([`energy`]),
//! - the order `r^3` limit with matter ([`nonvacuum`]).
//!
//! ```
//! use nalgebra::{Matrix3, Vector3};
//! use smallsphere::energy::{e5_closed_form, minimize};
//! use smallsphere::observer::Observer;
//! use smallsphere::tensor::{weyl_from_electric_magnetic, ElectricMagneticParts};
//!
//! let d = Matrix3::from_diagonal(&Vector3::new(2.0, -1.0, -1.0));
//! let c = weyl_from_electric_magnetic(&ElectricMagneticParts::new(d, Matrix3::zeros())?)?;
//! assert!((e5_closed_form(&c, &Observer::rest())? - 0.1).abs() < 1e-15);
//! assert_eq!(minimize(&c)?.a_bar, Vector3::zeros());
//! # Ok::<(), smallsphere::error::Error>(())
//! ```

pub mod calculus;
pub mod energy;
pub mod error;
pub mod expansion;
pub mod field;
pub mod nonvacuum;
pub mod observer;
pub mod quadrature;
pub mod random;
pub mod sphere;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
