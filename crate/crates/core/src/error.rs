use std::fmt;

use thiserror::Error;

/// Algebraic identity a curvature array is required to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Identity {
    FirstPairAntisymmetry,
    SecondPairAntisymmetry,
    PairSymmetry,
    FirstBianchi,
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Identity::FirstPairAntisymmetry => "antisymmetry in the first index pair",
            Identity::SecondPairAntisymmetry => "antisymmetry in the second index pair",
            Identity::PairSymmetry => "pair symmetry",
            Identity::FirstBianchi => "the first Bianchi identity",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("curvature component {component} violates {identity} (residual {residual:e})")]
    Symmetry {
        identity: Identity,
        component: String,
        residual: f64,
    },
    #[error("curvature component {0} is not finite")]
    NonFinite(String),
    #[error("curvature is not vacuum: largest Ricci component {0:e}")]
    NotVacuum(f64),
    #[error("matrix {name} is not symmetric and traceless (residual {residual:e})")]
    NotSymmetricTraceless { name: &'static str, residual: f64 },
    #[error("direction has length {0}, expected 1")]
    NotUnit(f64),
    #[error("vector is not a unit tangent at the direction (x.t = {dot:e}, |t| = {norm})")]
    NotTangent { dot: f64, norm: f64 },
    #[error("grid degree {0} is below 2")]
    GridDegree(usize),
    #[error("monomial integrals are tabulated for 2, 4 or 6 indices, got {0}")]
    Arity(usize),
    #[error("spatial index {0} outside 1..=3")]
    SpatialIndex(usize),
    #[error("observer spatial part is not finite")]
    Observer,
    #[error("energy-momentum vector {components:?} is {class}, expected future timelike")]
    NotTimelike {
        components: [f64; 4],
        class: crate::tensor::CausalClass,
    },
    #[error("stress-energy tensor is not symmetric (residual {0:e})")]
    NotSymmetric(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
