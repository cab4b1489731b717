//! Random curvature data for property checks and the verification suites.

use nalgebra::{Matrix3, Matrix4, Vector3};
use rand::Rng;

use crate::expansion::{Rank5, Rank6};
use crate::sphere::Direction;
use crate::tensor::{
    curvature_from_weyl_and_ricci, weyl_from_electric_magnetic, CurvatureAtPoint, ElectricMagneticParts,
};

pub fn random_symmetric_traceless<R: Rng + ?Sized>(rng: &mut R) -> Matrix3<f64> {
    let v: [f64; 5] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    Matrix3::new(v[0], v[1], v[2], v[1], v[3], v[4], v[2], v[4], -v[0] - v[3])
}

pub fn random_electric_magnetic<R: Rng + ?Sized>(rng: &mut R) -> ElectricMagneticParts {
    let d = random_symmetric_traceless(rng);
    let e = random_symmetric_traceless(rng);
    ElectricMagneticParts::new(d, e).expect("symmetric traceless by construction")
}

pub fn random_vacuum<R: Rng + ?Sized>(rng: &mut R) -> CurvatureAtPoint {
    weyl_from_electric_magnetic(&random_electric_magnetic(rng)).expect("valid parts")
}

pub fn random_ricci<R: Rng + ?Sized>(rng: &mut R) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    for i in 0..4 {
        for j in i..4 {
            let v = rng.random_range(-1.0..1.0);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Random Weyl part plus random Ricci part.
pub fn random_curvature<R: Rng + ?Sized>(rng: &mut R) -> CurvatureAtPoint {
    let w = random_vacuum(rng);
    let ric = random_ricci(rng);
    curvature_from_weyl_and_ricci(w.riemann(), &ric).expect("valid by construction")
}

pub fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> Direction {
    loop {
        let v = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return Direction::from_vector(v).expect("nonzero");
        }
    }
}

/// Random unit vector tangent to the sphere at `x`.
pub fn random_tangent<R: Rng + ?Sized>(rng: &mut R, x: &Direction) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let t = v - x.vector() * x.vector().dot(&v);
        if t.norm() > 0.1 {
            return t.normalize();
        }
    }
}

pub fn random_observer_a<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> Vector3<f64> {
    Vector3::new(
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
    )
}

pub fn random_rank5<R: Rng + ?Sized>(rng: &mut R) -> Rank5 {
    Rank5::from_fn(|_| rng.random_range(-1.0..1.0))
}

pub fn random_rank6<R: Rng + ?Sized>(rng: &mut R) -> Rank6 {
    Rank6::from_fn(|_| rng.random_range(-1.0..1.0))
}
