//! Null frame along the sphere of directions and the curvature fields built on it.
//!
//! At a unit direction `x` the frame is `L = (1, x)`, `Lbar = (1, -x) / 2` and
//! `e_a = (0, t_a)`, where `(t_1, t_2, x)` is a right-handed orthonormal triple.
//! The area form is `eps_12 = +1` in that basis, i.e. the outward orientation.
//! Tangent tensors are carried in Cartesian form (`sum T_ab t_a t_b^T`), so they
//! do not depend on the basis choice.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3, Vector4};

use crate::error::{Error, Result};
use crate::field::{FieldKind, SphereField};
use crate::observer::Observer;
use crate::tensor::{CurvatureAtPoint, Rank4};

const UNIT_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    x: Vector3<f64>,
}

impl Direction {
    pub fn new(x: Vector3<f64>) -> Result<Self> {
        let n = x.norm();
        if !n.is_finite() || (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnit(n));
        }
        Ok(Self { x })
    }

    /// Normalizes a nonzero vector.
    pub fn from_vector(v: Vector3<f64>) -> Result<Self> {
        let n = v.norm();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::NotUnit(n));
        }
        Ok(Self { x: v / n })
    }

    pub fn north() -> Self {
        Self { x: Vector3::z() }
    }

    pub fn south() -> Self {
        Self { x: -Vector3::z() }
    }

    pub fn vector(&self) -> &Vector3<f64> {
        &self.x
    }

    /// Projector `I - x x^T` onto the tangent plane.
    pub fn projector(&self) -> Matrix3<f64> {
        Matrix3::identity() - self.x * self.x.transpose()
    }
}

/// Rule for picking the tangent basis at each direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TangentGauge {
    /// Transport `(1,0,0), (0,1,0)` from the north pole along the shortest great circle.
    #[default]
    NorthPole,
    /// Transport `(1,0,0), (0,-1,0)` from the south pole along the shortest great circle.
    SouthPole,
}

fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v[2], v[1], v[2], 0.0, -v[0], -v[1], v[0], 0.0)
}

fn tangent_basis(x: &Vector3<f64>, gauge: TangentGauge) -> [Vector3<f64>; 2] {
    let (pole, first) = match gauge {
        TangentGauge::NorthPole => (Vector3::z(), Vector3::x()),
        TangentGauge::SouthPole => (-Vector3::z(), Vector3::x()),
    };
    let v = pole.cross(x);
    let s2 = v.norm_squared();
    let c = pole.dot(x);
    let t1 = if s2 == 0.0 {
        if c > 0.0 {
            first
        } else {
            // antipode: rotation by pi about the second basis direction
            -first
        }
    } else {
        // 1/(1+c) written as (1-c)/|v|^2 stays accurate near the antipode
        let k = skew(&v);
        let r = Matrix3::identity() + k + k * k * ((1.0 - c) / s2);
        r * first
    };
    let t1 = (t1 - x * x.dot(&t1)).normalize();
    let t2 = x.cross(&t1);
    [t1, t2]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullFrame {
    pub x: Direction,
    pub l: Vector4<f64>,
    pub lbar: Vector4<f64>,
    pub e: [Vector4<f64>; 2],
    pub t: [Vector3<f64>; 2],
}

impl NullFrame {
    /// Cartesian form of the tangent covector/vector with basis components `v`.
    pub fn ambient_vector(&self, v: &Vector2<f64>) -> Vector3<f64> {
        self.t[0] * v[0] + self.t[1] * v[1]
    }

    pub fn ambient_tensor(&self, m: &Matrix2<f64>) -> Matrix3<f64> {
        let mut out = Matrix3::zeros();
        for a in 0..2 {
            for b in 0..2 {
                out += self.t[a] * self.t[b].transpose() * m[(a, b)];
            }
        }
        out
    }

    pub fn vector_components(&self, v: &Vector3<f64>) -> Vector2<f64> {
        Vector2::new(self.t[0].dot(v), self.t[1].dot(v))
    }

    pub fn tensor_components(&self, m: &Matrix3<f64>) -> Matrix2<f64> {
        Matrix2::from_fn(|a, b| self.t[a].dot(&(m * self.t[b])))
    }
}

fn spatial(v: &Vector3<f64>) -> Vector4<f64> {
    Vector4::new(0.0, v[0], v[1], v[2])
}

pub fn frame_at(x: &Direction) -> NullFrame {
    frame_at_with(x, TangentGauge::NorthPole)
}

pub fn frame_at_with(x: &Direction, gauge: TangentGauge) -> NullFrame {
    let v = x.vector();
    let t = tangent_basis(v, gauge);
    NullFrame {
        x: *x,
        l: Vector4::new(1.0, v[0], v[1], v[2]),
        lbar: Vector4::new(0.5, -0.5 * v[0], -0.5 * v[1], -0.5 * v[2]),
        e: [spatial(&t[0]), spatial(&t[1])],
        t,
    }
}

/// Area form on the tangent plane in basis components.
pub fn epsilon() -> Matrix2<f64> {
    Matrix2::new(0.0, 1.0, -1.0, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullDecomposition {
    pub alpha: Matrix2<f64>,
    pub alpha_bar: Matrix2<f64>,
    pub beta: Vector2<f64>,
    pub beta_bar: Vector2<f64>,
    pub rho: f64,
    pub sigma: f64,
    pub frame: NullFrame,
}

impl NullDecomposition {
    pub fn alpha_ambient(&self) -> Matrix3<f64> {
        self.frame.ambient_tensor(&self.alpha)
    }

    pub fn alpha_bar_ambient(&self) -> Matrix3<f64> {
        self.frame.ambient_tensor(&self.alpha_bar)
    }

    pub fn beta_ambient(&self) -> Vector3<f64> {
        self.frame.ambient_vector(&self.beta)
    }

    pub fn beta_bar_ambient(&self) -> Vector3<f64> {
        self.frame.ambient_vector(&self.beta_bar)
    }

    pub fn alpha_norm_sq(&self) -> f64 {
        self.alpha.norm_squared()
    }

    pub fn beta_norm_sq(&self) -> f64 {
        self.beta.norm_squared()
    }
}

/// Null components of an arbitrary 4-tensor in the given frame.
pub(crate) fn decompose_tensor(w: &Rank4, frame: &NullFrame) -> NullDecomposition {
    let (l, lb, e) = (&frame.l, &frame.lbar, &frame.e);
    let alpha = Matrix2::from_fn(|a, b| w.contract(&e[a], l, &e[b], l));
    let alpha_bar = Matrix2::from_fn(|a, b| w.contract(&e[a], lb, &e[b], lb));
    let beta = Vector2::from_fn(|a, _| w.contract(&e[a], l, lb, l));
    let beta_bar = Vector2::from_fn(|a, _| w.contract(&e[a], lb, lb, l));
    let rho = w.contract(lb, l, lb, l);
    let sigma = w.contract(&e[0], &e[1], lb, l) - w.contract(&e[1], &e[0], lb, l);
    NullDecomposition {
        alpha,
        alpha_bar,
        beta,
        beta_bar,
        rho,
        sigma,
        frame: *frame,
    }
}

pub fn null_decompose(c: &CurvatureAtPoint, x: &Direction) -> Result<NullDecomposition> {
    null_decompose_with(c, x, TangentGauge::NorthPole)
}

pub fn null_decompose_with(c: &CurvatureAtPoint, x: &Direction, gauge: TangentGauge) -> Result<NullDecomposition> {
    c.require_vacuum()?;
    Ok(decompose_tensor(c.riemann(), &frame_at_with(x, gauge)))
}

fn vacuum_clone(c: &CurvatureAtPoint) -> Result<CurvatureAtPoint> {
    c.require_vacuum()?;
    Ok(c.clone())
}

fn decomposition_field<T: crate::field::FieldValue>(
    c: &CurvatureAtPoint,
    kind: FieldKind,
    f: impl Fn(&NullDecomposition) -> T + Send + Sync + 'static,
) -> Result<SphereField<T>> {
    let c = vacuum_clone(c)?;
    Ok(SphereField::new(kind, move |x| {
        f(&decompose_tensor(c.riemann(), &frame_at(x)))
    }))
}

pub fn rho_field(c: &CurvatureAtPoint) -> Result<SphereField<f64>> {
    decomposition_field(c, FieldKind::Scalar, |n| n.rho)
}

pub fn sigma_field(c: &CurvatureAtPoint) -> Result<SphereField<f64>> {
    decomposition_field(c, FieldKind::Scalar, |n| n.sigma)
}

pub fn alpha_field(c: &CurvatureAtPoint) -> Result<SphereField<Matrix3<f64>>> {
    decomposition_field(c, FieldKind::TangentTensor, |n| n.alpha_ambient())
}

pub fn alpha_bar_field(c: &CurvatureAtPoint) -> Result<SphereField<Matrix3<f64>>> {
    decomposition_field(c, FieldKind::TangentTensor, |n| n.alpha_bar_ambient())
}

pub fn beta_field(c: &CurvatureAtPoint) -> Result<SphereField<Vector3<f64>>> {
    decomposition_field(c, FieldKind::TangentVector, |n| n.beta_ambient())
}

pub fn beta_bar_field(c: &CurvatureAtPoint) -> Result<SphereField<Vector3<f64>>> {
    decomposition_field(c, FieldKind::TangentVector, |n| n.beta_bar_ambient())
}

pub fn alpha_norm_sq_field(c: &CurvatureAtPoint) -> Result<SphereField<f64>> {
    decomposition_field(c, FieldKind::Scalar, |n| n.alpha_norm_sq())
}

pub fn beta_norm_sq_field(c: &CurvatureAtPoint) -> Result<SphereField<f64>> {
    decomposition_field(c, FieldKind::Scalar, |n| n.beta_norm_sq())
}

/// `W_0 = x^T D x`.
pub fn w0_field(c: &CurvatureAtPoint) -> Result<SphereField<f64>> {
    let d = vacuum_clone(c)?.electric();
    Ok(SphereField::scalar(move |x| {
        let v = x.vector();
        v.dot(&(d * v))
    }))
}

/// `W_i = x^j x^k Wbar_{0kij}` for all three `i` at once.
pub fn w_vector_field(c: &CurvatureAtPoint) -> Result<SphereField<Vector3<f64>>> {
    let c = vacuum_clone(c)?;
    Ok(SphereField::new(FieldKind::Components, move |x| w_closed(&c, x.vector())))
}

fn w_closed(c: &CurvatureAtPoint, x: &Vector3<f64>) -> Vector3<f64> {
    Vector3::from_fn(|i, _| {
        let mut s = 0.0;
        for j in 0..3 {
            for k in 0..3 {
                s += x[j] * x[k] * c.w0(k, i, j);
            }
        }
        s
    })
}

fn check_index(i: usize) -> Result<usize> {
    if (1..=3).contains(&i) {
        Ok(i - 1)
    } else {
        Err(Error::SpatialIndex(i))
    }
}

/// `W_i` for a spatial index `i` in `1..=3`.
pub fn wi_field(c: &CurvatureAtPoint, i: usize) -> Result<SphereField<f64>> {
    let i = check_index(i)?;
    Ok(w_vector_field(c)?.component(i))
}

fn p_closed(d: &Matrix3<f64>, x: &Vector3<f64>) -> Vector3<f64> {
    let w0 = x.dot(&(d * x));
    d * x / 15.0 - x * (w0 / 6.0)
}

/// `P_k = (D x)_k / 15 - W_0 x_k / 6` for all `k`.
pub fn p_vector_field(c: &CurvatureAtPoint) -> Result<SphereField<Vector3<f64>>> {
    let d = vacuum_clone(c)?.electric();
    Ok(SphereField::new(FieldKind::Components, move |x| p_closed(&d, x.vector())))
}

pub fn pk_field(c: &CurvatureAtPoint, k: usize) -> Result<SphereField<f64>> {
    let k = check_index(k)?;
    Ok(p_vector_field(c)?.component(k))
}

fn r_closed(c: &CurvatureAtPoint, x: &Vector3<f64>) -> Matrix3<f64> {
    let d = c.electric();
    let dx = d * x;
    let w0 = x.dot(&dx);
    let w = w_closed(c, x);
    let m = Matrix3::from_fn(|i, j| {
        (0..3)
            .map(|n| x[n] * (c.w0(i, j, n) + c.w0(j, i, n)))
            .sum::<f64>()
    });
    (x * dx.transpose() * 2.0 + dx * x.transpose() * 2.0
        - x * w.transpose()
        - w * x.transpose()
        - d * 2.0
        - Matrix3::identity() * w0
        - x * x.transpose() * w0
        + m)
        / 3.0
}

fn s_closed(c: &CurvatureAtPoint, x: &Vector3<f64>) -> Vector3<f64> {
    let d = c.electric();
    let w0 = x.dot(&(d * x));
    (d * x * -4.0 + x * (4.0 * w0) + w_closed(c, x) * 4.0) / 3.0
}

/// Closed forms of `R_ij` and `S_j` as polynomials in `x`.
pub fn rij_sj_fields(c: &CurvatureAtPoint) -> Result<(SphereField<Matrix3<f64>>, SphereField<Vector3<f64>>)> {
    let c = vacuum_clone(c)?;
    let c2 = c.clone();
    Ok((
        SphereField::new(FieldKind::Components, move |x| r_closed(&c, x.vector())),
        SphereField::new(FieldKind::Components, move |x| s_closed(&c2, x.vector())),
    ))
}

/// `R_ij = -alpha^{ab} X^i_a X^j_b / 3` evaluated from the null decomposition.
pub fn rij_definition_field(c: &CurvatureAtPoint) -> Result<SphereField<Matrix3<f64>>> {
    decomposition_field(c, FieldKind::Components, |n| n.alpha_ambient() * (-1.0 / 3.0))
}

/// `S_j = sigma^{ab} gamma^{(2)c}_ab X^j_c = (4/3) beta^c X^j_c`.
pub fn sj_definition_field(c: &CurvatureAtPoint) -> Result<SphereField<Vector3<f64>>> {
    decomposition_field(c, FieldKind::Components, |n| n.beta_ambient() * (4.0 / 3.0))
}

/// `X_0^(3) = -W_0 / 3 + (a^i / a^0) P_i`.
pub fn x0_3(c: &CurvatureAtPoint, t0: &Observer) -> Result<SphereField<f64>> {
    let d = vacuum_clone(c)?.electric();
    let ratio = t0.a() / t0.a0();
    Ok(SphereField::scalar(move |x| {
        let v = x.vector();
        -v.dot(&(d * v)) / 3.0 + ratio.dot(&p_closed(&d, v))
    }))
}

/// `X_i^(3) = -beta^c X^i_c / 3 + rho x_i / 2` for all `i`.
pub fn xi3_vector_field(c: &CurvatureAtPoint) -> Result<SphereField<Vector3<f64>>> {
    decomposition_field(c, FieldKind::Components, |n| {
        n.beta_ambient() * (-1.0 / 3.0) + n.frame.x.vector() * (0.5 * n.rho)
    })
}

pub fn xi_3(c: &CurvatureAtPoint, i: usize) -> Result<SphereField<f64>> {
    let i = check_index(i)?;
    Ok(xi3_vector_field(c)?.component(i))
}

/// Polynomial form `D x / 3 - W / 3 + W_0 x / 6` of `X_i^(3)`.
pub fn xi3_closed_field(c: &CurvatureAtPoint) -> Result<SphereField<Vector3<f64>>> {
    let c = vacuum_clone(c)?;
    Ok(SphereField::new(FieldKind::Components, move |x| {
        let v = x.vector();
        let d = c.electric();
        let w0 = v.dot(&(d * v));
        d * v / 3.0 - w_closed(&c, v) / 3.0 + v * (w0 / 6.0)
    }))
}

/// Traceless second fundamental form coefficient at third order.
pub fn aa3_field(c: &CurvatureAtPoint) -> Result<SphereField<Matrix3<f64>>> {
    let d = vacuum_clone(c)?.electric();
    Ok(SphereField::new(FieldKind::TangentTensor, move |x| {
        let v = x.vector();
        let w0 = v.dot(&(d * v));
        let p = x.projector();
        p * (Matrix3::identity() * (-0.5 * w0) - d) * p
    }))
}
