//! Expansion coefficients of the data on the small spheres `Sigma_r` and the
//! curvature-derivative inputs they need.
//!
//! First derivatives `dW[m] = nabla_m W` are projected onto the 24-dimensional
//! space of Weyl-valued arrays obeying the second Bianchi identity. Second
//! derivatives use a flat model: symmetric in the two derivative slots,
//! Weyl-valued, and Bianchi in the inner slot (42 dimensions). `D` denotes the
//! derivative along `L`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, Matrix3, Vector3, Vector4};

use crate::calculus::{divergence, tensor_divergence};
use crate::error::Result;
use crate::field::{FieldKind, SphereField};
use crate::quadrature::{build_grid, integrate, SphereGrid};
use crate::sphere::{
    alpha_norm_sq_field, beta_norm_sq_field, decompose_tensor, frame_at, rho_field, w0_field, Direction,
    NullDecomposition,
};
use crate::tensor::{weyl_from_electric_magnetic, CurvatureAtPoint, ElectricMagneticParts, Rank4};

const RANK_TOL: f64 = 1e-10;

macro_rules! dense_array {
    ($name:ident, $len:expr, $doc:literal) => {
        #[doc = $doc]
        #[derive(Clone, PartialEq)]
        pub struct $name {
            data: Vec<f64>,
        }

        impl $name {
            pub const LEN: usize = $len;

            pub fn zeros() -> Self {
                Self { data: vec![0.0; $len] }
            }

            pub fn from_fn(f: impl FnMut(usize) -> f64) -> Self {
                Self {
                    data: (0..$len).map(f).collect(),
                }
            }

            pub fn from_vec(data: Vec<f64>) -> Option<Self> {
                (data.len() == $len).then_some(Self { data })
            }

            pub fn as_slice(&self) -> &[f64] {
                &self.data
            }

            pub fn max_abs(&self) -> f64 {
                self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
            }

            pub fn distance(&self, other: &Self) -> f64 {
                self.data
                    .iter()
                    .zip(&other.data)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            }

            pub fn add_scaled(&self, other: &Self, s: f64) -> Self {
                Self {
                    data: self.data.iter().zip(&other.data).map(|(a, b)| a + s * b).collect(),
                }
            }
        }

        impl std::fmt::Debug for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                write!(f, "{}(max |.| = {:e})", stringify!($name), self.max_abs())
            }
        }
    };
}

dense_array!(Rank5, 1024, "Components `nabla_m W_abcd`, index order `(m, a, b, c, d)`.");
dense_array!(Rank6, 4096, "Components `nabla_m nabla_n W_abcd`, index order `(m, n, a, b, c, d)`.");

#[inline]
fn i5(m: usize, a: usize, b: usize, c: usize, d: usize) -> usize {
    (((m * 4 + a) * 4 + b) * 4 + c) * 4 + d
}

#[inline]
fn i6(m: usize, n: usize, a: usize, b: usize, c: usize, d: usize) -> usize {
    m * 1024 + i5(n, a, b, c, d)
}

impl Rank5 {
    pub fn get(&self, m: usize, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.data[i5(m, a, b, c, d)]
    }

    pub fn set(&mut self, m: usize, a: usize, b: usize, c: usize, d: usize, v: f64) {
        self.data[i5(m, a, b, c, d)] = v;
    }

    /// `u^m nabla_m W`.
    pub fn along(&self, u: &Vector4<f64>) -> Rank4 {
        Rank4::from_fn(|a, b, c, d| (0..4).map(|m| u[m] * self.get(m, a, b, c, d)).sum())
    }

    /// Largest cyclic sum `nabla_e W_abcd + nabla_a W_becd + nabla_b W_eacd`.
    pub fn bianchi_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for e in 0..4 {
            for a in 0..4 {
                for b in 0..4 {
                    for c in 0..4 {
                        for d in 0..4 {
                            let s = self.get(e, a, b, c, d) + self.get(a, b, e, c, d) + self.get(b, e, a, c, d);
                            worst = worst.max(s.abs());
                        }
                    }
                }
            }
        }
        worst
    }
}

impl Rank6 {
    pub fn get(&self, m: usize, n: usize, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.data[i6(m, n, a, b, c, d)]
    }

    pub fn set(&mut self, m: usize, n: usize, a: usize, b: usize, c: usize, d: usize, v: f64) {
        self.data[i6(m, n, a, b, c, d)] = v;
    }

    /// `u^m u^n nabla_m nabla_n W`.
    pub fn along(&self, u: &Vector4<f64>) -> Rank4 {
        Rank4::from_fn(|a, b, c, d| {
            let mut s = 0.0;
            for m in 0..4 {
                for n in 0..4 {
                    s += u[m] * u[n] * self.get(m, n, a, b, c, d);
                }
            }
            s
        })
    }

    /// Largest Bianchi cyclic sum over the inner derivative slot.
    pub fn bianchi_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for m in 0..4 {
            for e in 0..4 {
                for a in 0..4 {
                    for b in 0..4 {
                        for c in 0..4 {
                            for d in 0..4 {
                                let s = self.get(m, e, a, b, c, d)
                                    + self.get(m, a, b, e, c, d)
                                    + self.get(m, b, e, a, c, d);
                                worst = worst.max(s.abs());
                            }
                        }
                    }
                }
            }
        }
        worst
    }
}

fn weyl_basis() -> Vec<Rank4> {
    let mut out = Vec::with_capacity(10);
    for magnetic in [false, true] {
        for k in 0..5 {
            let mut v = [0.0; 5];
            v[k] = 1.0;
            let m = Matrix3::new(v[0], v[1], v[2], v[1], v[3], v[4], v[2], v[4], -v[0] - v[3]);
            let parts = if magnetic {
                ElectricMagneticParts::new(Matrix3::zeros(), m)
            } else {
                ElectricMagneticParts::new(m, Matrix3::zeros())
            }
            .expect("basis element is symmetric traceless");
            out.push(weyl_from_electric_magnetic(&parts).expect("valid").riemann().clone());
        }
    }
    out
}

/// Orthonormal basis (as columns) of the image of `embed` restricted to the null
/// space of `constraint`.
fn constrained_basis(embed: &DMatrix<f64>, constraint: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = constraint.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested");
    let smax = svd.singular_values.max();
    let null: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= RANK_TOL * smax)
        .map(|(i, _)| v_t.row(i).transpose())
        .collect();
    let mut n = DMatrix::zeros(constraint.ncols(), null.len());
    for (j, v) in null.iter().enumerate() {
        n.set_column(j, v);
    }
    (embed * n).qr().q()
}

fn first_projector() -> &'static DMatrix<f64> {
    static Q: OnceLock<DMatrix<f64>> = OnceLock::new();
    Q.get_or_init(|| {
        let basis = weyl_basis();
        let mut embed = DMatrix::zeros(Rank5::LEN, 40);
        for m in 0..4 {
            for (k, w) in basis.iter().enumerate() {
                let col = m * 10 + k;
                for (j, v) in w.as_slice().iter().enumerate() {
                    embed[(m * 256 + j, col)] = *v;
                }
            }
        }
        let mut constraint = DMatrix::zeros(Rank5::LEN, 40);
        for col in 0..40 {
            let t = Rank5::from_fn(|i| embed[(i, col)]);
            for e in 0..4 {
                for a in 0..4 {
                    for b in 0..4 {
                        for c in 0..4 {
                            for d in 0..4 {
                                constraint[(i5(e, a, b, c, d), col)] =
                                    t.get(e, a, b, c, d) + t.get(a, b, e, c, d) + t.get(b, e, a, c, d);
                            }
                        }
                    }
                }
            }
        }
        constrained_basis(&embed, &constraint)
    })
}

fn second_projector() -> &'static DMatrix<f64> {
    static Q: OnceLock<DMatrix<f64>> = OnceLock::new();
    Q.get_or_init(|| {
        let basis = weyl_basis();
        let pairs: Vec<(usize, usize)> = (0..4).flat_map(|m| (m..4).map(move |n| (m, n))).collect();
        let cols = pairs.len() * 10;
        let mut embed = DMatrix::zeros(Rank6::LEN, cols);
        for (p, &(m, n)) in pairs.iter().enumerate() {
            for (k, w) in basis.iter().enumerate() {
                let col = p * 10 + k;
                for (j, v) in w.as_slice().iter().enumerate() {
                    embed[(m * 1024 + n * 256 + j, col)] = *v;
                    embed[(n * 1024 + m * 256 + j, col)] = *v;
                }
            }
        }
        let mut constraint = DMatrix::zeros(Rank6::LEN, cols);
        for col in 0..cols {
            let t = Rank6::from_fn(|i| embed[(i, col)]);
            for m in 0..4 {
                for e in 0..4 {
                    for a in 0..4 {
                        for b in 0..4 {
                            for c in 0..4 {
                                for d in 0..4 {
                                    constraint[(i6(m, e, a, b, c, d), col)] = t.get(m, e, a, b, c, d)
                                        + t.get(m, a, b, e, c, d)
                                        + t.get(m, b, e, a, c, d);
                                }
                            }
                        }
                    }
                }
            }
        }
        constrained_basis(&embed, &constraint)
    })
}

fn project(q: &DMatrix<f64>, raw: &[f64]) -> Vec<f64> {
    let x = DVector::from_column_slice(raw);
    let y = q * (q.transpose() * x);
    y.as_slice().to_vec()
}

/// Dimension of the space of valid first derivatives.
pub fn first_derivative_dimension() -> usize {
    first_projector().ncols()
}

/// Dimension of the space of valid second derivatives in the flat model.
pub fn second_derivative_dimension() -> usize {
    second_projector().ncols()
}

/// Curvature derivatives at the point; absent entries contribute zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CurvatureDerivatives {
    pub dw: Option<Rank5>,
    pub d2w: Option<Rank6>,
}

impl CurvatureDerivatives {
    pub fn none() -> Self {
        Self::default()
    }

    /// Wraps arrays without projecting them.
    pub fn unchecked(dw: Option<Rank5>, d2w: Option<Rank6>) -> Self {
        Self { dw, d2w }
    }

    /// Adds a second-derivative array after projecting it.
    pub fn with_second(mut self, raw: &Rank6) -> Self {
        self.d2w = Some(project_second_bianchi(raw));
        self
    }

    pub fn is_complete(&self) -> bool {
        self.dw.is_some() && self.d2w.is_some()
    }
}

/// Least-squares projection of an arbitrary rank-5 array onto Bianchi-valid vacuum first derivatives.
pub fn project_bianchi(raw: &Rank5) -> CurvatureDerivatives {
    let data = project(first_projector(), raw.as_slice());
    CurvatureDerivatives {
        dw: Some(Rank5 { data }),
        d2w: None,
    }
}

/// Least-squares projection of a rank-6 array onto the flat-model second derivatives.
pub fn project_second_bianchi(raw: &Rank6) -> Rank6 {
    Rank6 {
        data: project(second_projector(), raw.as_slice()),
    }
}

fn l_vector(x: &Direction) -> Vector4<f64> {
    let v = x.vector();
    Vector4::new(1.0, v[0], v[1], v[2])
}

fn first_decomposition(dw: &Rank5, x: &Direction) -> NullDecomposition {
    decompose_tensor(&dw.along(&l_vector(x)), &frame_at(x))
}

fn second_decomposition(d2w: &Rank6, x: &Direction) -> NullDecomposition {
    decompose_tensor(&d2w.along(&l_vector(x)), &frame_at(x))
}

fn derivative_field<T: crate::field::FieldValue>(
    d: &CurvatureDerivatives,
    second: bool,
    kind: FieldKind,
    f: impl Fn(&NullDecomposition) -> T + Send + Sync + 'static,
) -> SphereField<T> {
    match (second, d.dw.clone(), d.d2w.clone()) {
        (false, Some(dw), _) => SphereField::new(kind, move |x| f(&first_decomposition(&dw, x))),
        (true, _, Some(d2w)) => SphereField::new(kind, move |x| f(&second_decomposition(&d2w, x))),
        _ => SphereField::zero(kind),
    }
}

pub fn d_rho_field(d: &CurvatureDerivatives) -> SphereField<f64> {
    derivative_field(d, false, FieldKind::Scalar, |n| n.rho)
}

pub fn d_beta_field(d: &CurvatureDerivatives) -> SphereField<Vector3<f64>> {
    derivative_field(d, false, FieldKind::TangentVector, |n| n.beta_ambient())
}

pub fn d_alpha_field(d: &CurvatureDerivatives) -> SphereField<Matrix3<f64>> {
    derivative_field(d, false, FieldKind::TangentTensor, |n| n.alpha_ambient())
}

pub fn d2_rho_field(d: &CurvatureDerivatives) -> SphereField<f64> {
    derivative_field(d, true, FieldKind::Scalar, |n| n.rho)
}

pub fn d2_beta_field(d: &CurvatureDerivatives) -> SphereField<Vector3<f64>> {
    derivative_field(d, true, FieldKind::TangentVector, |n| n.beta_ambient())
}

pub fn d2_alpha_field(d: &CurvatureDerivatives) -> SphereField<Matrix3<f64>> {
    derivative_field(d, true, FieldKind::TangentTensor, |n| n.alpha_ambient())
}

/// Coefficients of the vacuum expansions in `r`.
///
/// `tr l = -2/r + r^3 trl3`, `tr n = 1/r + r trn1 + r^2 trn2 + r^3 trn3`,
/// `eta = r^2 eta2 + r^3 eta3 + r^4 eta4`, `|H| = 2/r + r h1 + r^2 h2 + r^3 h3`
/// and `|H0| = 2/r + r h0_1`.
#[derive(Debug, Clone)]
pub struct VacuumSeries {
    pub trl3: SphereField<f64>,
    pub trn1: SphereField<f64>,
    pub trn2: SphereField<f64>,
    pub trn3: SphereField<f64>,
    pub eta2: SphereField<Vector3<f64>>,
    pub eta3: SphereField<Vector3<f64>>,
    pub eta4: SphereField<Vector3<f64>>,
    pub h1: SphereField<f64>,
    pub h2: SphereField<f64>,
    pub h3: SphereField<f64>,
    pub h0_1: SphereField<f64>,
    /// Set when derivative input was missing, so `trn2`, `trn3`, `eta3`, `eta4`,
    /// `h2` and `h3` omit their derivative terms.
    pub partial: bool,
}

impl VacuumSeries {
    pub fn trl(&self, x: &Direction, r: f64) -> f64 {
        -2.0 / r + r.powi(3) * self.trl3.eval(x)
    }

    pub fn trn(&self, x: &Direction, r: f64) -> f64 {
        1.0 / r + r * self.trn1.eval(x) + r * r * self.trn2.eval(x) + r.powi(3) * self.trn3.eval(x)
    }

    pub fn mean_curvature(&self, x: &Direction, r: f64) -> f64 {
        2.0 / r + r * self.h1.eval(x) + r * r * self.h2.eval(x) + r.powi(3) * self.h3.eval(x)
    }

    pub fn eta(&self, x: &Direction, r: f64) -> Vector3<f64> {
        self.eta2.eval(x) * (r * r) + self.eta3.eval(x) * r.powi(3) + self.eta4.eval(x) * r.powi(4)
    }
}

pub fn vacuum_series(c: &CurvatureAtPoint, d: &CurvatureDerivatives) -> Result<VacuumSeries> {
    c.require_vacuum()?;
    let alpha2 = alpha_norm_sq_field(c)?;
    let beta2 = beta_norm_sq_field(c)?;
    let rho = rho_field(c)?;
    let d_rho = d_rho_field(d);
    let d2_rho = d2_rho_field(d);
    let w = c.riemann().clone();

    let trl3 = alpha2.scaled(1.0 / 45.0);
    let trn2 = d_rho.scaled(2.0 / 3.0);
    let trn3 = d2_rho
        .scaled(3.0 / 8.0)
        .sum(&alpha2.scaled(1.0 / 30.0))
        .sum(&beta2.scaled(-11.0 / 45.0));
    let w2 = w.clone();
    let eta2 = SphereField::new(FieldKind::TangentVector, move |x| {
        decompose_tensor(&w2, &frame_at(x)).beta_ambient() / 3.0
    });
    let eta3 = d_beta_field(d).scaled(0.25);
    let w3 = w.clone();
    let alpha_beta = SphereField::new(FieldKind::TangentVector, move |x| {
        let n = decompose_tensor(&w3, &frame_at(x));
        n.alpha_ambient() * n.beta_ambient()
    });
    let eta4 = d2_beta_field(d).scaled(0.1).sum(&alpha_beta.scaled(-1.0 / 45.0));
    let rho2 = rho.product(&rho);
    let h3 = trn3.sum(&alpha2.scaled(-1.0 / 90.0)).sum(&rho2.scaled(-0.25));
    Ok(VacuumSeries {
        trl3,
        trn1: rho.clone(),
        trn2: trn2.clone(),
        trn3,
        eta2,
        eta3,
        eta4,
        h1: rho,
        h2: trn2,
        h3,
        h0_1: w0_field(c)?.scaled(2.0),
        partial: !d.is_complete(),
    })
}

/// Quadratic polynomial `c + b.x + x^T A x` on R^3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadratic {
    pub a: Matrix3<f64>,
    pub b: Vector3<f64>,
    pub c: f64,
}

impl Quadratic {
    /// Recovers the coefficients of a function known to be a quadratic polynomial.
    pub fn fit(f: impl Fn(&Vector3<f64>) -> f64) -> Self {
        let c = f(&Vector3::zeros());
        let e = |i: usize| Vector3::ith(i, 1.0);
        let plus: [f64; 3] = std::array::from_fn(|i| f(&e(i)));
        let minus: [f64; 3] = std::array::from_fn(|i| f(&-e(i)));
        let b = Vector3::from_fn(|i, _| 0.5 * (plus[i] - minus[i]));
        let mut a = Matrix3::zeros();
        for i in 0..3 {
            a[(i, i)] = 0.5 * (plus[i] + minus[i]) - c;
            for j in 0..i {
                let v = 0.5 * (f(&(e(i) + e(j))) - f(&(e(i) - e(j))) - 2.0 * b[j]);
                a[(i, j)] = 0.5 * v;
                a[(j, i)] = 0.5 * v;
            }
        }
        Self { a, b, c }
    }

    pub fn eval(&self, x: &Vector3<f64>) -> f64 {
        self.c + self.b.dot(x) + x.dot(&(self.a * x))
    }

    /// Round Laplacian of the restriction to the unit sphere, term by homogeneous degree.
    pub fn sphere_laplacian(&self, x: &Vector3<f64>) -> f64 {
        2.0 * self.a.trace() - 6.0 * x.dot(&(self.a * x)) - 2.0 * self.b.dot(x)
    }
}

fn frame_vectors(x: &Vector3<f64>) -> (Vector4<f64>, Vector4<f64>) {
    (
        Vector4::new(1.0, x[0], x[1], x[2]),
        Vector4::new(0.5, -0.5 * x[0], -0.5 * x[1], -0.5 * x[2]),
    )
}

/// Leading coefficients of the non-vacuum data `(sigma, |H|^2, div alpha_H)`.
#[derive(Debug, Clone)]
pub struct NonVacuumData {
    /// `r^4` coefficient of the induced metric, `-Rbar_{LabL} / 3`.
    pub sigma4: SphereField<Matrix3<f64>>,
    /// `r^0` coefficient of `|H|^2`.
    pub h2sq: SphereField<f64>,
    /// Leading coefficient of `div alpha_H`.
    pub div_ah: SphereField<f64>,
}

pub fn nonvacuum_data(c: &CurvatureAtPoint) -> NonVacuumData {
    let r = c.riemann().clone();
    let ric = *c.ricci();
    let contractions = move |x: &Vector3<f64>| {
        let (l, lb) = frame_vectors(x);
        let rllll = r.contract(&l, &lb, &l, &lb);
        let ric_ll = l.dot(&(ric * l));
        let ric_llb = l.dot(&(ric * lb));
        (rllll, ric_ll, ric_llb)
    };
    let k = contractions.clone();
    let h2sq = SphereField::scalar(move |x| {
        let (rm, ll, llb) = k(x.vector());
        2.0 * rm + 4.0 / 3.0 * llb + ll / 3.0
    });
    let k = contractions.clone();
    let bracket = Quadratic::fit(move |x| {
        let (rm, ll, llb) = k(x);
        0.5 * rm + ll / 6.0 + llb / 3.0
    });
    let k = contractions;
    let div_ah = SphereField::scalar(move |x| {
        let v = x.vector();
        let (rm, ll, llb) = k(v);
        bracket.sphere_laplacian(v) - rm - llb / 3.0 - ll / 6.0
    });
    let r2 = c.riemann().clone();
    let sigma4 = SphereField::new(FieldKind::TangentTensor, move |x| {
        let (l, _) = frame_vectors(x.vector());
        let m = Matrix3::from_fn(|i, j| {
            r2.contract(&l, &Vector4::ith(i + 1, 1.0), &Vector4::ith(j + 1, 1.0), &l)
        });
        let p = x.projector();
        p * m * p * (-1.0 / 3.0)
    });
    NonVacuumData { sigma4, h2sq, div_ah }
}

/// Largest pointwise residuals of the divergence identities for `D` and `D^2` fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceReport {
    /// `div D beta - 4 D rho`
    pub d_beta: f64,
    /// `div D^2 beta - 5 D^2 rho`
    pub d2_beta: f64,
    /// `div D alpha - 5 D beta`
    pub d_alpha: f64,
    /// `div D^2 alpha - 6 D^2 beta`
    pub d2_alpha: f64,
}

impl DivergenceReport {
    pub fn max(&self) -> f64 {
        self.d_beta.max(self.d2_beta).max(self.d_alpha).max(self.d2_alpha)
    }
}

/// Divergence identities checked by finite differences at the nodes of a degree-6 grid.
pub fn d_divergence_check(c: &CurvatureAtPoint, d: &CurvatureDerivatives) -> Result<DivergenceReport> {
    c.require_vacuum()?;
    let grid = build_grid(6)?;
    let dirs: Vec<Direction> = grid.nodes().iter().map(|n| n.0).collect();
    Ok(d_divergence_check_at(d, &dirs))
}

pub fn d_divergence_check_at(d: &CurvatureDerivatives, dirs: &[Direction]) -> DivergenceReport {
    let (d_rho, d_beta, d_alpha) = (d_rho_field(d), d_beta_field(d), d_alpha_field(d));
    let (d2_rho, d2_beta, d2_alpha) = (d2_rho_field(d), d2_beta_field(d), d2_alpha_field(d));
    let mut report = DivergenceReport {
        d_beta: 0.0,
        d2_beta: 0.0,
        d_alpha: 0.0,
        d2_alpha: 0.0,
    };
    for x in dirs {
        report.d_beta = report.d_beta.max((divergence(&d_beta, x) - 4.0 * d_rho.eval(x)).abs());
        report.d2_beta = report.d2_beta.max((divergence(&d2_beta, x) - 5.0 * d2_rho.eval(x)).abs());
        report.d_alpha = report
            .d_alpha
            .max((tensor_divergence(&d_alpha, x) - d_beta.eval(x) * 5.0).amax());
        report.d2_alpha = report
            .d2_alpha
            .max((tensor_divergence(&d2_alpha, x) - d2_beta.eval(x) * 6.0).amax());
    }
    report
}

/// `int (k3 - h3) = -3/4 int W0^2 - 1/60 int |alpha|^2 + 11/45 int |beta|^2`.
pub fn k3_minus_h3_integral(c: &CurvatureAtPoint, grid: &SphereGrid) -> Result<f64> {
    let w0 = w0_field(c)?;
    let alpha2 = alpha_norm_sq_field(c)?;
    let beta2 = beta_norm_sq_field(c)?;
    let f = w0
        .product(&w0)
        .scaled(-0.75)
        .sum(&alpha2.scaled(-1.0 / 60.0))
        .sum(&beta2.scaled(11.0 / 45.0));
    Ok(integrate(&f, grid))
}

/// Closed form of the same combination, `-(2 pi / 15) sum D^2 + (11 pi / 450) sum Wbar_{ijk0}^2`,
/// assembled from the integrals of `W0^2` and `|beta|^2`.
pub fn k3_minus_h3_closed_form(c: &CurvatureAtPoint) -> Result<f64> {
    c.require_vacuum()?;
    let d2 = c.electric().norm_squared();
    let mut m2 = 0.0;
    for i in 1..4 {
        for j in 1..4 {
            for k in 1..4 {
                m2 += c.component(i, j, k, 0).powi(2);
            }
        }
    }
    let w0_sq = 8.0 * PI / 15.0 * d2;
    let beta_sq = 12.0 * PI / 15.0 * d2 + 6.0 * PI / 15.0 * m2;
    Ok(-0.75 * w0_sq + (-8.0 / 60.0 + 11.0 / 45.0) * beta_sq)
}
