//! Numerical self-checks grouped into suites.
//!
//! Each check compares a closed form against an independent evaluation
//! (quadrature, finite differences, brute-force contraction) over seeded random
//! curvature and reports the largest residual.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3, Vector4};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::calculus::{component_gradients, derivative_along, laplacian};
use crate::energy::{
    coefficients_closed_form, e5_closed_form, e5_from_pieces, e5_gradient, minimize, MinimizerStatus,
};
use crate::error::Result;
use crate::expansion::{
    d2_rho_field, d_divergence_check, d_rho_field, k3_minus_h3_closed_form, k3_minus_h3_integral, nonvacuum_data,
    project_bianchi, project_second_bianchi, vacuum_series,
};
use crate::field::SphereField;
use crate::nonvacuum::{momentum_closed_form, momentum_components};
use crate::observer::Observer;
use crate::quadrature::{build_grid, harmonic_basis, integrate, integrate_fn, monomial_integral, SphereGrid};
use crate::random::{
    random_curvature, random_direction, random_electric_magnetic, random_observer_a, random_rank5, random_rank6,
    random_vacuum,
};
use crate::sphere::{
    alpha_bar_field, alpha_field, alpha_norm_sq_field, aa3_field, beta_bar_field, beta_field, beta_norm_sq_field,
    epsilon, frame_at, null_decompose, p_vector_field, rho_field, sigma_field, w0_field, w_vector_field,
    xi3_vector_field, Direction,
};
use crate::tensor::{
    bel_robinson, electric_magnetic_from_weyl, minkowski, v_vector, weyl_from_electric_magnetic, CurvatureAtPoint,
    ElectricMagneticParts,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            pass: residual.is_finite() && residual <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Identities,
    Integrals,
    Expansion,
    Energy,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Identities, Suite::Integrals, Suite::Expansion, Suite::Energy];

    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Integrals => "integrals",
            Suite::Expansion => "expansion",
            Suite::Energy => "energy",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.as_str() == s)
            .ok_or_else(|| format!("unknown suite {s:?}, expected identities, integrals, expansion or energy"))
    }
}

pub fn run_suite(suite: Suite, seed: u64, grid: &SphereGrid) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match suite {
        Suite::Identities => identities(&mut rng),
        Suite::Integrals => integrals(&mut rng, grid),
        Suite::Expansion => expansion(&mut rng, grid),
        Suite::Energy => energy(&mut rng, grid),
    }
}

/// Names of the entries returned by [`weyl_derivative_residuals`].
pub const WEYL_DERIVATIVE_IDENTITIES: [&str; 16] = [
    "grad_alpha",
    "grad_alpha_bar",
    "grad_beta",
    "grad_beta_bar",
    "grad_rho",
    "grad_sigma",
    "div_alpha",
    "curl_alpha",
    "div_alpha_bar",
    "curl_alpha_bar",
    "div_beta",
    "curl_beta",
    "div_beta_bar",
    "curl_beta_bar",
    "grad_alpha_norm_sq",
    "laplacian_alpha_norm_sq",
];

/// Largest finite-difference residual of each first-derivative identity of the
/// null components at `x`, and of their traces and curls.
pub fn weyl_derivative_residuals(c: &CurvatureAtPoint, x: &Direction) -> Result<[f64; 16]> {
    let n = null_decompose(c, x)?;
    let frame = frame_at(x);
    let eps = epsilon();
    let g = Matrix2::<f64>::identity();
    let along = |a: usize| frame.t[a];

    let tensor_derivs = |f: &SphereField<Matrix3<f64>>| -> [Matrix2<f64>; 2] {
        std::array::from_fn(|c| frame.tensor_components(&derivative_along(f, x, &along(c))))
    };
    let vector_derivs = |f: &SphereField<Vector3<f64>>| -> Matrix2<f64> {
        // row a holds nabla_a of the field
        let rows: [Vector2<f64>; 2] = std::array::from_fn(|a| frame.vector_components(&derivative_along(f, x, &along(a))));
        Matrix2::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1])
    };
    let scalar_derivs = |f: &SphereField<f64>| -> Vector2<f64> {
        Vector2::new(derivative_along(f, x, &along(0)), derivative_along(f, x, &along(1)))
    };
    let k = |c: usize, a: usize, b: usize, d: usize| {
        g[(c, a)] * g[(b, d)] + g[(c, b)] * g[(a, d)] + eps[(c, a)] * eps[(b, d)] + eps[(c, b)] * eps[(a, d)]
    };

    let d_alpha = tensor_derivs(&alpha_field(c)?);
    let d_alpha_bar = tensor_derivs(&alpha_bar_field(c)?);
    let d_beta = vector_derivs(&beta_field(c)?);
    let d_beta_bar = vector_derivs(&beta_bar_field(c)?);
    let d_rho = scalar_derivs(&rho_field(c)?);
    let d_sigma = scalar_derivs(&sigma_field(c)?);
    let alpha2 = alpha_norm_sq_field(c)?;
    let d_alpha2 = scalar_derivs(&alpha2);

    let mut r = [0.0f64; 16];
    let mut bump = |i: usize, v: f64| r[i] = r[i].max(v.abs());
    for cc in 0..2 {
        for a in 0..2 {
            for b in 0..2 {
                let kb: f64 = (0..2).map(|d| k(cc, a, b, d) * n.beta[d]).sum();
                let kbb: f64 = (0..2).map(|d| k(cc, a, b, d) * n.beta_bar[d]).sum();
                bump(0, d_alpha[cc][(a, b)] - kb);
                bump(1, d_alpha_bar[cc][(a, b)] - 0.5 * kbb);
            }
        }
    }
    for a in 0..2 {
        for b in 0..2 {
            bump(2, d_beta[(a, b)] - (-0.75 * n.sigma * eps[(a, b)] + 1.5 * n.rho * g[(a, b)] - 0.5 * n.alpha[(a, b)]));
            bump(
                3,
                d_beta_bar[(a, b)] - (0.375 * n.sigma * eps[(a, b)] + 0.75 * n.rho * g[(a, b)] - n.alpha_bar[(a, b)]),
            );
        }
        bump(4, d_rho[a] + n.beta[a] + 2.0 * n.beta_bar[a]);
        let rhs: f64 = (0..2).map(|b| 2.0 * eps[(a, b)] * (n.beta[b] - 2.0 * n.beta_bar[b])).sum();
        bump(5, d_sigma[a] - rhs);
    }
    for b in 0..2 {
        let div_a: f64 = (0..2).map(|a| d_alpha[a][(a, b)]).sum();
        let div_ab: f64 = (0..2).map(|a| d_alpha_bar[a][(a, b)]).sum();
        let mut curl_a = 0.0;
        let mut curl_ab = 0.0;
        for cc in 0..2 {
            for a in 0..2 {
                curl_a += eps[(cc, a)] * d_alpha[cc][(a, b)];
                curl_ab += eps[(cc, a)] * d_alpha_bar[cc][(a, b)];
            }
        }
        let eb: f64 = (0..2).map(|d| eps[(b, d)] * n.beta[d]).sum();
        let ebb: f64 = (0..2).map(|d| eps[(b, d)] * n.beta_bar[d]).sum();
        bump(6, div_a - 4.0 * n.beta[b]);
        bump(7, curl_a - 4.0 * eb);
        bump(8, div_ab - 2.0 * n.beta_bar[b]);
        bump(9, curl_ab - 2.0 * ebb);
    }
    let div_b = d_beta.trace();
    let div_bb = d_beta_bar.trace();
    let curl_b = d_beta[(0, 1)] - d_beta[(1, 0)];
    let curl_bb = d_beta_bar[(0, 1)] - d_beta_bar[(1, 0)];
    bump(10, div_b - 3.0 * n.rho);
    bump(11, curl_b + 1.5 * n.sigma);
    bump(12, div_bb - 1.5 * n.rho);
    bump(13, curl_bb - 0.75 * n.sigma);
    let ab = n.alpha * n.beta;
    bump(14, (d_alpha2 - ab * 8.0).amax());
    bump(15, laplacian(&alpha2, x) - (32.0 * n.beta_norm_sq() - 4.0 * n.alpha_norm_sq()));
    Ok(r)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300).max(a.abs()).max(1.0)
}

fn identities(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut round_trip: f64 = 0.0;
    let mut traces: f64 = 0.0;
    let mut symmetry: f64 = 0.0;
    let mut contraction: f64 = 0.0;
    let mut causal: f64 = 0.0;
    for _ in 0..20 {
        let parts = random_electric_magnetic(rng);
        let c = weyl_from_electric_magnetic(&parts)?;
        let back = electric_magnetic_from_weyl(&c)?;
        round_trip = round_trip.max((back.d() - parts.d()).amax()).max((back.e() - parts.e()).amax());
        traces = traces.max(c.ricci().amax());
        let q = bel_robinson(&c)?;
        symmetry = symmetry.max(q.symmetry_defect() / q.q().max_abs().max(1e-300));
        let t0 = Observer::new(random_observer_a(rng, 2.0))?;
        let a = t0.a();
        let u = Vector4::new(t0.a0(), a[0], a[1], a[2]);
        let e0 = Vector4::new(1.0, 0.0, 0.0, 0.0);
        contraction = contraction.max(rel(crate::tensor::q_contract(&c, &t0)?, q.contract(&e0, &e0, &e0, &u)));
        let v = v_vector(&c)?;
        causal = causal.max(minkowski(&v.components, &v.components) / v.components[0].powi(2));
    }
    checks.push(Check::new("electric_magnetic_round_trip", round_trip, 1e-14));
    checks.push(Check::new("weyl_traces", traces, 1e-13));
    checks.push(Check::new("bel_robinson_symmetry", symmetry, 1e-12));
    checks.push(Check::new("bel_robinson_contraction", contraction, 1e-12));
    checks.push(Check::new("v_non_spacelike", causal.max(0.0), 1e-10));

    let mut worst = [0.0f64; 16];
    for _ in 0..5 {
        let c = random_vacuum(rng);
        for _ in 0..10 {
            let x = random_direction(rng);
            let r = weyl_derivative_residuals(&c, &x)?;
            for (w, v) in worst.iter_mut().zip(r) {
                *w = w.max(v);
            }
        }
    }
    for (name, r) in WEYL_DERIVATIVE_IDENTITIES.iter().zip(worst) {
        checks.push(Check::new(*name, r, 1e-6));
    }
    Ok(checks)
}

/// `max_g |int (Lap f + lambda f) g|` over the harmonic test set, in weak form.
pub fn weak_eigen_residual(f: &SphereField<f64>, lambda: f64, grid: &SphereGrid) -> f64 {
    harmonic_basis(4)
        .iter()
        .map(|h| (integrate_fn(grid, |x| f.eval(x) * h.eval(x)) * (h.eigenvalue() + lambda)).abs())
        .fold(0.0, f64::max)
}

fn all_index_tuples(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                (1..=3).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

/// Largest deviation of the monomial table from quadrature over all 2, 4 and 6 index tuples.
pub fn monomial_table_residual(grid: &SphereGrid) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for n in [2, 4, 6] {
        for t in all_index_tuples(n) {
            let q = integrate_fn(grid, |x| t.iter().map(|&i| x.vector()[i - 1]).product::<f64>());
            worst = worst.max((q - monomial_integral(&t)?).abs());
        }
    }
    Ok(worst)
}

fn integrals(rng: &mut ChaCha8Rng, grid: &SphereGrid) -> Result<Vec<Check>> {
    let mut checks = vec![Check::new("monomial_table", monomial_table_residual(grid)?, 1e-12)];
    let names = [
        "w0_squared",
        "w0_wi",
        "alpha_beta",
        "alpha_beta_first_moment",
        "beta_squared",
        "w0_squared_second_moment",
        "wp_inner",
        "aa3_norm",
        "eigen_rho",
        "eigen_sigma",
        "eigen_wi",
        "eigen_pk",
    ];
    let mut worst = [0.0f64; 12];
    for _ in 0..3 {
        let c = random_vacuum(rng);
        let d = c.electric();
        let d2 = d.norm_squared();
        let w0 = w0_field(&c)?;
        let wv = w_vector_field(&c)?;
        let pv = p_vector_field(&c)?;
        let alpha2 = alpha_norm_sq_field(&c)?;
        let beta2 = beta_norm_sq_field(&c)?;
        let scale = d2.max(1.0);
        let mut r = [0.0f64; 12];

        let w0sq = integrate(&w0.product(&w0), grid);
        r[0] = rel(w0sq, 8.0 * PI / 15.0 * d2);
        let w0w = integrate_fn(grid, |x| wv.eval(x) * w0.eval(x));
        let want = Vector3::from_fn(|i, _| {
            let mut s = 0.0;
            for j in 0..3 {
                for l in 0..3 {
                    s += d[(j, l)] * c.w0(l, i, j);
                }
            }
            8.0 * PI / 15.0 * s
        });
        r[1] = (w0w - want).amax() / scale;
        let ia = integrate(&alpha2, grid);
        let ib = integrate(&beta2, grid);
        r[2] = rel(ia, 8.0 * ib);
        let xa = integrate_fn(grid, |x| x.vector() * alpha2.eval(x));
        let xb = integrate_fn(grid, |x| x.vector() * beta2.eval(x));
        r[3] = (xa - xb * 16.0).amax() / ia.max(1.0);
        let mut m2 = 0.0;
        for i in 1..4 {
            for j in 1..4 {
                for k in 1..4 {
                    m2 += c.component(i, j, k, 0).powi(2);
                }
            }
        }
        r[4] = rel(ib, 12.0 * PI / 15.0 * d2 + 6.0 * PI / 15.0 * m2);
        let mom = integrate_fn(grid, |x| {
            let w = w0.eval(x);
            x.vector() * x.vector().transpose() * (w * w)
        });
        let want = (Matrix3::identity() * (2.0 * d2) + d.transpose() * d * 8.0) * (4.0 * PI / 105.0);
        r[5] = (mom - want).amax() / scale;
        let lhs = integrate_fn(grid, |x| component_gradients(&pv, x) * w0.eval(x));
        let rhs = integrate_fn(grid, |x| x.vector() * pv.eval(x).transpose() * (4.0 * w0.eval(x)));
        r[6] = (lhs - rhs).amax() / scale;
        let aa3 = aa3_field(&c)?;
        let aa = integrate_fn(grid, |x| aa3.eval(x).norm_squared());
        r[7] = rel(aa, 3.0 * w0sq);
        r[8] = weak_eigen_residual(&rho_field(&c)?, 6.0, grid) / scale;
        r[9] = weak_eigen_residual(&sigma_field(&c)?, 6.0, grid) / scale;
        r[10] = (0..3)
            .map(|i| weak_eigen_residual(&wv.component(i), 6.0, grid))
            .fold(0.0, f64::max)
            / scale;
        r[11] = (0..3)
            .map(|i| weak_eigen_residual(&pv.component(i), 12.0, grid))
            .fold(0.0, f64::max)
            / scale;
        for (w, v) in worst.iter_mut().zip(r) {
            *w = w.max(v);
        }
    }
    for (name, r) in names.iter().zip(worst) {
        checks.push(Check::new(*name, r, 1e-10));
    }
    Ok(checks)
}

fn expansion(rng: &mut ChaCha8Rng, grid: &SphereGrid) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let raw = random_rank5(rng);
    let d = project_bianchi(&raw).with_second(&random_rank6(rng));
    let dw = d.dw.clone().expect("projected");
    checks.push(Check::new("bianchi_residual", dw.bianchi_residual(), 1e-12));
    let again = project_bianchi(&dw).dw.expect("projected");
    checks.push(Check::new("projection_idempotent", again.distance(&dw), 1e-12));
    let d2w = d.d2w.clone().expect("projected");
    checks.push(Check::new(
        "second_projection_idempotent",
        project_second_bianchi(&d2w).distance(&d2w),
        1e-12,
    ));

    let c = random_vacuum(rng);
    checks.push(Check::new("d_divergence", d_divergence_check(&c, &d)?.max(), 1e-6));
    checks.push(Check::new("integral_d_rho", integrate(&d_rho_field(&d), grid).abs(), 1e-9));
    checks.push(Check::new("integral_d2_rho", integrate(&d2_rho_field(&d), grid).abs(), 1e-9));

    let series = vacuum_series(&c, &d)?;
    let w0 = w0_field(&c)?;
    let xi3 = xi3_vector_field(&c)?;
    let data = nonvacuum_data(&c);
    let mut trn1: f64 = 0.0;
    let mut h0: f64 = 0.0;
    let mut product: f64 = 0.0;
    let mut div_ah: f64 = 0.0;
    let mut embedding: f64 = 0.0;
    for _ in 0..20 {
        let x = random_direction(rng);
        let n = null_decompose(&c, &x)?;
        trn1 = trn1.max((series.trn1.eval(&x) - n.rho).abs());
        h0 = h0.max((series.h0_1.eval(&x) - 2.0 * w0.eval(&x)).abs());
        let h1 = series.h1.eval(&x);
        let p2 = 4.0 * series.trn3.eval(&x) - 2.0 * series.trl3.eval(&x);
        product = product
            .max((4.0 * series.trn1.eval(&x) - 4.0 * h1).abs())
            .max((p2 - 4.0 * series.h3.eval(&x) - h1 * h1).abs())
            .max((h1 - w0.eval(&x)).abs());
        div_ah = div_ah.max((data.div_ah.eval(&x) + 4.0 * w0.eval(&x)).abs());
        let frame = frame_at(&x);
        let dx: [Vector3<f64>; 2] = std::array::from_fn(|b| derivative_along(&xi3, &x, &frame.t[b]));
        for a in 0..2 {
            for b in 0..2 {
                let lhs = frame.t[a].dot(&dx[b]) + frame.t[b].dot(&dx[a]);
                embedding = embedding.max((lhs - n.alpha[(a, b)] / 3.0).abs());
            }
        }
    }
    checks.push(Check::new("trn1_equals_rho", trn1, 1e-13));
    checks.push(Check::new("h0_leading", h0, 1e-13));
    checks.push(Check::new("mean_curvature_product", product, 1e-12));
    checks.push(Check::new("vacuum_div_ah", div_ah, 1e-8));
    checks.push(Check::new("linearized_embedding", embedding, 1e-7));
    let q = k3_minus_h3_integral(&c, grid)?;
    checks.push(Check::new("k3_minus_h3", rel(q, k3_minus_h3_closed_form(&c)?), 1e-10));

    let mut momentum: f64 = 0.0;
    for _ in 0..5 {
        let c = random_curvature(rng);
        momentum = momentum.max((momentum_components(&c, grid) - momentum_closed_form(&c)).amax());
    }
    checks.push(Check::new("momentum_quadrature", momentum, 1e-9));
    Ok(checks)
}

fn energy(rng: &mut ChaCha8Rng, grid: &SphereGrid) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut dual: f64 = 0.0;
    let mut negative: f64 = 0.0;
    let mut gradient: f64 = 0.0;
    for _ in 0..20 {
        let c = random_vacuum(rng);
        let t0 = Observer::new(random_observer_a(rng, 2.0))?;
        let e = e5_closed_form(&c, &t0)?;
        dual = dual.max(rel(e, coefficients_closed_form(&c)?.e5(&t0)));
        negative = negative.max(-e);
        let g = e5_gradient(&c, &t0.a())?;
        let h = 1e-5;
        for i in 0..3 {
            let step = Vector3::ith(i, h);
            let up = e5_closed_form(&c, &Observer::new(t0.a() + step)?)?;
            let down = e5_closed_form(&c, &Observer::new(t0.a() - step)?)?;
            gradient = gradient.max(((up - down) / (2.0 * h) - g[i]).abs());
        }
    }
    checks.push(Check::new("dual_representation", dual, 1e-12));
    checks.push(Check::new("non_negative", negative.max(0.0), 0.0));
    checks.push(Check::new("gradient_fd", gradient, 1e-8));

    let mut pieces: f64 = 0.0;
    for _ in 0..3 {
        let c = random_vacuum(rng);
        let t0 = Observer::new(random_observer_a(rng, 1.0))?;
        pieces = pieces.max(rel(e5_from_pieces(&c, &t0, grid)?, e5_closed_form(&c, &t0)?));
    }
    checks.push(Check::new("three_piece_assembly", pieces, 1e-8));

    let mut grad_norm: f64 = 0.0;
    let mut hess: f64 = f64::INFINITY;
    let mut rise: f64 = f64::INFINITY;
    for _ in 0..5 {
        let c = random_vacuum(rng);
        let m = minimize(&c)?;
        grad_norm = grad_norm.max(m.gradient_norm);
        hess = hess.min(m.hessian_min_eigenvalue);
        for _ in 0..10 {
            let delta = random_direction(rng).vector() * 0.1;
            rise = rise.min(e5_closed_form(&c, &Observer::new(m.a_bar + delta)?)? - m.e5_min);
        }
    }
    checks.push(Check::new("minimizer_gradient", grad_norm, 1e-10));
    let mut pd = Check::new("minimizer_hessian_positive", (-hess).max(0.0), 0.0);
    pd.pass = hess > 0.0;
    checks.push(pd);
    let mut up = Check::new("minimizer_perturbations_increase", (-rise).max(0.0), 0.0);
    up.pass = rise > 0.0;
    checks.push(up);

    let electric = weyl_from_electric_magnetic(&ElectricMagneticParts::new(
        Matrix3::from_diagonal(&Vector3::new(2.0, -1.0, -1.0)),
        Matrix3::zeros(),
    )?)?;
    let rest = Observer::rest();
    checks.push(Check::new(
        "worked_number",
        (e5_closed_form(&electric, &rest)? - 0.1).abs(),
        1e-12,
    ));
    checks.push(Check::new(
        "worked_number_pieces",
        (e5_from_pieces(&electric, &rest, grid)? - 0.1).abs() / 0.1,
        1e-8,
    ));
    let mut e = Matrix3::zeros();
    e[(1, 2)] = 1.0;
    e[(2, 1)] = 1.0;
    let null = weyl_from_electric_magnetic(&ElectricMagneticParts::new(
        Matrix3::from_diagonal(&Vector3::new(0.0, 1.0, -1.0)),
        e,
    )?)?;
    let status = minimize(&null)?.status;
    let mut nv = Check::new("null_v_status", 0.0, 0.0);
    nv.pass = status == MinimizerStatus::NullVNoMinimum;
    nv.residual = if nv.pass { 0.0 } else { 1.0 };
    checks.push(nv);
    Ok(checks)
}

/// Runs every suite on a grid of the given degree.
pub fn run_all(seed: u64, degree: usize) -> Result<Vec<(Suite, Vec<Check>)>> {
    let grid = build_grid(degree)?;
    Suite::ALL
        .into_iter()
        .map(|s| Ok((s, run_suite(s, seed, &grid)?)))
        .collect()
}
