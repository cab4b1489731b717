use std::str::FromStr;

use nalgebra::Vector3;

use smallsphere::energy::{coefficients_closed_form, e5_closed_form, energy_pieces, minimize, MinimizerStatus};
use smallsphere::expansion::{d_divergence_check, project_bianchi};
use smallsphere::nonvacuum::{
    limit_energy, min_energy_over_observers, momentum_closed_form, momentum_components, stress_from_curvature,
};
use smallsphere::observer::Observer;
use smallsphere::quadrature::build_grid;
use smallsphere::tensor::{
    curvature_from_weyl_and_ricci, electric_magnetic_from_weyl, minkowski, v_vector, validate_riemann,
    weyl_from_electric_magnetic, CurvatureAtPoint, Rank4,
};
use smallsphere::verify::{run_suite, Check, Suite};

use crate::input::{InputDocument, Source};
use crate::report::Report;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Decompose,
    Energy,
    Minimize,
    Nonvacuum,
    Verify,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Decompose => "decompose",
            Command::Energy => "energy",
            Command::Minimize => "minimize",
            Command::Nonvacuum => "nonvacuum",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub observer: Option<Vector3<f64>>,
    pub grid_degree: Option<usize>,
    pub suite: Option<String>,
    pub seed: u64,
}

pub fn run(command: Command, doc: Option<&InputDocument>, settings: &Settings) -> Result<Report, CliError> {
    let mut report = Report::new(command.as_str(), doc.map(|d| d.digest.clone()));
    if command == Command::Verify {
        verify(&mut report, doc, settings)?;
        return Ok(report);
    }
    let doc = doc.ok_or_else(|| CliError::Input(format!("{} needs --input", command.as_str())))?;
    let c = doc.curvature()?;
    let grid_degree = settings.grid_degree.or(doc.options.grid_degree).unwrap_or(12);
    let a = settings.observer.or(doc.options.observer).unwrap_or_else(Vector3::zeros);
    let observer = Observer::new(a)?;
    match command {
        Command::Decompose => decompose(&mut report, doc, &c)?,
        Command::Energy => energy(&mut report, &c, &observer, grid_degree)?,
        Command::Minimize => minimizer(&mut report, &c)?,
        Command::Nonvacuum => nonvacuum(&mut report, doc, &c, &observer, grid_degree)?,
        Command::Verify => unreachable!(),
    }
    Ok(report)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Weyl part `R - (Ricci part)` of a curvature tensor.
fn weyl_part(c: &CurvatureAtPoint) -> Result<CurvatureAtPoint, CliError> {
    let ricci_part = curvature_from_weyl_and_ricci(&Rank4::zeros(), c.ricci())?;
    let w = Rank4::from_fn(|a, b, cc, d| c.component(a, b, cc, d) - ricci_part.component(a, b, cc, d));
    Ok(validate_riemann(&w)?)
}

fn decompose(report: &mut Report, doc: &InputDocument, c: &CurvatureAtPoint) -> Result<(), CliError> {
    let w = if c.is_vacuum() { c.clone() } else { weyl_part(c)? };
    let parts = electric_magnetic_from_weyl(&w)?;
    report.put("vacuum", c.is_vacuum());
    report.put("D", *parts.d());
    report.put("E", *parts.e());
    let v = v_vector(&w)?;
    report.put("V", v.components);
    report.put("V_norm_squared", minkowski(&v.components, &v.components));
    report.put("V_class", v.class.as_str());
    report.put("ricci", *c.ricci());
    report.put("scalar_curvature", c.scalar_curvature());
    let rebuilt = weyl_from_electric_magnetic(&parts)?;
    let defect = Rank4::from_fn(|a, b, cc, d| rebuilt.component(a, b, cc, d) - w.component(a, b, cc, d)).max_abs();
    report.check(Check::new(
        "weyl_round_trip",
        defect / w.riemann().max_abs().max(1.0),
        1e-13,
    ));
    if let Some(raw) = &doc.dweyl {
        let projected = project_bianchi(raw);
        let dw = projected.dw.as_ref().expect("projection sets dw");
        report.put("dweyl_raw_bianchi_residual", raw.bianchi_residual());
        report.put("dweyl_projection_distance", raw.distance(dw));
        let scale = raw.max_abs().max(1.0);
        report.check(Check::new("dweyl_projected_bianchi", dw.bianchi_residual() / scale, 1e-10));
        if c.is_vacuum() {
            let div = d_divergence_check(c, &projected)?;
            report.check(Check::new("dweyl_divergence_identities", div.max() / scale, 1e-6));
        }
    }
    if let Source::WeylEm(given) = &doc.source {
        let diff = (parts.d() - given.d()).amax().max((parts.e() - given.e()).amax());
        report.check(Check::new("electric_magnetic_round_trip", diff, 1e-13 * given.d().amax().max(1.0)));
    }
    Ok(())
}

fn energy(report: &mut Report, c: &CurvatureAtPoint, t0: &Observer, degree: usize) -> Result<(), CliError> {
    c.require_vacuum()?;
    let grid = build_grid(degree)?;
    let coeff = coefficients_closed_form(c)?;
    let closed = e5_closed_form(c, t0)?;
    let dual = coeff.e5(t0);
    let pieces = energy_pieces(c, t0, &grid)?;
    report.put("observer_a", t0.a());
    report.put("observer_a0", t0.a0());
    report.put("grid_degree", degree);
    report.put("A0", coeff.a0);
    report.put("A_i", coeff.ai);
    report.put("A_ij", coeff.aij);
    report.put("e5_bel_robinson", closed);
    report.put("e5_coefficients", dual);
    report.put("energy_component", pieces.energy_component);
    report.put("reference_hamiltonian", pieces.reference_hamiltonian);
    report.put("physical_hamiltonian", pieces.physical_hamiltonian);
    report.put("e5_pieces", pieces.e5());
    report.check(Check::new("dual_representation", rel(closed, dual), 1e-12));
    report.check(Check::new("three_piece_assembly", rel(pieces.e5(), closed), 1e-8));
    Ok(())
}

fn minimizer(report: &mut Report, c: &CurvatureAtPoint) -> Result<(), CliError> {
    c.require_vacuum()?;
    let m = minimize(c)?;
    report.put("status", m.status.as_str());
    report.put("a_bar", m.a_bar);
    report.put("a0_bar", (1.0 + m.a_bar.norm_squared()).sqrt());
    report.put("e5_min", m.e5_min);
    report.put("gradient_norm", m.gradient_norm);
    report.put("hessian_min_eigenvalue", m.hessian_min_eigenvalue);
    report.put("iterations", m.iterations);
    report.put("diverged", m.diverged);
    if m.status == MinimizerStatus::UniqueMinimum {
        report.check(Check::new("stationary", m.gradient_norm, 1e-10));
    }
    Ok(())
}

fn nonvacuum(
    report: &mut Report,
    doc: &InputDocument,
    c: &CurvatureAtPoint,
    t0: &Observer,
    degree: usize,
) -> Result<(), CliError> {
    let t = match &doc.source {
        Source::Stress(t) => *t,
        _ => stress_from_curvature(c),
    };
    let grid = build_grid(degree)?;
    report.put("observer_a", t0.a());
    report.put("grid_degree", degree);
    report.put("stress", *t.matrix());
    report.put("limit_energy", limit_energy(&t, t0));
    let dual = t.dual_vector();
    report.put("dual_vector", dual.components);
    report.put("dual_vector_class", dual.class.as_str());
    report.put("dominant_energy_sampled", t.dominant_energy());
    let quadrature = momentum_components(c, &grid);
    let closed = momentum_closed_form(c);
    report.put("momentum", quadrature);
    report.put("momentum_closed_form", closed);
    match min_energy_over_observers(&t) {
        Ok((obs, value)) => {
            report.put("minimizing_observer_a", obs.a());
            report.put("minimum_energy", value);
        }
        Err(_) => {
            report.put("minimizing_observer_a", crate::report::Value::Null);
            report.put("minimum_energy", crate::report::Value::Null);
        }
    }
    let scale = t.matrix().amax().max(1.0);
    report.check(Check::new("momentum_quadrature", (quadrature - closed).amax() / scale, 1e-9));
    Ok(())
}

fn verify(report: &mut Report, doc: Option<&InputDocument>, settings: &Settings) -> Result<(), CliError> {
    let suites = match &settings.suite {
        Some(name) => vec![Suite::from_str(name).map_err(CliError::Input)?],
        None => Suite::ALL.to_vec(),
    };
    let degree = settings
        .grid_degree
        .or(doc.and_then(|d| d.options.grid_degree))
        .unwrap_or(12);
    let grid = build_grid(degree)?;
    report.put("seed", settings.seed as usize);
    report.put("grid_degree", degree);
    report.put(
        "suites",
        suites.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(",").as_str(),
    );
    for suite in suites {
        for mut check in run_suite(suite, settings.seed, &grid)? {
            check.name = format!("{}/{}", suite.as_str(), check.name);
            report.check(check);
        }
    }
    Ok(())
}
