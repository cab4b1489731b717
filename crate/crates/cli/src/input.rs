//! Input documents: a TOML file with exactly one curvature source.

use std::collections::HashMap;

use nalgebra::{Matrix3, Matrix4, Vector3};
use sha2::{Digest, Sha256};
use toml::{Table, Value};

use smallsphere::expansion::Rank5;
use smallsphere::nonvacuum::{ricci_from_stress, StressEnergy};
use smallsphere::tensor::{
    curvature_from_weyl_and_ricci, validate_riemann, weyl_from_electric_magnetic, CurvatureAtPoint,
    ElectricMagneticParts, Rank4,
};

use crate::CliError;

/// Relative tolerance for duplicate entries that the index symmetries relate.
const DUPLICATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub enum Source {
    Riemann(CurvatureAtPoint),
    WeylEm(ElectricMagneticParts),
    Stress(StressEnergy),
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub grid_degree: Option<usize>,
    pub observer: Option<Vector3<f64>>,
}

#[derive(Debug, Clone)]
pub struct InputDocument {
    pub source: Source,
    pub dweyl: Option<Rank5>,
    pub options: Options,
    pub digest: String,
}

impl InputDocument {
    /// Riemann tensor at the point; a stress source is turned into curvature with zero Weyl part.
    pub fn curvature(&self) -> Result<CurvatureAtPoint, CliError> {
        Ok(match &self.source {
            Source::Riemann(c) => c.clone(),
            Source::WeylEm(parts) => weyl_from_electric_magnetic(parts)?,
            Source::Stress(t) => curvature_from_weyl_and_ricci(&Rank4::zeros(), &ricci_from_stress(t))?,
        })
    }
}

pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn parse_file(path: &std::path::Path) -> Result<InputDocument, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::Input(format!("{}: not valid UTF-8", path.display())))?;
    let mut doc = parse_str(&text)?;
    doc.digest = digest(&bytes);
    Ok(doc)
}

pub fn parse_str(text: &str) -> Result<InputDocument, CliError> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| CliError::Input(format!("parse error: {e}")))?;
    for key in table.keys() {
        if !["riemann", "weyl_em", "stress", "dweyl", "options"].contains(&key.as_str()) {
            return Err(CliError::Input(format!("unknown section [{key}]")));
        }
    }
    let present: Vec<&str> = ["riemann", "weyl_em", "stress"]
        .into_iter()
        .filter(|k| table.contains_key(*k))
        .collect();
    let source = match present.as_slice() {
        ["riemann"] => Source::Riemann(parse_riemann(section(&table, "riemann")?)?),
        ["weyl_em"] => Source::WeylEm(parse_weyl_em(section(&table, "weyl_em")?)?),
        ["stress"] => Source::Stress(parse_stress(section(&table, "stress")?)?),
        [] => {
            return Err(CliError::Input(
                "no curvature source: expected one of [riemann], [weyl_em], [stress]".into(),
            ))
        }
        many => {
            return Err(CliError::Input(format!(
                "conflicting curvature sources [{}]: give exactly one",
                many.join("], [")
            )))
        }
    };
    let dweyl = match table.get("dweyl") {
        Some(_) => Some(parse_dweyl(section(&table, "dweyl")?)?),
        None => None,
    };
    let options = match table.get("options") {
        Some(_) => parse_options(section(&table, "options")?)?,
        None => Options::default(),
    };
    Ok(InputDocument {
        source,
        dweyl,
        options,
        digest: digest(text.as_bytes()),
    })
}

fn section<'a>(table: &'a Table, name: &str) -> Result<&'a Table, CliError> {
    table[name]
        .as_table()
        .ok_or_else(|| CliError::Input(format!("[{name}] must be a table")))
}

fn number(v: &Value, what: &str) -> Result<f64, CliError> {
    let x = match v {
        Value::Float(f) => *f,
        Value::Integer(i) => *i as f64,
        _ => return Err(CliError::Input(format!("{what} must be a number"))),
    };
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Input(format!("{what} is not finite")))
    }
}

fn row(v: &Value, len: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == len)
        .ok_or_else(|| CliError::Input(format!("{what} must be an array of {len} numbers")))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| number(x, &format!("{what}[{i}]")))
        .collect()
}

fn matrix(table: &Table, key: &str, n: usize, section: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let what = format!("{section}.{key}");
    let v = table
        .get(key)
        .ok_or_else(|| CliError::Input(format!("missing {what}")))?;
    let rows = v
        .as_array()
        .filter(|a| a.len() == n)
        .ok_or_else(|| CliError::Input(format!("{what} must be a {n}x{n} array")))?;
    rows.iter()
        .enumerate()
        .map(|(i, r)| row(r, n, &format!("{what}[{i}]")))
        .collect()
}

fn only_keys(table: &Table, allowed: &[&str], section: &str) -> Result<(), CliError> {
    match table.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(CliError::Input(format!("unknown key {section}.{k}"))),
        None => Ok(()),
    }
}

fn parse_weyl_em(table: &Table) -> Result<ElectricMagneticParts, CliError> {
    only_keys(table, &["D", "E"], "weyl_em")?;
    let d = matrix(table, "D", 3, "weyl_em")?;
    let e = matrix(table, "E", 3, "weyl_em")?;
    let d = Matrix3::from_fn(|i, j| d[i][j]);
    let e = Matrix3::from_fn(|i, j| e[i][j]);
    Ok(ElectricMagneticParts::new(d, e)?)
}

fn parse_stress(table: &Table) -> Result<StressEnergy, CliError> {
    only_keys(table, &["T"], "stress")?;
    let t = matrix(table, "T", 4, "stress")?;
    Ok(StressEnergy::new(Matrix4::from_fn(|i, j| t[i][j]))?)
}

/// Index tuple of a key such as `R_0123`, checked against the expected prefix and length.
fn indices(key: &str, prefix: &str, len: usize) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Input(format!("bad component name {key:?}: expected {prefix}_ followed by {len} digits 0-3"));
    let digits = key
        .strip_prefix(prefix)
        .and_then(|s| s.strip_prefix('_'))
        .ok_or_else(bad)?;
    if digits.len() != len {
        return Err(bad());
    }
    digits
        .chars()
        .map(|c| c.to_digit(10).filter(|d| *d < 4).map(|d| d as usize).ok_or_else(bad))
        .collect()
}

/// Images of `(a, b, c, d)` under the index symmetries of a curvature tensor, with signs.
fn orbit([a, b, c, d]: [usize; 4]) -> [([usize; 4], f64); 8] {
    [
        ([a, b, c, d], 1.0),
        ([b, a, c, d], -1.0),
        ([a, b, d, c], -1.0),
        ([b, a, d, c], 1.0),
        ([c, d, a, b], 1.0),
        ([d, c, a, b], -1.0),
        ([c, d, b, a], -1.0),
        ([d, c, b, a], 1.0),
    ]
}

/// Fills all symmetry images of sparse entries; `name` renders an index tuple back to a key.
struct Completion {
    values: HashMap<Vec<usize>, (f64, String)>,
}

impl Completion {
    fn new() -> Self {
        Self { values: HashMap::new() }
    }

    fn insert(&mut self, key: &str, prefix: &[usize], idx: [usize; 4], v: f64) -> Result<(), CliError> {
        let [a, b, c, d] = idx;
        if (a == b || c == d) && v != 0.0 {
            return Err(CliError::Input(format!(
                "component {key} = {v} must vanish by antisymmetry in an index pair"
            )));
        }
        for (image, sign) in orbit(idx) {
            let full: Vec<usize> = prefix.iter().copied().chain(image).collect();
            let value = sign * v;
            match self.values.get(&full) {
                Some((old, source)) if (old - value).abs() > DUPLICATE_TOL * old.abs().max(value.abs()).max(1.0) => {
                    return Err(CliError::Input(format!(
                        "component {key} = {v} is inconsistent with {source} under the index symmetries \
                         (antisymmetry in each pair, pair exchange)"
                    )));
                }
                Some(_) => {}
                None => {
                    self.values.insert(full, (value, key.to_string()));
                }
            }
        }
        Ok(())
    }
}

fn parse_riemann(table: &Table) -> Result<CurvatureAtPoint, CliError> {
    let mut completion = Completion::new();
    for (key, v) in table {
        let idx = indices(key, "R", 4)?;
        let v = number(v, &format!("riemann.{key}"))?;
        completion.insert(key, &[], [idx[0], idx[1], idx[2], idx[3]], v)?;
    }
    let mut r = Rank4::zeros();
    for (idx, (v, _)) in &completion.values {
        r.set(idx[0], idx[1], idx[2], idx[3], *v);
    }
    Ok(validate_riemann(&r)?)
}

fn parse_dweyl(table: &Table) -> Result<Rank5, CliError> {
    let mut completion = Completion::new();
    for (key, v) in table {
        let idx = indices(key, "dW", 5)?;
        let v = number(v, &format!("dweyl.{key}"))?;
        completion.insert(key, &idx[..1], [idx[1], idx[2], idx[3], idx[4]], v)?;
    }
    let mut d = Rank5::zeros();
    for (idx, (v, _)) in &completion.values {
        d.set(idx[0], idx[1], idx[2], idx[3], idx[4], *v);
    }
    Ok(d)
}

fn parse_options(table: &Table) -> Result<Options, CliError> {
    only_keys(table, &["grid_degree", "observer"], "options")?;
    let grid_degree = match table.get("grid_degree") {
        Some(Value::Integer(n)) if *n >= 2 => Some(*n as usize),
        Some(_) => return Err(CliError::Input("options.grid_degree must be an integer >= 2".into())),
        None => None,
    };
    let observer = match table.get("observer") {
        Some(v) => {
            let a = row(v, 3, "options.observer")?;
            Some(Vector3::new(a[0], a[1], a[2]))
        }
        None => None,
    };
    Ok(Options { grid_degree, observer })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn electric_document() {
        let doc = parse_str("[weyl_em]\nD = [[2, 0, 0], [0, -1, 0], [0, 0, -1]]\nE = [[0, 0, 0], [0, 0, 0], [0, 0, 0]]\n")
            .unwrap();
        let c = doc.curvature().unwrap();
        assert_eq!(c.component(0, 1, 0, 1), 2.0);
        assert!(c.is_vacuum());
        assert_eq!(doc.digest.len(), 64);
    }

    #[test]
    fn two_sources_conflict() {
        let text = "[weyl_em]\nD = [[0,0,0],[0,0,0],[0,0,0]]\nE = [[0,0,0],[0,0,0],[0,0,0]]\n[riemann]\nR_0101 = 1\n";
        let err = parse_str(text).unwrap_err().to_string();
        assert!(err.contains("conflicting"), "{err}");
    }

    #[test]
    fn inconsistent_duplicate_is_named() {
        let err = parse_str("[riemann]\nR_0101 = 1\nR_1001 = 1\n").unwrap_err().to_string();
        assert!(err.contains("R_1001"), "{err}");
        // the consistent sign is accepted
        let doc = parse_str("[riemann]\nR_0101 = 1\nR_1001 = -1\n").unwrap();
        assert_eq!(doc.curvature().unwrap().component(1, 0, 1, 0), 1.0);
    }

    #[test]
    fn completion_fills_orbit() {
        let doc = parse_str("[riemann]\nR_0123 = 1\nR_0231 = -2\nR_0312 = 1\n").unwrap();
        let c = doc.curvature().unwrap();
        assert_eq!(c.component(2, 3, 0, 1), 1.0);
        assert_eq!(c.component(1, 0, 2, 3), -1.0);
        assert_eq!(c.component(3, 1, 2, 0), 2.0);
    }

    #[test]
    fn bianchi_violation_rejected() {
        let err = parse_str("[riemann]\nR_0123 = 1\n").unwrap_err().to_string();
        assert!(err.contains("Bianchi"), "{err}");
    }

    #[test]
    fn syntax_error_reports_line() {
        let err = parse_str("[riemann]\nR_0101 = \n").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn rejects_bad_names_and_values() {
        assert!(parse_str("[riemann]\nR_0104 = 1\n").is_err());
        assert!(parse_str("[riemann]\nR_0011 = 1\n").is_err());
        assert!(parse_str("[riemann]\nR_0101 = \"x\"\n").is_err());
        assert!(parse_str("[riemann]\nR_0101 = nan\n").is_err());
        assert!(parse_str("[options]\ngrid_degree = 12\n").is_err());
        assert!(parse_str("[stress]\nT = [[1, 0], [0, 1]]\n").is_err());
    }

    #[test]
    fn dweyl_is_completed_per_derivative_index() {
        let text = "[weyl_em]\nD = [[0,0,0],[0,0,0],[0,0,0]]\nE = [[0,0,0],[0,0,0],[0,0,0]]\n[dweyl]\ndW_20101 = 0.5\n";
        let doc = parse_str(text).unwrap();
        let d = doc.dweyl.unwrap();
        assert_eq!(d.get(2, 1, 0, 1, 0), 0.5);
        assert_eq!(d.get(2, 0, 1, 1, 0), -0.5);
        assert_eq!(d.get(0, 0, 1, 0, 1), 0.0);
    }

    #[test]
    fn options_are_read() {
        let text = "[stress]\nT = [[1,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]\n[options]\ngrid_degree = 8\nobserver = [0.5, 0, 0]\n";
        let doc = parse_str(text).unwrap();
        assert_eq!(doc.options.grid_degree, Some(8));
        assert_eq!(doc.options.observer, Some(Vector3::new(0.5, 0.0, 0.0)));
        assert!(!doc.curvature().unwrap().is_vacuum());
    }
}
