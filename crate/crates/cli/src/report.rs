//! Reports and their JSON, CSV and text renderings.
//!
//! Every number is written in scientific notation with 17 significant digits,
//! which round-trips any `f64`. Non-finite numbers become `null` in JSON.

use std::fmt::Write;

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};

use smallsphere::verify::Check;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Integer(i64),
    Bool(bool),
    Text(String),
    Vector(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
    Null,
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Number(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Integer(v as i64)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<Vector3<f64>> for Value {
    fn from(v: Vector3<f64>) -> Self {
        Value::Vector(v.iter().copied().collect())
    }
}

impl From<Vector4<f64>> for Value {
    fn from(v: Vector4<f64>) -> Self {
        Value::Vector(v.iter().copied().collect())
    }
}

impl From<Matrix3<f64>> for Value {
    fn from(m: Matrix3<f64>) -> Self {
        Value::Matrix((0..3).map(|i| m.row(i).iter().copied().collect()).collect())
    }
}

impl From<Matrix4<f64>> for Value {
    fn from(m: Matrix4<f64>) -> Self {
        Value::Matrix((0..4).map(|i| m.row(i).iter().copied().collect()).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub input_digest: Option<String>,
    pub command: String,
    pub results: Vec<(String, Value)>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(command: &str, input_digest: Option<String>) -> Self {
        Self {
            input_digest,
            command: command.to_string(),
            results: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn put(&mut self, name: &str, value: impl Into<Value>) {
        self.results.push((name.to_string(), value.into()));
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
            Format::Text => self.to_text(),
        }
    }

    fn to_json(&self) -> String {
        let mut out = String::from("{\n");
        let digest = self.input_digest.as_deref().map_or("null".to_string(), json_string);
        writeln!(out, "  \"input_digest\": {digest},").unwrap();
        writeln!(out, "  \"command\": {},", json_string(&self.command)).unwrap();
        out.push_str("  \"results\": {");
        for (i, (name, value)) in self.results.iter().enumerate() {
            let sep = if i == 0 { "\n" } else { ",\n" };
            write!(out, "{sep}    {}: {}", json_string(name), json_value(value)).unwrap();
        }
        out.push_str(if self.results.is_empty() { "},\n" } else { "\n  },\n" });
        out.push_str("  \"checks\": [");
        for (i, c) in self.checks.iter().enumerate() {
            let sep = if i == 0 { "\n" } else { ",\n" };
            write!(
                out,
                "{sep}    {{\"name\": {}, \"residual\": {}, \"tolerance\": {}, \"pass\": {}}}",
                json_string(&c.name),
                json_number(c.residual),
                json_number(c.tolerance),
                c.pass
            )
            .unwrap();
        }
        out.push_str(if self.checks.is_empty() { "]\n}\n" } else { "\n  ]\n}\n" });
        out
    }

    fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["kind", "name", "value", "tolerance", "pass"]).unwrap();
        w.write_record(["meta", "command", &self.command, "", ""]).unwrap();
        let digest = self.input_digest.as_deref().unwrap_or("");
        w.write_record(["meta", "input_digest", digest, "", ""]).unwrap();
        for (name, value) in &self.results {
            for (suffix, text) in flatten(value) {
                w.write_record(["result", &format!("{name}{suffix}"), &text, "", ""]).unwrap();
            }
        }
        for c in &self.checks {
            w.write_record([
                "check",
                &c.name,
                &number(c.residual),
                &number(c.tolerance),
                if c.pass { "true" } else { "false" },
            ])
            .unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }

    fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "command: {}", self.command).unwrap();
        writeln!(out, "input_digest: {}", self.input_digest.as_deref().unwrap_or("-")).unwrap();
        if !self.results.is_empty() {
            out.push_str("results:\n");
            for (name, value) in &self.results {
                match value {
                    Value::Matrix(rows) => {
                        writeln!(out, "  {name} =").unwrap();
                        for r in rows {
                            writeln!(out, "    [{}]", join(r)).unwrap();
                        }
                    }
                    Value::Vector(v) => writeln!(out, "  {name} = [{}]", join(v)).unwrap(),
                    other => writeln!(out, "  {name} = {}", flatten(other)[0].1).unwrap(),
                }
            }
        }
        if !self.checks.is_empty() {
            out.push_str("checks:\n");
            for c in &self.checks {
                let status = if c.pass { "PASS" } else { "FAIL" };
                writeln!(
                    out,
                    "  {status} {} residual {} tolerance {}",
                    c.name,
                    number(c.residual),
                    number(c.tolerance)
                )
                .unwrap();
            }
            let passed = self.checks.iter().filter(|c| c.pass).count();
            writeln!(out, "{passed} of {} checks passed", self.checks.len()).unwrap();
        }
        out
    }
}

/// 17 significant digits in scientific notation; negative zero prints as zero.
pub fn number(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| number(*x)).collect::<Vec<_>>().join(", ")
}

fn json_number(v: f64) -> String {
    if v.is_finite() {
        number(v)
    } else {
        "null".into()
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

fn json_value(v: &Value) -> String {
    let list = |v: &[f64]| format!("[{}]", v.iter().map(|x| json_number(*x)).collect::<Vec<_>>().join(", "));
    match v {
        Value::Number(x) => json_number(*x),
        Value::Integer(i) => i.to_string(),
        Value::Bool(b) => b.to_string(),
        Value::Text(s) => json_string(s),
        Value::Vector(v) => list(v),
        Value::Matrix(rows) => format!("[{}]", rows.iter().map(|r| list(r)).collect::<Vec<_>>().join(", ")),
        Value::Null => "null".into(),
    }
}

/// Scalar cells of a value, keyed by an index suffix such as `[1][2]`.
fn flatten(v: &Value) -> Vec<(String, String)> {
    match v {
        Value::Number(x) => vec![(String::new(), number(*x))],
        Value::Integer(i) => vec![(String::new(), i.to_string())],
        Value::Bool(b) => vec![(String::new(), b.to_string())],
        Value::Text(s) => vec![(String::new(), s.clone())],
        Value::Null => vec![(String::new(), String::new())],
        Value::Vector(v) => v.iter().enumerate().map(|(i, x)| (format!("[{i}]"), number(*x))).collect(),
        Value::Matrix(rows) => rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, x)| (format!("[{i}][{j}]"), number(*x))))
            .collect(),
    }
}
