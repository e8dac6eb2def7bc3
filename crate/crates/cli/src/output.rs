//! Deterministic text artifacts: CSV tables and JSON summaries.

use serde_json::{json, Map, Value};

use crate::{Artifact, Bound, Check};

/// Scientific notation with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, cells: &[Cell]) {
        let line: Vec<String> = cells.iter().map(Cell::render).collect();
        self.text.push_str(&line.join(","));
        self.text.push('\n');
    }

    pub fn into_artifact(self, name: &str) -> Artifact {
        Artifact {
            name: name.to_string(),
            contents: self.text,
        }
    }
}

pub enum Cell {
    Int(i64),
    Float(f64),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Self::Int(i) => i.to_string(),
            Self::Float(x) => fmt_f64(*x),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Self::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Self::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Self::Float(v)
    }
}

fn check_json(check: &Check) -> Value {
    let mut obj = Map::new();
    obj.insert("name".into(), json!(check.name));
    obj.insert("value".into(), json!(check.value));
    match check.bound {
        Bound::AtMost(t) => {
            obj.insert("max".into(), json!(t));
        }
        Bound::Within(lo, hi) => {
            obj.insert("min".into(), json!(lo));
            obj.insert("max".into(), json!(hi));
        }
    }
    obj.insert("pass".into(), json!(check.passed()));
    Value::Object(obj)
}

/// `fields` plus the command name, the tolerance scale, every check and an
/// overall verdict. Keys are emitted sorted.
pub fn summary(
    name: &str,
    command: &str,
    mut fields: Map<String, Value>,
    checks: &[Check],
    scale: f64,
) -> Artifact {
    fields.insert("command".into(), json!(command));
    fields.insert("tolerance_scale".into(), json!(scale));
    fields.insert(
        "checks".into(),
        Value::Array(checks.iter().map(check_json).collect()),
    );
    fields.insert("pass".into(), json!(checks.iter().all(Check::passed)));
    let mut contents = serde_json::to_string_pretty(&Value::Object(fields)).expect("plain values");
    contents.push('\n');
    Artifact {
        name: name.to_string(),
        contents,
    }
}
