//! Report values and the text, JSON and CSV emitters.
//!
//! Floats are written with 17 significant digits so identical inputs give
//! byte-identical output.

use std::io::Write;

use geodloom::config::Tolerances;
use serde_json::{Map, Number, Value};

use crate::error::CliError;

/// A float as a JSON number with 17 significant digits; non-finite values become null.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let s = format!("{x:.16e}");
    Value::Number(s.parse::<Number>().expect("formatted float is valid JSON"))
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|x| num(*x)).collect())
}

pub fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

pub fn matrix(m: &nalgebra::DMatrix<f64>) -> Value {
    Value::Array((0..m.nrows()).map(|i| nums(&m.row(i).iter().cloned().collect::<Vec<_>>())).collect())
}

/// Ordered object builder.
#[derive(Default)]
pub struct Obj(Map<String, Value>);

impl Obj {
    pub fn new() -> Self {
        Obj(Map::new())
    }

    pub fn put(mut self, k: &str, v: impl Into<Value>) -> Self {
        self.0.insert(k.to_string(), v.into());
        self
    }

    pub fn f(self, k: &str, x: f64) -> Self {
        self.put(k, num(x))
    }

    pub fn insert(&mut self, k: &str, v: impl Into<Value>) {
        self.0.insert(k.to_string(), v.into());
    }
}

impl From<Obj> for Value {
    fn from(o: Obj) -> Value {
        Value::Object(o.0)
    }
}

pub fn tolerances(t: &Tolerances) -> Value {
    Obj::new()
        .f("tangent", t.tangent)
        .f("geodesic", t.geodesic)
        .f("fd_step", t.fd_step)
        .f("immersion_rel", t.immersion_rel)
        .f("lagrangian", t.lagrangian)
        .f("holonomy", t.holonomy)
        .f("curvature_margin", t.curvature_margin)
        .into()
}

/// One named residual against its threshold.
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
}

impl Check {
    pub fn new(name: &str, residual: f64, tol: f64) -> Self {
        Check { name: name.to_string(), residual, tol }
    }

    pub fn pass(&self) -> bool {
        self.residual < self.tol
    }

    pub fn value(&self) -> Value {
        Obj::new().f("residual", self.residual).f("tol", self.tol).put("pass", self.pass()).into()
    }
}

pub fn checks(list: &[Check]) -> Value {
    let mut o = Obj::new();
    for c in list {
        o.insert(&c.name, c.value());
    }
    o.into()
}

/// Fails with exit 3 naming every check over its tolerance.
pub fn require(list: &[Check]) -> Result<(), CliError> {
    let bad: Vec<String> = list
        .iter()
        .filter(|c| !c.pass())
        .map(|c| format!("{} = {:.3e} (tol {:.1e})", c.name, c.residual, c.tol))
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(CliError::Identity(bad.join("; ")))
    }
}

/// Rows for the CSV emitter.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

pub fn cell(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_json(out: &mut dyn Write, v: &Value) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, v).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

pub fn write_csv(out: &mut dyn Write, t: &Table) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&t.header).map_err(std::io::Error::from)?;
    for r in &t.rows {
        w.write_record(r).map_err(std::io::Error::from)?;
    }
    w.flush()?;
    Ok(())
}

/// `path = value` lines, one per leaf.
pub fn write_text(out: &mut dyn Write, v: &Value) -> Result<(), CliError> {
    fn walk(out: &mut dyn Write, path: &str, v: &Value) -> std::io::Result<()> {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                    walk(out, &p, x)?;
                }
                Ok(())
            }
            Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
                let items: Vec<String> = a.iter().map(leaf).collect();
                writeln!(out, "{path} = [{}]", items.join(", "))
            }
            Value::Array(a) => {
                for (i, x) in a.iter().enumerate() {
                    walk(out, &format!("{path}[{i}]"), x)?;
                }
                Ok(())
            }
            _ => writeln!(out, "{path} = {}", leaf(v)),
        }
    }
    fn leaf(v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }
    }
    walk(out, "", v)?;
    Ok(())
}
