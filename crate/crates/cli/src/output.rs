use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;
use ising_discrim::Beta;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(usize),
    Text(String),
    Beta(Beta),
    Missing,
}

impl Value {
    fn csv(&self) -> String {
        match self {
            Value::Num(x) => num(*x),
            Value::Int(n) => n.to_string(),
            Value::Text(s) => s.replace([',', '\n'], ";"),
            Value::Beta(Beta::Finite(b)) => num(*b),
            Value::Beta(Beta::Infinite) => "inf".into(),
            Value::Missing => String::new(),
        }
    }

    fn json(&self) -> String {
        match self {
            Value::Num(x) => num(*x),
            Value::Int(n) => n.to_string(),
            Value::Text(s) => serde_json::to_string(s).expect("strings always serialize"),
            Value::Beta(Beta::Finite(b)) => num(*b),
            Value::Beta(Beta::Infinite) => "\"inf\"".into(),
            Value::Missing => "null".into(),
        }
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Ordered key/value output row. Key order is fixed per quantity.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record {
    fields: Vec<(&'static str, Value)>,
}

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: &'static str, value: Value) -> &mut Self {
        self.fields.push((key, value));
        self
    }

    pub fn num(&mut self, key: &'static str, x: f64) -> &mut Self {
        self.push(key, Value::Num(x))
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.iter().find(|(k, _)| *k == key).map(|(_, v)| v)
    }

    pub fn set(&mut self, key: &'static str, value: Value) {
        match self.fields.iter_mut().find(|(k, _)| *k == key) {
            Some(slot) => slot.1 = value,
            None => self.fields.push((key, value)),
        }
    }

    pub fn keys(&self) -> Vec<&'static str> {
        self.fields.iter().map(|(k, _)| *k).collect()
    }

    pub fn check_finite(&self) -> Result<(), CliError> {
        for (k, v) in &self.fields {
            if let Value::Num(x) = v {
                if !x.is_finite() {
                    return Err(CliError::Compute(format!("non-finite result for {k}: {x}")));
                }
            }
        }
        Ok(())
    }

    fn to_json(&self) -> String {
        let body: Vec<String> = self
            .fields
            .iter()
            .map(|(k, v)| format!("{}: {}", serde_json::to_string(k).expect("keys serialize"), v.json()))
            .collect();
        format!("{{{}}}", body.join(", "))
    }

    fn to_csv(&self) -> String {
        self.fields.iter().map(|(_, v)| v.csv()).collect::<Vec<_>>().join(",")
    }
}

/// Renders records as CSV (optional `#` comment line, header, rows) or JSON
/// (a single object, or an array for several records).
pub fn render(records: &[Record], format: Format, comment: Option<&str>) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            if let Some(c) = comment {
                writeln!(out, "# {c}").unwrap();
            }
            if let Some(first) = records.first() {
                writeln!(out, "{}", first.keys().join(",")).unwrap();
            }
            for r in records {
                writeln!(out, "{}", r.to_csv()).unwrap();
            }
        }
        Format::Json => {
            if let [single] = records {
                writeln!(out, "{}", single.to_json()).unwrap();
            } else {
                let rows: Vec<String> = records.iter().map(|r| format!("  {}", r.to_json())).collect();
                writeln!(out, "[\n{}\n]", rows.join(",\n")).unwrap();
            }
        }
    }
    out
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Compute(format!("cannot write {}: {e}", path.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Compute(format!("cannot write to stdout: {e}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            assert!(serde_json::from_str::<f64>(&s).is_ok(), "{s}");
        }
    }

    #[test]
    fn csv_and_json_layouts() {
        let mut r = Record::new();
        r.num("J", 1.0).push("beta", Value::Beta(Beta::Infinite)).push("warning", Value::Text("a,b".into()));
        let csv = render(&[r.clone()], Format::Csv, Some("test"));
        assert_eq!(csv, "# test\nJ,beta,warning\n1.0000000000000000e0,inf,a;b\n");
        let json: serde_json::Value = serde_json::from_str(&render(&[r], Format::Json, None)).unwrap();
        assert_eq!(json["J"], 1.0);
        assert_eq!(json["beta"], "inf");
        assert_eq!(json["warning"], "a,b");
    }
}
