//! Parameter reports: an ordered list of named values with units and a
//! status, rendered as JSON or as an aligned text table.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize, Serializer};

use super::{round_sig, sig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Undefined,
    NotReached,
    Warning,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Undefined => "undefined",
            Status::NotReached => "not-reached",
            Status::Warning => "warning",
        }
    }
}

fn rounded<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_f64(round_sig(*x)),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parameter {
    pub name: String,
    #[serde(serialize_with = "rounded")]
    pub value: Option<f64>,
    pub unit: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ParameterReport {
    pub provenance: BTreeMap<String, String>,
    pub parameters: Vec<Parameter>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Table,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "table" => Ok(ReportFormat::Table),
            other => Err(Error::InvalidParams(format!("unknown report format '{other}'"))),
        }
    }
}

impl ParameterReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<&Parameter> {
        self.parameters.iter().find(|p| p.name == name)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.get(name).and_then(|p| p.value)
    }

    pub fn provenance(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        self.provenance.insert(key.into(), value.into());
        self
    }

    pub fn insert(&mut self, p: Parameter) -> Result<()> {
        if self.get(&p.name).is_some() {
            return Err(Error::InvalidParams(format!("duplicate report key '{}'", p.name)));
        }
        if p.status == Status::Undefined && p.value.is_some() {
            return Err(Error::InvalidParams(format!("undefined '{}' carries a value", p.name)));
        }
        if let Some(v) = p.value {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("'{}' is not finite", p.name)));
            }
        }
        self.parameters.push(p);
        Ok(())
    }

    /// Adds `name`; `None` or non-finite values become undefined.
    pub fn push(&mut self, name: &str, value: Option<f64>, unit: &str) -> Result<()> {
        let value = value.filter(|v| v.is_finite());
        self.insert(Parameter {
            name: name.into(),
            status: if value.is_some() { Status::Ok } else { Status::Undefined },
            value,
            unit: unit.into(),
            note: None,
        })
    }

    pub fn push_status(&mut self, name: &str, value: Option<f64>, unit: &str, status: Status, note: Option<String>) -> Result<()> {
        let value = if status == Status::Undefined { None } else { value.filter(|v| v.is_finite()) };
        self.insert(Parameter {
            name: name.into(),
            value,
            unit: unit.into(),
            status,
            note,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        let r: Self = serde_json::from_str(text).map_err(|e| Error::parse(path, e.line(), e.to_string()))?;
        let mut check = Self::new();
        for p in r.parameters.iter().cloned() {
            check.insert(p).map_err(|e| Error::parse(path, 0, e.to_string()))?;
        }
        Ok(r)
    }

    pub fn to_table(&self) -> String {
        let w = self.parameters.iter().map(|p| p.name.chars().count()).max().unwrap_or(4).max(9);
        let mut out = String::new();
        for (k, v) in &self.provenance {
            writeln!(out, "# {k}: {v}").unwrap();
        }
        writeln!(out, "{:<w$}  {:>16}  {:<12}  status", "parameter", "value", "unit").unwrap();
        for p in &self.parameters {
            let v = p.value.map(sig).unwrap_or_else(|| "-".into());
            write!(out, "{:<w$}  {:>16}  {:<12}  {}", p.name, v, p.unit, p.status.as_str()).unwrap();
            if let Some(n) = &p.note {
                write!(out, "  ({n})").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Json => self.to_json(),
            ReportFormat::Table => self.to_table(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let format = if path.extension().is_some_and(|e| e == "json") {
            ReportFormat::Json
        } else {
            ReportFormat::Table
        };
        std::fs::write(path, self.render(format)).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, path)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Delta {
    pub name: String,
    pub unit: String,
    pub a: Option<f64>,
    pub b: Option<f64>,
    /// `b − a`.
    pub absolute: Option<f64>,
    /// `(b − a)/|a|`.
    pub relative: Option<f64>,
    /// `b / a`.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub deltas: Vec<Delta>,
    pub only_a: Vec<String>,
    pub only_b: Vec<String>,
}

/// Per-key differences in the key order of `a`. A unit mismatch on a
/// shared key is an error.
pub fn compare_reports(a: &ParameterReport, b: &ParameterReport) -> Result<Comparison> {
    let mut deltas = Vec::new();
    let mut only_a = Vec::new();
    for pa in &a.parameters {
        let Some(pb) = b.get(&pa.name) else {
            only_a.push(pa.name.clone());
            continue;
        };
        if pa.unit != pb.unit {
            return Err(Error::Comparison(format!(
                "'{}' is in '{}' in the first report and '{}' in the second",
                pa.name, pa.unit, pb.unit
            )));
        }
        let both = pa.value.zip(pb.value);
        deltas.push(Delta {
            name: pa.name.clone(),
            unit: pa.unit.clone(),
            a: pa.value,
            b: pb.value,
            absolute: both.map(|(x, y)| y - x),
            relative: both.and_then(|(x, y)| (x != 0.0).then(|| (y - x) / x.abs())),
            ratio: both.and_then(|(x, y)| (x != 0.0).then(|| y / x)),
        });
    }
    let only_b = b
        .parameters
        .iter()
        .filter(|p| a.get(&p.name).is_none())
        .map(|p| p.name.clone())
        .collect();
    Ok(Comparison { deltas, only_a, only_b })
}

impl Comparison {
    pub fn to_table(&self) -> String {
        let w = self.deltas.iter().map(|d| d.name.chars().count()).max().unwrap_or(4).max(9);
        let cell = |v: Option<f64>| v.map(sig).unwrap_or_else(|| "-".into());
        let mut out = String::new();
        writeln!(
            out,
            "{:<w$}  {:>16}  {:>16}  {:>16}  {:>16}  {:>16}  unit",
            "parameter", "a", "b", "b-a", "(b-a)/|a|", "b/a"
        )
        .unwrap();
        for d in &self.deltas {
            writeln!(
                out,
                "{:<w$}  {:>16}  {:>16}  {:>16}  {:>16}  {:>16}  {}",
                d.name,
                cell(d.a),
                cell(d.b),
                cell(d.absolute),
                cell(d.relative),
                cell(d.ratio),
                d.unit
            )
            .unwrap();
        }
        if !self.only_a.is_empty() {
            writeln!(out, "# only in a: {}", self.only_a.join(", ")).unwrap();
        }
        if !self.only_b.is_empty() {
            writeln!(out, "# only in b: {}", self.only_b.join(", ")).unwrap();
        }
        out
    }

    pub fn get(&self, name: &str) -> Option<&Delta> {
        self.deltas.iter().find(|d| d.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ParameterReport {
        let mut r = ParameterReport::new();
        r.provenance("input", "a.txt");
        r.push("Pa", Some(1.234567891234), "μm").unwrap();
        r.push("Psk", None, "-").unwrap();
        r.push_status("Pβ0.1", Some(120.0), "μm", Status::NotReached, Some("ACF stays above 0.1".into()))
            .unwrap();
        r
    }

    #[test]
    fn undefined_is_null_with_status() {
        let j = sample().to_json();
        assert!(j.contains("\"value\": null"), "{j}");
        assert!(j.contains("\"status\": \"undefined\""));
        assert!(j.contains("1.23456789"));
        assert!(!j.contains("1.234567891"));
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        let back = ParameterReport::from_json(&r.to_json(), Path::new("r.json")).unwrap();
        assert_eq!(back.to_json(), r.to_json());
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        let mut r = sample();
        assert!(r.push("Pa", Some(1.0), "μm").is_err());
    }

    #[test]
    fn identical_reports_compare_to_zero() {
        let c = compare_reports(&sample(), &sample()).unwrap();
        assert_eq!(c.get("Pa").unwrap().absolute, Some(0.0));
        assert_eq!(c.get("Psk").unwrap().absolute, None);
        assert!(c.only_a.is_empty() && c.only_b.is_empty());
    }

    #[test]
    fn unit_mismatch_is_an_error() {
        let a = sample();
        let mut b = ParameterReport::new();
        b.push("Pa", Some(1.0), "mm").unwrap();
        assert!(matches!(compare_reports(&a, &b), Err(Error::Comparison(_))));
    }

    #[test]
    fn table_lists_every_key() {
        let t = sample().to_table();
        for k in ["Pa", "Psk", "Pβ0.1", "undefined", "not-reached"] {
            assert!(t.contains(k), "{t}");
        }
    }
}
