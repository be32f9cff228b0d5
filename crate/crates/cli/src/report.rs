//! Run reports: a deterministic result payload, a residual table with
//! explicit tolerances and pass flags, echoed calibration constants, and
//! field-by-field report diffs.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use quasikit_core::series::KAPPA_DOUGLAS;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::ExperimentConfig;

/// Constants and grid sizes echoed by every run so reports are
/// self-describing.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct Calibration {
    /// Douglas kernel normalization `1/(4 pi^2)`.
    pub kappa_douglas: f64,
    pub quadrature_nr: usize,
    pub quadrature_ntheta: usize,
    pub schedule_grid: usize,
}

impl Calibration {
    pub fn for_config(cfg: &ExperimentConfig) -> Self {
        Calibration {
            kappa_douglas: KAPPA_DOUGLAS,
            quadrature_nr: cfg.quadrature.nr,
            quadrature_ntheta: cfg.quadrature.ntheta,
            schedule_grid: cfg.schedule.grid,
        }
    }
}

/// One residual check: a measured value against its tolerance.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ResidualRow {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ResidualRow {
    pub fn new(name: &str, value: f64, tolerance: f64) -> Self {
        ResidualRow {
            name: name.to_string(),
            value,
            tolerance,
            pass: value.is_finite() && value <= tolerance,
        }
    }
}

/// A named table written next to the report as `<name>.csv`.
#[derive(Clone, Debug)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

/// The complete record of one run. The payload and residual table depend
/// only on the configuration; wall clock and version live outside them.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub calibration: Calibration,
    pub payload: Value,
    pub residuals: Vec<ResidualRow>,
    pub wall_clock_seconds: f64,
}

impl RunReport {
    pub fn all_pass(&self) -> bool {
        self.residuals.iter().all(|r| r.pass)
    }

    /// Writes `report.json`, `residuals.csv`, and the command tables into
    /// `dir`, creating it as needed.
    pub fn write(&self, dir: &Path, tables: &[Table]) -> Result<()> {
        fs::create_dir_all(dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))?;
        let mut json = serde_json::to_string_pretty(self)?;
        json.push('\n');
        fs::write(dir.join("report.json"), json)
            .with_context(|| format!("cannot write report into {}", dir.display()))?;

        let mut residuals = Table::new("residuals", &["name", "value", "tolerance", "pass"]);
        for r in &self.residuals {
            residuals.push(vec![
                r.name.clone(),
                format!("{}", r.value),
                format!("{}", r.tolerance),
                r.pass.to_string(),
            ]);
        }
        for t in std::iter::once(&residuals).chain(tables) {
            fs::write(dir.join(format!("{}.csv", t.name)), t.to_csv())
                .with_context(|| format!("cannot write table {} into {}", t.name, dir.display()))?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<RunReport> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read report {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("{} is not a run report", path.display()))
    }
}

/// One differing leaf between two reports.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DiffEntry {
    /// Dotted path of the field, e.g. `payload.norm` or `config.n`.
    pub path: String,
    pub left: Value,
    pub right: Value,
    /// `right - left` when both sides are numeric.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

/// Field-by-field comparison of two reports. Both must come from the same
/// command on the same curve; wall clock is ignored, everything else that
/// differs is listed with a numeric delta where one exists.
pub fn diff_reports(a: &RunReport, b: &RunReport) -> Result<Vec<DiffEntry>> {
    if a.command != b.command {
        bail!(
            "reports are incompatible: commands `{}` and `{}` differ",
            a.command,
            b.command
        );
    }
    if a.config.map != b.config.map {
        bail!("reports are incompatible: they describe different curves");
    }
    let mut out = Vec::new();
    if a.version != b.version {
        out.push(DiffEntry {
            path: "version".to_string(),
            left: Value::String(a.version.clone()),
            right: Value::String(b.version.clone()),
            delta: None,
        });
    }
    diff_value(
        "config",
        &serde_json::to_value(&a.config)?,
        &serde_json::to_value(&b.config)?,
        &mut out,
    );
    diff_value(
        "calibration",
        &serde_json::to_value(a.calibration)?,
        &serde_json::to_value(b.calibration)?,
        &mut out,
    );
    diff_value("payload", &a.payload, &b.payload, &mut out);
    diff_value(
        "residuals",
        &serde_json::to_value(&a.residuals)?,
        &serde_json::to_value(&b.residuals)?,
        &mut out,
    );
    Ok(out)
}

fn diff_value(path: &str, a: &Value, b: &Value, out: &mut Vec<DiffEntry>) {
    match (a, b) {
        (Value::Object(ma), Value::Object(mb)) => {
            let keys: BTreeSet<&String> = ma.keys().chain(mb.keys()).collect();
            for key in keys {
                let sub = format!("{path}.{key}");
                match (ma.get(key.as_str()), mb.get(key.as_str())) {
                    (Some(x), Some(y)) => diff_value(&sub, x, y, out),
                    (Some(x), None) => push_leaf(&sub, x.clone(), Value::Null, out),
                    (None, Some(y)) => push_leaf(&sub, Value::Null, y.clone(), out),
                    (None, None) => unreachable!(),
                }
            }
        }
        (Value::Array(xa), Value::Array(xb)) => {
            for i in 0..xa.len().max(xb.len()) {
                let sub = format!("{path}[{i}]");
                match (xa.get(i), xb.get(i)) {
                    (Some(x), Some(y)) => diff_value(&sub, x, y, out),
                    (Some(x), None) => push_leaf(&sub, x.clone(), Value::Null, out),
                    (None, Some(y)) => push_leaf(&sub, Value::Null, y.clone(), out),
                    (None, None) => {}
                }
            }
        }
        _ => {
            if a != b {
                push_leaf(path, a.clone(), b.clone(), out);
            }
        }
    }
}

fn push_leaf(path: &str, left: Value, right: Value, out: &mut Vec<DiffEntry>) {
    let delta = match (left.as_f64(), right.as_f64()) {
        (Some(x), Some(y)) => Some(y - x),
        _ => None,
    };
    out.push(DiffEntry {
        path: path.to_string(),
        left,
        right,
        delta,
    });
}
