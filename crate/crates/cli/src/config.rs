//! Experiment configuration: one JSON file per run, with command-line
//! overrides (`--set key=value`) addressing the same key paths that appear
//! in the file.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use quasikit_core::maps::MapConfig;
use quasikit_core::C64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Radial times angular node counts for area-integral quadrature.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    pub nr: usize,
    pub ntheta: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { nr: 64, ntheta: 256 }
    }
}

/// Controls for the level-curve schedules behind boundary limits.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    /// Angular grid on each level curve; a power of two, at least 64.
    pub grid: usize,
    /// Extrapolation degree; defaults per command when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        ScheduleConfig {
            grid: 512,
            degree: None,
        }
    }
}

/// One experiment: a curve, a truncation order, numerical controls, named
/// tolerances, and free-form command parameters. Field names double as
/// `--set` key paths.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Conformal chart of the curve under study.
    pub map: MapConfig,
    /// Truncation order for series and matrices; at least 2.
    pub n: usize,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    /// Overrides for the named tolerances each command documents; every
    /// entry must be positive.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
    /// Command-specific parameters.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, Value>,
    /// Output directory used when `--out` is not given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
}

impl ExperimentConfig {
    /// Reads a config file and applies `key=value` overrides before
    /// deserializing, so overrides can touch any field the file could.
    pub fn load(path: &Path, sets: &[String]) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let mut root: Value = serde_json::from_str(&text)
            .with_context(|| format!("config file {} is not valid JSON", path.display()))?;
        for spec in sets {
            apply_set(&mut root, spec)?;
        }
        let cfg: ExperimentConfig = serde_json::from_value(root)
            .context("config does not match the expected shape")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            bail!("truncation order n must be at least 2 (got {})", self.n);
        }
        if self.quadrature.nr < 4 || self.quadrature.ntheta < 8 {
            bail!(
                "quadrature sizes {}x{} are too small (need at least 4x8)",
                self.quadrature.nr,
                self.quadrature.ntheta
            );
        }
        if !self.schedule.grid.is_power_of_two() || self.schedule.grid < 64 {
            bail!(
                "schedule grid {} must be a power of two, at least 64",
                self.schedule.grid
            );
        }
        if self.schedule.degree == Some(0) {
            bail!("schedule degree must be positive when given");
        }
        for (name, &t) in &self.tolerances {
            if !t.is_finite() || t <= 0.0 {
                bail!("tolerance `{name}` must be positive and finite (got {t})");
            }
        }
        Ok(())
    }

    /// Named tolerance with a per-command default.
    pub fn tol(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }

    pub fn param_usize(&self, name: &str, default: usize) -> Result<usize> {
        match self.params.get(name) {
            None => Ok(default),
            Some(v) => v
                .as_u64()
                .map(|x| x as usize)
                .with_context(|| format!("params.{name} must be a nonnegative integer")),
        }
    }

    pub fn param_u64(&self, name: &str, default: u64) -> Result<u64> {
        match self.params.get(name) {
            None => Ok(default),
            Some(v) => v
                .as_u64()
                .with_context(|| format!("params.{name} must be a nonnegative integer")),
        }
    }

    pub fn param_f64(&self, name: &str, default: f64) -> Result<f64> {
        match self.params.get(name) {
            None => Ok(default),
            Some(v) => v
                .as_f64()
                .with_context(|| format!("params.{name} must be a number")),
        }
    }

    pub fn param_complex(&self, name: &str, default: C64) -> Result<C64> {
        match self.params.get(name) {
            None => Ok(default),
            Some(v) => complex_from_value(v)
                .with_context(|| format!("params.{name} must be a number, [re, im], or {{\"re\", \"im\"}}")),
        }
    }

    pub fn param_complex_opt(&self, name: &str) -> Result<Option<C64>> {
        match self.params.get(name) {
            None => Ok(None),
            Some(v) => complex_from_value(v)
                .map(Some)
                .with_context(|| format!("params.{name} must be a number, [re, im], or {{\"re\", \"im\"}}")),
        }
    }

    /// Sparse coefficient list `[[k, re, im], ...]` with integer frequencies.
    pub fn param_coeff_list(&self, name: &str) -> Result<Option<Vec<(i64, C64)>>> {
        let Some(v) = self.params.get(name) else {
            return Ok(None);
        };
        let rows = v
            .as_array()
            .with_context(|| format!("params.{name} must be a list of [k, re, im] triples"))?;
        let mut out = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let triple = row.as_array().filter(|a| a.len() == 3).with_context(|| {
                format!("params.{name}[{i}] must be a [k, re, im] triple")
            })?;
            let k = triple[0]
                .as_i64()
                .with_context(|| format!("params.{name}[{i}]: frequency must be an integer"))?;
            let re = triple[1]
                .as_f64()
                .with_context(|| format!("params.{name}[{i}]: re must be a number"))?;
            let im = triple[2]
                .as_f64()
                .with_context(|| format!("params.{name}[{i}]: im must be a number"))?;
            out.push((k, C64::new(re, im)));
        }
        if out.is_empty() {
            bail!("params.{name} must not be empty");
        }
        Ok(Some(out))
    }
}

fn complex_from_value(v: &Value) -> Result<C64> {
    if let Some(x) = v.as_f64() {
        return Ok(C64::new(x, 0.0));
    }
    if let Some(arr) = v.as_array() {
        if arr.len() == 2 {
            if let (Some(re), Some(im)) = (arr[0].as_f64(), arr[1].as_f64()) {
                return Ok(C64::new(re, im));
            }
        }
        bail!("expected a two-element numeric array");
    }
    if let Some(obj) = v.as_object() {
        for key in obj.keys() {
            if key != "re" && key != "im" {
                bail!("unexpected field `{key}` in complex value");
            }
        }
        let part = |k: &str| -> Result<f64> {
            match obj.get(k) {
                None => Ok(0.0),
                Some(x) => x.as_f64().with_context(|| format!("`{k}` must be a number")),
            }
        };
        return Ok(C64::new(part("re")?, part("im")?));
    }
    bail!("expected a number, [re, im], or {{\"re\", \"im\"}}");
}

/// Applies one `key=value` override to the raw config JSON. The key is a
/// dot-separated path using exactly the field names of the file format;
/// the value is parsed as JSON when possible and as a bare string
/// otherwise (so `--set map.kind=joukowski` needs no quoting).
fn apply_set(root: &mut Value, spec: &str) -> Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .with_context(|| format!("override `{spec}` must have the form key=value"))?;
    if key.is_empty() {
        bail!("override `{spec}` has an empty key");
    }
    let parsed: Value =
        serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let segments: Vec<&str> = key.split('.').collect();
    let mut cur = root;
    for seg in &segments[..segments.len() - 1] {
        let obj = match cur {
            Value::Object(m) => m,
            _ => bail!("config key `{key}`: `{seg}` does not address an object"),
        };
        cur = obj
            .entry(seg.to_string())
            .or_insert_with(|| Value::Object(serde_json::Map::new()));
    }
    match cur {
        Value::Object(m) => {
            m.insert(segments.last().unwrap().to_string(), parsed);
            Ok(())
        }
        _ => bail!("config key `{key}` does not address an object"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> Value {
        serde_json::json!({
            "map": {"kind": "joukowski", "t": {"re": 0.5, "im": 0.0}},
            "n": 8
        })
    }

    #[test]
    fn defaults_fill_in_and_validate() {
        let cfg: ExperimentConfig = serde_json::from_value(base()).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.quadrature.nr, 64);
        assert_eq!(cfg.schedule.grid, 512);
        assert!(cfg.tolerances.is_empty());
    }

    #[test]
    fn overrides_follow_dotted_paths() {
        let mut root = base();
        apply_set(&mut root, "n=32").unwrap();
        apply_set(&mut root, "map.t.re=0.8").unwrap();
        apply_set(&mut root, "tolerances.symmetry=1e-10").unwrap();
        apply_set(&mut root, "params.band=12").unwrap();
        let cfg: ExperimentConfig = serde_json::from_value(root).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.n, 32);
        assert_eq!(cfg.tol("symmetry", 1e-9), 1e-10);
        assert_eq!(cfg.param_usize("band", 0).unwrap(), 12);
        match cfg.map {
            MapConfig::Joukowski { t, .. } => assert_eq!(t.re, 0.8),
            _ => panic!("map kind changed unexpectedly"),
        }
    }

    #[test]
    fn bad_inputs_are_rejected() {
        let mut root = base();
        apply_set(&mut root, "n=1").unwrap();
        let cfg: ExperimentConfig = serde_json::from_value(root).unwrap();
        assert!(cfg.validate().is_err());

        let mut root = base();
        apply_set(&mut root, "tolerances.residual=-1e-6").unwrap();
        let cfg: ExperimentConfig = serde_json::from_value(root).unwrap();
        assert!(cfg.validate().is_err());

        let mut root = base();
        apply_set(&mut root, "truncation=8").unwrap();
        assert!(serde_json::from_value::<ExperimentConfig>(root).is_err());
    }

    #[test]
    fn complex_params_accept_three_spellings() {
        let mut root = base();
        apply_set(&mut root, "params.a=0.25").unwrap();
        apply_set(&mut root, "params.b=[0.1,-0.2]").unwrap();
        apply_set(&mut root, r#"params.c={"re":0.3,"im":0.4}"#).unwrap();
        let cfg: ExperimentConfig = serde_json::from_value(root).unwrap();
        assert_eq!(cfg.param_complex("a", C64::new(0.0, 0.0)).unwrap(), C64::new(0.25, 0.0));
        assert_eq!(cfg.param_complex("b", C64::new(0.0, 0.0)).unwrap(), C64::new(0.1, -0.2));
        assert_eq!(cfg.param_complex("c", C64::new(0.0, 0.0)).unwrap(), C64::new(0.3, 0.4));
    }
}
