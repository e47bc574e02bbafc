//! Run configuration: one JSON document, optionally patched by `--set`
//! overrides before it is deserialized.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use qtrap_core::{Axis, GridPolicy, TrapConfig};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub const DEFAULT_SAMPLES: usize = 101;
pub const DEFAULT_N: usize = 60;
pub const DEFAULT_ORACLE_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_SWEEP_OMEGA: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Stability,
    Evolve,
    Uncertainty,
    Duality,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Stability => "stability",
            Command::Evolve => "evolve",
            Command::Uncertainty => "uncertainty",
            Command::Duality => "duality",
            Command::Verify => "verify",
        }
    }
}

/// Trap given either by electrode amplitudes or directly by Mathieu (a, q).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TrapSection {
    Voltages(TrapConfig),
    Mathieu {
        a: f64,
        q: f64,
        omega: f64,
        #[serde(default)]
        t0: f64,
        axis: Axis,
    },
}

impl TrapSection {
    pub fn config(&self) -> TrapConfig {
        match *self {
            TrapSection::Voltages(c) => c,
            TrapSection::Mathieu {
                a,
                q,
                omega,
                t0,
                axis,
            } => TrapConfig::from_mathieu(a, q, omega, t0, axis),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationSection {
    pub t_end: f64,
    pub tol: f64,
    /// Output rows, evenly spaced over [0, t_end].
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSection {
    #[serde(default)]
    pub z0: f64,
    #[serde(default)]
    pub p0: f64,
    /// `[re, im]`; defaults to (z0 + i·p0)/√2.
    #[serde(default)]
    pub alpha: Option<Complex64>,
}

impl StateSection {
    pub fn alpha(&self) -> Complex64 {
        self.alpha
            .unwrap_or_else(|| Complex64::new(self.z0, self.p0) * std::f64::consts::FRAC_1_SQRT_2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SqueezePoint {
    pub r: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    #[serde(default = "default_n", rename = "N", alias = "n")]
    pub n: usize,
    #[serde(default = "default_oracle_tolerance")]
    pub tolerance: f64,
    /// Extra squeeze parameters for `verify`, on top of the built-in sample.
    #[serde(default)]
    pub params: Vec<SqueezePoint>,
}

fn default_n() -> usize {
    DEFAULT_N
}

fn default_oracle_tolerance() -> f64 {
    DEFAULT_ORACLE_TOLERANCE
}

/// Points per axis: one count for both, or `[n_a, n_q]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Resolution {
    Square(usize),
    PerAxis([usize; 2]),
}

impl Resolution {
    pub fn counts(self) -> (usize, usize) {
        match self {
            Resolution::Square(n) => (n, n),
            Resolution::PerAxis([na, nq]) => (na, nq),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub a_range: [f64; 2],
    pub q_range: [f64; 2],
    pub resolution: Resolution,
    #[serde(default = "default_sweep_omega")]
    pub omega: f64,
    #[serde(default = "default_sweep_tol")]
    pub tol: f64,
}

fn default_sweep_omega() -> f64 {
    DEFAULT_SWEEP_OMEGA
}

fn default_sweep_tol() -> f64 {
    qtrap_core::floquet::FLOQUET_TOLERANCE
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub trap: Option<TrapSection>,
    #[serde(default)]
    pub integration: Option<IntegrationSection>,
    #[serde(default)]
    pub state: Option<StateSection>,
    #[serde(default)]
    pub grid: Option<GridPolicy>,
    #[serde(default)]
    pub oracle: Option<OracleSection>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub output: OutputSection,
}

impl RunConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        Self::from_value(value)
    }

    pub fn from_value(value: Value) -> CliResult<Self> {
        serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Reads `path` and applies `key.path=value` overrides in order.
    pub fn load(path: &Path, overrides: &[String]) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let mut value: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        for o in overrides {
            apply_override(&mut value, o)?;
        }
        Self::from_value(value)
    }

    pub fn trap(&self) -> CliResult<TrapConfig> {
        let cfg = require(self.trap.as_ref(), "trap")?.config();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn integration(&self) -> CliResult<IntegrationSection> {
        let s = *require(self.integration.as_ref(), "integration")?;
        positive("integration.t_end", s.t_end)?;
        positive("integration.tol", s.tol)?;
        if s.samples < 2 {
            return Err(CliError::Config(format!(
                "integration.samples must be at least 2, got {}",
                s.samples
            )));
        }
        Ok(s)
    }

    pub fn state(&self) -> CliResult<StateSection> {
        let s = self.state.unwrap_or_default();
        for (name, v) in [("state.z0", s.z0), ("state.p0", s.p0)] {
            finite(name, v)?;
        }
        if !s.alpha().is_finite() {
            return Err(CliError::Config("state.alpha is not finite".into()));
        }
        Ok(s)
    }

    pub fn grid(&self) -> CliResult<GridPolicy> {
        let g = self.grid.unwrap_or_default();
        g.validate()?;
        Ok(g)
    }

    pub fn oracle(&self) -> CliResult<OracleSection> {
        let o = require(self.oracle.as_ref(), "oracle")?.clone();
        positive("oracle.tolerance", o.tolerance)?;
        if o.n < 2 {
            return Err(CliError::Config(format!(
                "oracle.N must be at least 2, got {}",
                o.n
            )));
        }
        for p in &o.params {
            finite("oracle.params.theta", p.theta)?;
            if p.r.is_nan() || p.r < 0.0 || !p.r.is_finite() {
                return Err(CliError::Config(format!(
                    "oracle.params.r must be finite and non-negative, got {}",
                    p.r
                )));
            }
        }
        Ok(o)
    }

    pub fn sweep(&self) -> CliResult<SweepSection> {
        let s = *require(self.sweep.as_ref(), "sweep")?;
        positive("sweep.omega", s.omega)?;
        positive("sweep.tol", s.tol)?;
        for (name, r) in [("sweep.a_range", s.a_range), ("sweep.q_range", s.q_range)] {
            if !(r[0].is_finite() && r[1].is_finite() && r[0] <= r[1]) {
                return Err(CliError::Config(format!(
                    "{name} must be a finite [lo, hi] with lo <= hi"
                )));
            }
        }
        let (na, nq) = s.resolution.counts();
        for (name, n, r) in [("a", na, s.a_range), ("q", nq, s.q_range)] {
            if n == 0 || (n == 1 && r[0] != r[1]) {
                return Err(CliError::Config(format!(
                    "sweep.resolution for {name} must be >= 2, or 1 with a degenerate range"
                )));
            }
        }
        Ok(s)
    }

    /// Checks that every section `cmd` needs is present and valid.
    pub fn validate_for(&self, cmd: Command) -> CliResult<()> {
        match cmd {
            Command::Stability => {
                self.sweep()?;
            }
            Command::Evolve => {
                self.trap()?;
                self.integration()?;
                self.state()?;
            }
            Command::Uncertainty => {
                self.trap()?;
                self.integration()?;
                self.state()?;
                self.grid()?;
            }
            Command::Duality => {
                self.trap()?;
                self.integration()?;
                require(self.state.as_ref(), "state")?;
                self.state()?;
                self.grid()?;
                self.oracle()?;
            }
            Command::Verify => {
                self.oracle()?;
            }
        }
        Ok(())
    }
}

fn require<'a, T>(section: Option<&'a T>, name: &str) -> CliResult<&'a T> {
    section.ok_or_else(|| CliError::Config(format!("missing `{name}` section")))
}

fn positive(name: &str, v: f64) -> CliResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

fn finite(name: &str, v: f64) -> CliResult<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} is not finite")))
    }
}

/// Sets a dotted path in a JSON document. The value is parsed as JSON when
/// possible and kept as a string otherwise.
pub fn apply_override(doc: &mut Value, assignment: &str) -> CliResult<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{assignment}` is not key=value")))?;
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(CliError::Config(format!(
            "override key `{key}` is malformed"
        )));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = doc;
    let mut parts = key.split('.').peekable();
    while let Some(part) = parts.next() {
        if !node.is_object() {
            if node.is_null() {
                *node = Value::Object(Default::default());
            } else {
                return Err(CliError::Config(format!(
                    "override `{key}` descends into a non-object"
                )));
            }
        }
        let map = node.as_object_mut().expect("object");
        if parts.peek().is_none() {
            map.insert(part.to_string(), value);
            return Ok(());
        }
        node = map.entry(part.to_string()).or_insert(Value::Null);
    }
    unreachable!("split yields at least one part")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn override_creates_and_replaces() {
        let mut doc = json!({"oracle": {"N": 60}});
        apply_override(&mut doc, "oracle.N=80").unwrap();
        apply_override(&mut doc, "sweep.resolution=[3,1]").unwrap();
        apply_override(&mut doc, "output.format=json").unwrap();
        assert_eq!(doc["oracle"]["N"], json!(80));
        assert_eq!(doc["sweep"]["resolution"], json!([3, 1]));
        assert_eq!(doc["output"]["format"], json!("json"));
    }

    #[test]
    fn override_rejects_malformed() {
        let mut doc = json!({"oracle": 3});
        assert!(apply_override(&mut doc, "oracle").is_err());
        assert!(apply_override(&mut doc, "oracle..n=1").is_err());
        assert!(apply_override(&mut doc, "oracle.n=1").is_err());
    }

    #[test]
    fn trap_accepts_mathieu_form() {
        let cfg =
            RunConfig::from_json(r#"{"trap": {"a": 0.0, "q": 0.4, "omega": 2.0, "axis": "z"}}"#)
                .unwrap();
        let t = cfg.trap().unwrap();
        let (a, q) = qtrap_core::mathieu_params(&t);
        assert!(a.abs() < 1e-15 && (q - 0.4).abs() < 1e-15);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(RunConfig::from_json(
            r#"{"integration": {"t_end": 1, "tol": 1e-10, "tolerance": 3}}"#
        )
        .is_err());
        assert!(RunConfig::from_json(r#"{"bogus": {}}"#).is_err());
    }

    #[test]
    fn sections_are_validated_per_command() {
        let cfg = RunConfig::from_json(r#"{"oracle": {"N": 60, "tolerance": -1}}"#).unwrap();
        assert!(cfg.validate_for(Command::Verify).is_err());
        assert!(cfg.validate_for(Command::Stability).is_err());
        let cfg = RunConfig::from_json(
            r#"{"sweep": {"a_range": [-1, 1], "q_range": [0, 0], "resolution": [3, 1]}}"#,
        )
        .unwrap();
        cfg.validate_for(Command::Stability).unwrap();
        let cfg = RunConfig::from_json(
            r#"{"sweep": {"a_range": [-1, 1], "q_range": [0, 1], "resolution": [3, 1]}}"#,
        )
        .unwrap();
        assert!(cfg.validate_for(Command::Stability).is_err());
    }

    #[test]
    fn alpha_defaults_from_phase_space_point() {
        let s = StateSection {
            z0: 1.0,
            p0: -1.0,
            alpha: None,
        };
        let a = s.alpha();
        assert!((a - Complex64::new(1.0, -1.0) / 2f64.sqrt()).norm() < 1e-15);
    }
}
