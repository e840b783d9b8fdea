//! Scenario configuration: a JSON document naming a command, the model
//! parameters and the numerical settings of one run.

use std::path::Path;

use nlfront_core::criteria::{DMode, Link};
use nlfront_core::kernel::KernelFamily;
use nlfront_core::{InitialProfile, Kernel, ModelParams, Nonlinearity};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;
use crate::presets;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Eigen,
    Steady,
    Evolve,
    Simulate,
    Classify,
    Semiwave,
    Threshold,
    Sweep,
    Report,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Eigen => "eigen",
            Command::Steady => "steady",
            Command::Evolve => "evolve",
            Command::Simulate => "simulate",
            Command::Classify => "classify",
            Command::Semiwave => "semiwave",
            Command::Threshold => "threshold",
            Command::Sweep => "sweep",
            Command::Report => "report",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub command: Command,
    /// Built-in scenario whose settings this document overrides.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default)]
    pub params: ParamsBlock,
    #[serde(default)]
    pub numeric: NumericBlock,
    #[serde(default)]
    pub study: StudyBlock,
    #[serde(default)]
    pub output: OutputBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Model parameters; missing entries fall back to the reference set
/// (`a = b = 1`, saturating infection with slopes 2, unit Laplace kernels,
/// `d1 = d2 = mu1 = mu2 = h0 = 1`, cosine data of amplitude 1).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel1: Option<KernelFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel2: Option<KernelFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation1: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation2: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nonlinearity: Option<Nonlinearity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u0: Option<InitialProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v0: Option<InitialProfile>,
}

impl ParamsBlock {
    /// Build and validate the model parameters.
    pub fn build(&self) -> Result<ModelParams, CliError> {
        let base = ModelParams::p1();
        let kernel = |family: &Option<KernelFamily>, truncation: Option<u32>, fallback: &Kernel| {
            let k = match family {
                Some(f) => Kernel::new(f.clone())?,
                None => fallback.clone(),
            };
            match truncation {
                Some(n) => k.truncated(n),
                None => Ok(k),
            }
        };
        let params = ModelParams {
            d1: self.d1.unwrap_or(base.d1),
            d2: self.d2.unwrap_or(base.d2),
            a: self.a.unwrap_or(base.a),
            b: self.b.unwrap_or(base.b),
            mu1: self.mu1.unwrap_or(base.mu1),
            mu2: self.mu2.unwrap_or(base.mu2),
            h0: self.h0.unwrap_or(base.h0),
            kernel1: kernel(&self.kernel1, self.truncation1, &base.kernel1)?,
            kernel2: kernel(&self.kernel2, self.truncation2, &base.kernel2)?,
            nonlinearity: self.nonlinearity.unwrap_or(base.nonlinearity),
            u0: self.u0.unwrap_or(base.u0),
            v0: self.v0.unwrap_or(base.v0),
        };
        params.validate()?;
        Ok(params)
    }
}

/// Numerical settings shared by the commands; each command reads the
/// entries it needs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericBlock {
    /// Grid cells: on `[0, l]` for eigen/steady/evolve, on `[0, h0]` for
    /// the moving-front commands.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<usize>,
    /// Semi-wave grid spacing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dx: Option<f64>,
    /// Cap on the time step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Time horizon `T`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    /// Fixed domain length `l`; defaults to `h0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    /// Semi-wave cut-off length `L`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// Semi-wave kernel truncation index.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<u32>,
    /// Classification horizon.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stall_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    EllStar,
    MuStar,
    DThresholds,
    D2Under,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepOver {
    L,
    D1,
    D2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogRange {
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

impl LogRange {
    pub fn values(&self) -> Vec<f64> {
        let (a, b) = (self.from.ln(), self.to.ln());
        let m = self.points.max(2) - 1;
        (0..=m)
            .map(|k| (a + (b - a) * k as f64 / m as f64).exp())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub variable: SweepOver,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_range: Option<LogRange>,
}

impl SweepSpec {
    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        let mut grid = self.values.clone().unwrap_or_default();
        if let Some(r) = &self.log_range {
            if !(r.from > 0.0 && r.to > r.from && r.points >= 2) {
                return Err(CliError::config(
                    "log_range needs 0 < from < to and points >= 2",
                ));
            }
            grid.extend(r.values());
        }
        if grid.is_empty() || grid.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(CliError::config(
                "sweep needs a nonempty grid of positive values",
            ));
        }
        Ok(grid)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportKind {
    Regime,
    Mismatch,
}

/// Command-specific settings.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyBlock {
    /// Random starts for the steady-state uniqueness probe.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub starts: Option<usize>,
    /// Also evolve on the critical length `ell*`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub critical: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<Target>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub link: Option<Link>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_mode: Option<DMode>,
    /// Truncation indices for the speed table; `null` means untruncated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncations: Option<Vec<Option<u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigmas: Option<Vec<f64>>,
    /// Simulate the front up to this time and compare with the semi-wave.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare_horizon: Option<f64>,
    /// Averaging window for `h(t)/t`; defaults to the last quarter.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<ReportKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h0_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directory: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formats: Option<Vec<Format>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_interval: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_times: Option<Vec<f64>>,
}

impl OutputBlock {
    pub fn wants(&self, format: Format) -> bool {
        self.formats.as_ref().is_none_or(|f| f.contains(&format))
    }
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<ScenarioConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        ScenarioConfig::parse(&text)
    }

    /// Parse a document; when it names a preset, its entries override the
    /// preset's.
    pub fn parse(text: &str) -> Result<ScenarioConfig, CliError> {
        let doc: Value = serde_json::from_str(text)
            .map_err(|e| CliError::config(format!("malformed JSON: {e}")))?;
        let merged = match doc.get("preset").and_then(Value::as_str) {
            Some(name) => {
                let base = presets::find(name)?.config;
                let mut base = serde_json::to_value(base).expect("configs serialize");
                overlay(&mut base, doc);
                base
            }
            None => doc,
        };
        serde_json::from_value(merged).map_err(|e| CliError::config(format!("invalid config: {e}")))
    }

    pub fn model(&self) -> Result<ModelParams, CliError> {
        self.params.build()
    }
}

/// Recursive merge; tagged objects (kernels, profiles, links, modes) are
/// replaced whole.
fn overlay(base: &mut Value, top: Value) {
    const TAGS: [&str; 5] = ["family", "shape", "link", "mode", "variable"];
    match (base, top) {
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                let replace = v
                    .as_object()
                    .is_some_and(|o| TAGS.iter().any(|tag| o.contains_key(*tag)));
                match b.get_mut(&k) {
                    Some(slot) if !replace => overlay(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}
