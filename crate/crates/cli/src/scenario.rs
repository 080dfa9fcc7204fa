//! Scenario files: physical parameters, query defaults, sweeps and output
//! settings for one figure command.

use std::path::Path;

use anyhow::Context;
use backscatter_outage::oracle::McConfig;
use backscatter_outage::{Accuracy, ScenarioParams};
use serde::Deserialize;

use crate::UsageError;

pub const FIG2_PRESET: &str = include_str!("../../../scenarios/fig2.toml");
pub const FIG3_PRESET: &str = include_str!("../../../scenarios/fig3.toml");
pub const FIG4_PRESET: &str = include_str!("../../../scenarios/fig4.toml");

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub params: ScenarioParams,
    #[serde(default)]
    pub queries: QueryDefaults,
    #[serde(default)]
    pub accuracy: Accuracy,
    #[serde(default)]
    pub mc: McSettings,
    #[serde(default)]
    pub sweeps: Vec<Sweep>,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QueryDefaults {
    pub snr_db: Vec<f64>,
    pub threshold_db: Vec<f64>,
    pub abs_tol: f64,
    pub target_po: Option<f64>,
}

impl Default for QueryDefaults {
    fn default() -> Self {
        QueryDefaults {
            snr_db: Vec::new(),
            threshold_db: Vec::new(),
            abs_tol: 1e-12,
            target_po: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McSettings {
    pub enabled: bool,
    pub n_samples: u64,
    pub seed: u64,
    pub batch_size: u64,
}

impl Default for McSettings {
    fn default() -> Self {
        let c = McConfig::default();
        McSettings {
            enabled: false,
            n_samples: c.n_samples,
            seed: c.seed,
            batch_size: c.batch_size,
        }
    }
}

impl McSettings {
    pub fn config(&self) -> McConfig {
        McConfig {
            n_samples: self.n_samples,
            seed: self.seed,
            batch_size: self.batch_size,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    SnrDb,
    DTr,
    ThresholdDb,
    Terms,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub axis: Axis,
    pub lo: f64,
    pub hi: f64,
    pub n_points: usize,
}

impl Sweep {
    /// Evenly spaced points, snapped to 1e-9 so that decimal grids print
    /// cleanly.
    pub fn points(&self) -> Vec<f64> {
        let span = self.hi - self.lo;
        let last = (self.n_points - 1) as f64;
        (0..self.n_points)
            .map(|i| {
                let v = self.lo + span * i as f64 / last;
                (v * 1e9).round() / 1e9
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub format: Format,
    pub prefix: String,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            format: Format::Csv,
            prefix: "out/backscatter".into(),
        }
    }
}

impl Scenario {
    pub fn parse(text: &str, origin: &str) -> anyhow::Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| UsageError(format!("{origin}: {e}")))?;
        s.validate()
            .map_err(|e| UsageError(format!("{origin}: {e}")))?;
        Ok(s)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Scenario::parse(&text, &path.display().to_string())
    }

    fn validate(&self) -> Result<(), String> {
        self.params.validate().map_err(|e| e.to_string())?;
        self.accuracy.validate().map_err(|e| e.to_string())?;
        if self.output.prefix.is_empty() {
            return Err("output prefix must not be empty".into());
        }
        if !(self.queries.abs_tol > 0.0) {
            return Err("queries.abs_tol must be positive".into());
        }
        if let Some(t) = self.queries.target_po {
            if !(t > 0.0 && t < 1.0) {
                return Err(format!("queries.target_po must lie in (0, 1), got {t}"));
            }
        }
        if self.mc.n_samples == 0 || self.mc.batch_size == 0 {
            return Err("mc.n_samples and mc.batch_size must be positive".into());
        }
        for s in &self.sweeps {
            if !(s.lo < s.hi) || s.n_points < 2 {
                return Err(format!(
                    "sweep {:?}: need lo < hi and n_points >= 2, got [{}, {}] x {}",
                    s.axis, s.lo, s.hi, s.n_points
                ));
            }
            if s.axis == Axis::Terms && (s.lo < 0.0 || s.lo.fract() != 0.0 || s.hi.fract() != 0.0) {
                return Err("terms sweep bounds must be non-negative integers".into());
            }
        }
        Ok(())
    }

    pub fn sweep(&self, axis: Axis) -> anyhow::Result<&Sweep> {
        self.sweeps
            .iter()
            .find(|s| s.axis == axis)
            .ok_or_else(|| UsageError(format!("scenario has no {axis:?} sweep")).into())
    }

    pub fn require(list: &[f64], name: &str) -> anyhow::Result<()> {
        if list.is_empty() {
            return Err(UsageError(format!("scenario must list queries.{name}")).into());
        }
        Ok(())
    }
}
