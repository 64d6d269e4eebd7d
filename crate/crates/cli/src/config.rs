//! Pipeline configuration file and the artifact naming convention.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use photonstat::sim::seeds;
use photonstat::{DetectorModel, EmitterScenario};
use serde::{Deserialize, Serialize};

/// One JSON document drives the whole pipeline. `scenario.pump_uW` and
/// `scenario.seed` act as defaults only: each sweep point replaces the pump
/// power with an entry of `powers_uW` and the seed with
/// `seeds::derive(seed, power_index)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub scenario: EmitterScenario,
    pub detector: DetectorModel,
    #[serde(rename = "powers_uW")]
    pub powers_uw: Vec<f64>,
    pub correlation: CorrelationConfig,
    /// Directory all pipeline artifacts are written to and read from.
    pub outputs: PathBuf,
    /// Top-level seed; all per-power randomness derives from it.
    pub seed: u64,
    /// Optional reflectivity measurement for the efficiency budget section
    /// of the report.
    #[serde(default)]
    pub efficiency_budget: Option<BudgetInputs>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CorrelationConfig {
    pub tau_max_ps: u64,
    pub bin_width_ps: u64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BudgetInputs {
    pub reflectivity: f64,
    pub coupler_transmission: f64,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let config: PipelineConfig = serde_json::from_str(&text)
            .with_context(|| format!("cannot parse config {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario
            .validate()
            .map_err(|e| anyhow::anyhow!("scenario: {e}"))?;
        self.detector
            .validate()
            .map_err(|e| anyhow::anyhow!("detector: {e}"))?;
        if self.powers_uw.is_empty() {
            bail!("powers_uW must not be empty");
        }
        if self.powers_uw.iter().any(|p| !p.is_finite() || *p < 0.0) {
            bail!("powers_uW entries must be non-negative");
        }
        if self.correlation.bin_width_ps == 0 {
            bail!("correlation.bin_width_ps must be at least 1");
        }
        if self.correlation.tau_max_ps < self.correlation.bin_width_ps {
            bail!("correlation.tau_max_ps must be at least the bin width");
        }
        Ok(())
    }

    /// Scenario for sweep point `i`: pump power from `powers_uW[i]`, seed
    /// derived from the top-level seed and the power index.
    pub fn power_scenario(&self, i: usize) -> EmitterScenario {
        EmitterScenario {
            pump_uw: self.powers_uw[i],
            seed: seeds::derive(self.seed, i as u64),
            ..self.scenario.clone()
        }
    }

    /// Background rate arriving at the detectors: configured optical
    /// background plus both detectors' dark counts, thinned by the detector
    /// efficiency like every other tag in the pipeline.
    pub fn detected_background_cps(&self) -> f64 {
        (self.scenario.background_cps + 2.0 * self.detector.dark_cps) * self.detector.efficiency
    }
}

pub fn ttg_path(dir: &Path, power_index: usize, channel: u8) -> PathBuf {
    dir.join(format!("p{power_index}_ch{channel}.ttg"))
}

pub fn hist_path(dir: &Path, power_index: usize) -> PathBuf {
    dir.join(format!("p{power_index}_hist.csv"))
}

pub fn g2fit_path(dir: &Path, power_index: usize) -> PathBuf {
    dir.join(format!("p{power_index}_g2fit.json"))
}
