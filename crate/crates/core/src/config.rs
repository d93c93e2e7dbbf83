//! Run configuration: a TOML file with one section per concern. Values not
//! given fall back to the defaults; command-line flags override both.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cost::{GridConfig, LinalgForm, Model, ModelParams};
use crate::norms::{NormEngine, NormStatistic, DEFAULT_SAMPLES, FAST_SAMPLES};
use crate::pairing::PairingModel;
use crate::security::{SecurityConfig, MAX_P_BITS, POLLARD_CONSTANT};
use crate::setup::HPolicy;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Markdown,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "markdown" | "md" => Ok(OutputFormat::Markdown),
            _ => Err(Error::Config(format!("unknown output format `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub model: Model,
    pub samples: u64,
    pub seed: u64,
    pub format: OutputFormat,
    /// Engine for the norms reported at a single curve's optimum.
    pub norm_engine: NormEngine,
    /// Engine for sweeps, level searches and comparisons.
    pub sweep_norm_engine: NormEngine,
    pub statistic: NormStatistic,
    pub h_policy: HPolicy,
    /// Extra registry file merged over the built-in families and curves.
    pub registry: Option<PathBuf>,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            model: Model::BD,
            samples: DEFAULT_SAMPLES,
            seed: 1,
            format: OutputFormat::Json,
            norm_engine: NormEngine::Exact,
            sweep_norm_engine: NormEngine::Float,
            statistic: NormStatistic::MeanLog,
            h_policy: HPolicy::Recipe,
            registry: None,
        }
    }
}

/// Search grid; sampling controls live in [`RunSection`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub log2_a_min: f64,
    pub log2_a_max: Option<f64>,
    pub log2_a_step: f64,
    pub log2_b_min: f64,
    pub log2_b_max: f64,
    pub log2_b_step: f64,
    pub refine_a: bool,
    pub patience: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        let g = GridConfig::default();
        GridSection {
            log2_a_min: g.log2_a_min,
            log2_a_max: g.log2_a_max,
            log2_a_step: g.log2_a_step,
            log2_b_min: g.log2_b_min,
            log2_b_max: g.log2_b_max,
            log2_b_step: g.log2_b_step,
            refine_a: g.refine_a,
            patience: g.patience,
        }
    }
}

/// Cost-model overrides (log2 of each constant) and the linear-algebra form.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostSection {
    pub linalg_form: LinalgForm,
    pub log2_c_sieve: Option<f64>,
    pub log2_c_filter: Option<f64>,
    pub log2_c_linalg: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SecuritySection {
    pub pollard_constant: f64,
    pub max_seed_weight: usize,
    pub max_p_bits: u64,
    pub level_step_bits: u64,
    pub levels: Vec<u64>,
}

impl Default for SecuritySection {
    fn default() -> Self {
        SecuritySection {
            pollard_constant: POLLARD_CONSTANT,
            max_seed_weight: 6,
            max_p_bits: MAX_P_BITS,
            level_step_bits: 2,
            levels: vec![128, 160, 192, 256],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub from_bits: u64,
    pub to_bits: u64,
    pub step_bits: u64,
    pub fine_step_bits: u64,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            from_bits: 256,
            to_bits: 700,
            step_bits: 20,
            fine_step_bits: 5,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub run: RunSection,
    pub grid: GridSection,
    pub cost: CostSection,
    pub security: SecuritySection,
    pub sweep: SweepSection,
    pub pairing: PairingModel,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    /// Sample count of the fast profile.
    pub fn set_fast(&mut self) {
        self.run.samples = FAST_SAMPLES;
    }

    pub fn model_params(&self) -> ModelParams {
        ModelParams {
            model: self.run.model,
            linalg_form: self.cost.linalg_form,
            log2_c_sieve: self.cost.log2_c_sieve,
            log2_c_filter: self.cost.log2_c_filter,
            log2_c_linalg: self.cost.log2_c_linalg,
        }
    }

    fn grid_with(&self, engine: NormEngine) -> GridConfig {
        let g = &self.grid;
        GridConfig {
            log2_a_min: g.log2_a_min,
            log2_a_max: g.log2_a_max,
            log2_a_step: g.log2_a_step,
            log2_b_min: g.log2_b_min,
            log2_b_max: g.log2_b_max,
            log2_b_step: g.log2_b_step,
            refine_a: g.refine_a,
            patience: g.patience,
            samples: self.run.samples,
            scan_engine: NormEngine::Float,
            norm_engine: engine,
            statistic: self.run.statistic,
        }
    }

    pub fn security_config(&self) -> SecurityConfig {
        SecurityConfig {
            params: self.model_params(),
            grid: self.grid_with(self.run.norm_engine),
            sweep_grid: self.grid_with(self.run.sweep_norm_engine),
            h_policy: self.run.h_policy,
            pollard_constant: self.security.pollard_constant,
            max_seed_weight: self.security.max_seed_weight,
            max_p_bits: self.security.max_p_bits,
            level_step_bits: self.security.level_step_bits,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_reproduce_published_setting() {
        let c = RunConfig::default();
        assert_eq!(c.run.model, Model::BD);
        assert_eq!(c.run.samples, 25_600);
        let s = c.security_config();
        assert_eq!(s.grid.samples, 25_600);
        assert_eq!(s.grid.norm_engine, NormEngine::Exact);
        assert_eq!(s.sweep_grid.norm_engine, NormEngine::Float);
    }

    #[test]
    fn partial_file_overrides_defaults() {
        let c = RunConfig::from_toml_str(
            "[run]\nmodel = \"GS\"\nsamples = 100\n[grid]\nlog2_b_step = 0.5\n[cost]\nlinalg_form = \"twice-squared\"\n",
        )
        .unwrap();
        assert_eq!(c.run.model, Model::GS);
        assert_eq!(c.run.samples, 100);
        assert_eq!(c.run.seed, 1);
        assert_eq!(c.grid.log2_b_step, 0.5);
        assert_eq!(c.model_params().linalg_form, LinalgForm::TwiceSquared);
        assert!(RunConfig::from_toml_str("[run]\nbogus = 1\n").is_err());
    }

    #[test]
    fn roundtrip() {
        let mut c = RunConfig::default();
        c.set_fast();
        c.run.registry = Some("extra.toml".into());
        let back = RunConfig::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(back, c);
    }
}
