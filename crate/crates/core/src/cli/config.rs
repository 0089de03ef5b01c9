//! Run configuration: flags over a JSON file over defaults.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::params::{integer_ratio, ModelParams, Sector};
use crate::spectrum::BiasMode;

pub const DEFAULT_CUTOFF: usize = 300;
pub const DEFAULT_G_RANGE: (f64, f64) = (0.05, 0.45);
pub const DEFAULT_G_STEPS: usize = 400;
pub const DEFAULT_LEVELS: usize = 8;

/// Options shared by every subcommand. All are optional so that a config
/// file can fill the gaps.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    /// Qubit splitting
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    /// Fixed qubit bias
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
    /// Bias in units of 2*beta, held constant along a sweep
    #[arg(long, global = true)]
    pub bias_ratio: Option<f64>,
    /// Coupling for single-point commands
    #[arg(long, global = true)]
    pub g: Option<f64>,
    #[arg(long, global = true)]
    pub g_min: Option<f64>,
    #[arg(long, global = true)]
    pub g_max: Option<f64>,
    #[arg(long, global = true)]
    pub g_steps: Option<usize>,
    /// Number of sector states
    #[arg(long, global = true)]
    pub cutoff: Option<usize>,
    /// even or odd
    #[arg(long, global = true)]
    pub sector: Option<Sector>,
    /// Number of levels to track
    #[arg(long, global = true)]
    pub levels: Option<usize>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Flat JSON file with any of the options above
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl ConfigLayer {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    fn bias(&self) -> Result<Option<BiasMode>> {
        match (self.epsilon, self.bias_ratio) {
            // zero bias either way
            (Some(e), Some(r)) if e == 0.0 && r == 0.0 => Ok(Some(BiasMode::Ratio(0.0))),
            (Some(_), Some(_)) => Err(Error::Config(
                "give either epsilon or bias_ratio, not both".into(),
            )),
            (Some(e), None) => Ok(Some(BiasMode::Fixed(e))),
            (None, Some(r)) => Ok(Some(BiasMode::Ratio(r))),
            (None, None) => Ok(None),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub delta: f64,
    pub bias: BiasMode,
    pub g: f64,
    pub g_min: f64,
    pub g_max: f64,
    pub g_steps: usize,
    pub cutoff: usize,
    pub sector: Sector,
    pub levels: usize,
    pub out: PathBuf,
    pub seed: u64,
}

impl RunConfig {
    /// Merges flags over the file named by `--config` (if any) over defaults,
    /// then validates.
    pub fn resolve(flags: &ConfigLayer) -> Result<Self> {
        let file = match &flags.config {
            Some(p) => ConfigLayer::from_file(p)?,
            None => ConfigLayer::default(),
        };
        let pick = |a: Option<f64>, b: Option<f64>, d: f64| a.or(b).unwrap_or(d);
        let bias = match flags.bias()? {
            Some(b) => b,
            None => file.bias()?.unwrap_or(BiasMode::Ratio(1.0)),
        };
        let cfg = Self {
            delta: pick(flags.delta, file.delta, 1.0),
            bias,
            g: pick(flags.g, file.g, 0.3),
            g_min: pick(flags.g_min, file.g_min, DEFAULT_G_RANGE.0),
            g_max: pick(flags.g_max, file.g_max, DEFAULT_G_RANGE.1),
            g_steps: flags.g_steps.or(file.g_steps).unwrap_or(DEFAULT_G_STEPS),
            cutoff: flags.cutoff.or(file.cutoff).unwrap_or(DEFAULT_CUTOFF),
            sector: flags.sector.or(file.sector).unwrap_or(Sector::Even),
            levels: flags.levels.or(file.levels).unwrap_or(DEFAULT_LEVELS),
            out: flags.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from(".")),
            seed: flags.seed.or(file.seed).unwrap_or(0),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        if !(self.g_min > 0.0 && self.g_min < self.g_max && self.g_max < 0.5) {
            return Err(Error::Config(format!(
                "need 0 < g_min < g_max < 1/2, got [{}, {}]",
                self.g_min, self.g_max
            )));
        }
        if self.g_steps < 3 {
            return Err(Error::Config("g_steps must be at least 3".into()));
        }
        if self.cutoff < 2 {
            return Err(Error::CutoffTooSmall {
                cutoff: self.cutoff,
                required: 2,
            });
        }
        if self.levels == 0 {
            return Err(Error::Config("levels must be positive".into()));
        }
        if let BiasMode::Ratio(r) = self.bias {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(Error::Config(format!("bias_ratio must be >= 0, got {r}")));
            }
        }
        Ok(())
    }

    /// Parameters at the single coupling `g`.
    pub fn params(&self) -> Result<ModelParams> {
        let p = ModelParams::new(self.delta, 0.0, self.g)?;
        Ok(p.with_epsilon(self.bias.epsilon(p.beta())))
    }

    /// `epsilon / (2 beta)` at the single coupling.
    pub fn ratio(&self) -> Result<f64> {
        Ok(self.params()?.bias_ratio())
    }

    /// `N` when the bias at the single coupling is an integer multiple of `2 beta`.
    pub fn n_bias(&self) -> Result<Option<u32>> {
        Ok(integer_ratio(self.ratio()?))
    }
}
