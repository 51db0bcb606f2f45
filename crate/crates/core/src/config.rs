//! Run configuration loaded from a TOML file with flat sections.
//!
//! Every key is optional; absent keys take the defaults below and unknown
//! keys are rejected by name.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::eval::McdConfig;
use crate::formats::FeatureLayout;
use crate::prompt::{ControlMode, ProviderConfig, RawRanges};
use crate::prosody::{Interval, ScalingRanges};
use crate::rank::{RankConfig, RankParams, Thresholds};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("invalid setting: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingSection {
    pub duration_raw: [f64; 2],
    pub duration_target: [f64; 2],
    pub energy_raw: [f64; 2],
    pub energy_target: [f64; 2],
    pub pitch_raw: [f64; 2],
    pub pitch_gain: f64,
}

impl Default for ScalingSection {
    fn default() -> Self {
        Self {
            duration_raw: [-2.0, 2.0],
            duration_target: [0.74, 1.34],
            energy_raw: [-5.0, 5.0],
            energy_target: [0.5, 2.0],
            pitch_raw: [-5.0, 5.0],
            pitch_gain: 1.0,
        }
    }
}

impl ScalingSection {
    pub fn ranges(&self) -> Result<ScalingRanges<f64>, ConfigError> {
        let iv = |name: &str, [lo, hi]: [f64; 2]| {
            Interval::new(lo, hi)
                .map_err(|_| ConfigError::InvalidRange(format!("scaling.{name} = [{lo}, {hi}] is not well-ordered")))
        };
        let ranges = ScalingRanges {
            duration_raw: iv("duration_raw", self.duration_raw)?,
            duration_target: iv("duration_target", self.duration_target)?,
            energy_raw: iv("energy_raw", self.energy_raw)?,
            energy_target: iv("energy_target", self.energy_target)?,
            pitch_raw: iv("pitch_raw", self.pitch_raw)?,
            pitch_gain: self.pitch_gain,
        };
        ranges
            .validate()
            .map_err(|e| ConfigError::InvalidRange(format!("scaling: {e}")))?;
        Ok(ranges)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdMode {
    /// Tertiles of each model's emotional training scores.
    #[default]
    Tertile,
    /// `explicit_thresholds` for every model.
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RankSection {
    #[serde(rename = "C")]
    pub c: f64,
    pub tolerance: f64,
    pub max_iter: usize,
    pub pair_limit: usize,
    pub seed: u64,
    pub bucket_thresholds: ThresholdMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explicit_thresholds: Option<[f64; 2]>,
    pub include_neutral: bool,
}

impl Default for RankSection {
    fn default() -> Self {
        let params = RankParams::<f64>::default();
        let cfg = RankConfig::<f64>::default();
        Self {
            c: params.c,
            tolerance: params.tolerance,
            max_iter: params.max_iter,
            pair_limit: cfg.pair_limit,
            seed: cfg.seed,
            bucket_thresholds: ThresholdMode::Tertile,
            explicit_thresholds: None,
            include_neutral: false,
        }
    }
}

impl RankSection {
    pub fn rank_config(&self) -> RankConfig<f64> {
        RankConfig {
            params: RankParams {
                c: self.c,
                tolerance: self.tolerance,
                max_iter: self.max_iter,
            },
            pair_limit: self.pair_limit,
            seed: self.seed,
        }
    }

    /// Thresholds that override each model's stored tertiles, if any.
    pub fn override_thresholds(&self) -> Result<Option<Thresholds<f64>>, ConfigError> {
        match (self.bucket_thresholds, self.explicit_thresholds) {
            (ThresholdMode::Tertile, _) => Ok(None),
            (ThresholdMode::Explicit, Some([lo, hi])) => Thresholds::new(lo, hi)
                .map(Some)
                .map_err(|e| ConfigError::InvalidRange(format!("rank.explicit_thresholds: {e}"))),
            (ThresholdMode::Explicit, None) => Err(ConfigError::Invalid(
                "rank.bucket_thresholds = \"explicit\" requires rank.explicit_thresholds".into(),
            )),
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(ConfigError::Invalid(format!("rank.C = {} must be positive", self.c)));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(ConfigError::Invalid(format!("rank.tolerance = {} must be positive", self.tolerance)));
        }
        if self.max_iter == 0 || self.pair_limit == 0 {
            return Err(ConfigError::Invalid("rank.max_iter and rank.pair_limit must be at least 1".into()));
        }
        self.override_thresholds()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSection {
    pub mcd_exclude_c0: bool,
    pub mcd_dtw: bool,
}

impl Default for EvalSection {
    fn default() -> Self {
        let d = McdConfig::default();
        Self {
            mcd_exclude_c0: d.exclude_c0,
            mcd_dtw: d.dtw,
        }
    }
}

impl EvalSection {
    pub fn mcd_config(&self) -> McdConfig {
        McdConfig {
            exclude_c0: self.mcd_exclude_c0,
            dtw: self.mcd_dtw,
        }
    }
}

/// Defaults for the command-line selectors; flags take precedence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    /// `stub`, `stub:neutral`, `http` or `replay:<path>`.
    pub provider: String,
    /// `gl`, `local` or `none`.
    pub prompt_control: String,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            provider: "stub".into(),
            prompt_control: ControlMode::GlobalAndLocal.flag().into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub run: RunSection,
    pub provider: ProviderConfig,
    pub scaling: ScalingSection,
    pub rank: RankSection,
    pub eval: EvalSection,
    pub features: FeatureLayout,
}

impl RunConfig {
    /// Parses TOML text. Relative paths inside are resolved against `base`.
    pub fn from_toml(text: &str, base: Option<&Path>) -> Result<Self, String> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        if let (Some(base), Some(rest)) = (base, cfg.run.provider.strip_prefix("replay:")) {
            let p = Path::new(rest);
            if p.is_relative() {
                cfg.run.provider = format!("replay:{}", base.join(p).display());
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.scaling.ranges()?;
        self.rank.validate()?;
        self.provider
            .validate()
            .map_err(|m| ConfigError::Invalid(format!("provider: {m}")))?;
        if self.features.dim == 0 {
            return Err(ConfigError::Invalid("features.dim must be at least 1".into()));
        }
        self.run
            .prompt_control
            .parse::<ControlMode>()
            .map_err(|e| ConfigError::Invalid(format!("run.prompt_control: {e}")))?;
        Ok(())
    }

    pub fn scaling_ranges(&self) -> ScalingRanges<f64> {
        self.scaling.ranges().expect("validated at load")
    }

    pub fn raw_ranges(&self) -> RawRanges {
        RawRanges::from(&self.scaling_ranges())
    }
}

/// Reads, defaults and validates a config file.
pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().filter(|p| !p.as_os_str().is_empty());
    let cfg = RunConfig::from_toml(&text, base).map_err(|message| ConfigError::Parse {
        path: path.to_path_buf(),
        message,
    })?;
    cfg.validate()?;
    Ok(cfg)
}
