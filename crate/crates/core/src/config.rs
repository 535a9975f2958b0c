//! Tracker configuration and its flat `key=value` file format.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// How the per-feature observation models are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FusionMode {
    /// Bayesian model averaging over both features with the forgetting-factor
    /// model-posterior recursion.
    Bma,
    /// Both features, model probabilities pinned at 1/2.
    FixedEqual,
    /// Color histogram model only.
    ColorOnly,
    /// LBP texture model only.
    TextureOnly,
}

impl FusionMode {
    pub const ALL: [FusionMode; 4] = [
        FusionMode::Bma,
        FusionMode::FixedEqual,
        FusionMode::ColorOnly,
        FusionMode::TextureOnly,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FusionMode::Bma => "bma",
            FusionMode::FixedEqual => "fixed-equal",
            FusionMode::ColorOnly => "color-only",
            FusionMode::TextureOnly => "texture-only",
        }
    }
}

impl fmt::Display for FusionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FusionMode {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bma" => Ok(FusionMode::Bma),
            "fixed-equal" => Ok(FusionMode::FixedEqual),
            "color-only" => Ok(FusionMode::ColorOnly),
            "texture-only" => Ok(FusionMode::TextureOnly),
            other => Err(ConfigError::InvalidValue {
                key: "fusion_mode".into(),
                value: other.into(),
                reason: "expected one of bma, fixed-equal, color-only, texture-only".into(),
            }),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("line {0}: expected `key=value`")]
    MalformedLine(usize),
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    InvalidValue { key: String, value: String, reason: String },
    #[error("config violates constraint: {0}")]
    Constraint(String),
}

/// Filter parameters. Defaults track a roughly 2 px/frame object and match
/// the empirically chosen likelihood widths of 0.1.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackerConfig {
    /// Particle count N.
    pub n_particles: usize,
    /// Per-component standard deviations of the transition noise, in state
    /// order (x, y, vx, vy, hx, hy).
    pub sigma_diag: [f64; 6],
    /// Width of the color-likelihood Gaussian over Bhattacharyya distance.
    pub sigma_color: f64,
    /// Width of the texture-likelihood Gaussian.
    pub sigma_texture: f64,
    /// Forgetting factor in (0,1) flattening the model posterior each step.
    pub alpha: f64,
    pub fusion_mode: FusionMode,
    /// Model posterior below this triggers a template refresh for that feature.
    pub slump_threshold: f64,
    /// Resample when ESS drops below this fraction of N.
    pub ess_fraction: f64,
    pub rng_seed: u64,
    /// When set, the transition mean advances positions by the velocity
    /// components instead of being the previous state itself.
    pub advect: bool,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            n_particles: 200,
            sigma_diag: [4.0, 4.0, 1.0, 1.0, 1.5, 1.5],
            sigma_color: 0.1,
            sigma_texture: 0.1,
            alpha: 0.9,
            fusion_mode: FusionMode::Bma,
            slump_threshold: 0.15,
            ess_fraction: 0.5,
            rng_seed: 0,
            advect: false,
        }
    }
}

impl TrackerConfig {
    /// Parses the flat `key=value` format. Blank lines and lines starting
    /// with `#` are skipped; unknown keys are an error.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = TrackerConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or(ConfigError::MalformedLine(lineno + 1))?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "n_particles" => self.n_particles = parse_num(key, value)?,
            "sigma_diag" => {
                let parts: Vec<&str> = value.split(',').map(str::trim).collect();
                if parts.len() != 6 {
                    return Err(ConfigError::InvalidValue {
                        key: key.into(),
                        value: value.into(),
                        reason: format!("expected 6 comma-separated values, got {}", parts.len()),
                    });
                }
                for (slot, part) in self.sigma_diag.iter_mut().zip(parts) {
                    *slot = parse_num(key, part)?;
                }
            }
            "sigma_color" => self.sigma_color = parse_num(key, value)?,
            "sigma_texture" => self.sigma_texture = parse_num(key, value)?,
            "alpha" => self.alpha = parse_num(key, value)?,
            "fusion_mode" => self.fusion_mode = value.parse()?,
            "slump_threshold" => self.slump_threshold = parse_num(key, value)?,
            "ess_fraction" => self.ess_fraction = parse_num(key, value)?,
            "rng_seed" => self.rng_seed = parse_num(key, value)?,
            "advect" => {
                self.advect = match value {
                    "true" | "1" => true,
                    "false" | "0" => false,
                    _ => {
                        return Err(ConfigError::InvalidValue {
                            key: key.into(),
                            value: value.into(),
                            reason: "expected true or false".into(),
                        })
                    }
                }
            }
            _ => return Err(ConfigError::UnknownKey(key.into())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let check = |ok: bool, msg: &str| {
            if ok {
                Ok(())
            } else {
                Err(ConfigError::Constraint(msg.into()))
            }
        };
        check(self.n_particles >= 1, "n_particles must be >= 1")?;
        check(
            self.sigma_diag.iter().all(|s| s.is_finite() && *s >= 0.0),
            "sigma_diag components must be finite and >= 0",
        )?;
        check(self.sigma_color > 0.0, "sigma_color must be > 0")?;
        check(self.sigma_texture > 0.0, "sigma_texture must be > 0")?;
        check(self.alpha > 0.0 && self.alpha < 1.0, "alpha must lie in (0,1)")?;
        check(
            self.slump_threshold > 0.0 && self.slump_threshold < 1.0,
            "slump_threshold must lie in (0,1)",
        )?;
        check(
            self.ess_fraction > 0.0 && self.ess_fraction <= 1.0,
            "ess_fraction must lie in (0,1]",
        )?;
        Ok(())
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::InvalidValue {
        key: key.into(),
        value: value.into(),
        reason: "not a valid number".into(),
    })
}
