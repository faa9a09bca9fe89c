use std::path::{Path, PathBuf};

use fracid_fem::{CutoffSpec, Domain, InitialCondition};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Initial datum: one of the four named presets or an explicit bump sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Initial {
    Preset(InitialCondition),
    Custom { custom: CutoffSpec },
}

impl Initial {
    pub fn id(&self) -> &'static str {
        match self {
            Initial::Preset(p) => p.id(),
            Initial::Custom { .. } => "custom",
        }
    }

    pub fn spec(&self) -> CutoffSpec {
        match self {
            Initial::Preset(p) => p.spec(),
            Initial::Custom { custom } => custom.clone(),
        }
    }
}

/// `count_per_axis` values per axis, log-spaced from `10^log_min` to `10^log_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaGrid {
    pub log_min: f64,
    pub log_max: f64,
    pub count_per_axis: usize,
}

impl Default for LambdaGrid {
    fn default() -> Self {
        Self {
            log_min: -1.0,
            log_max: 0.0,
            count_per_axis: 10,
        }
    }
}

impl LambdaGrid {
    pub fn values(&self) -> Vec<f64> {
        let last = (self.count_per_axis - 1) as f64;
        (0..self.count_per_axis)
            .map(|i| {
                // hit both ends exactly
                let e = if i == 0 {
                    self.log_min
                } else if i + 1 == self.count_per_axis {
                    self.log_max
                } else {
                    self.log_min + (self.log_max - self.log_min) * i as f64 / last
                };
                10f64.powf(e)
            })
            .collect()
    }
}

fn default_alphas() -> Vec<f64> {
    vec![0.25, 0.75, 1.0]
}
fn default_t_end() -> f64 {
    0.04
}
fn default_dt() -> f64 {
    4e-4
}
fn default_h() -> f64 {
    0.05
}
fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Defaults to the domain a preset initial datum belongs to.
    #[serde(default)]
    pub domain: Option<Domain>,
    pub initial: Initial,
    #[serde(default = "default_alphas")]
    pub alphas: Vec<f64>,
    #[serde(default)]
    pub lambda_grid: LambdaGrid,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_h")]
    pub target_h: f64,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    /// Full-scale campaign defaults for one preset.
    pub fn preset(initial: InitialCondition) -> Self {
        Self {
            domain: None,
            initial: Initial::Preset(initial),
            alphas: default_alphas(),
            lambda_grid: LambdaGrid::default(),
            t_end: default_t_end(),
            dt: default_dt(),
            target_h: default_h(),
            output_dir: default_output(),
        }
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        let config: Self = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn domain(&self) -> Result<Domain, CliError> {
        match (&self.domain, &self.initial) {
            (Some(d), _) => Ok(d.clone()),
            (None, Initial::Preset(p)) => Ok(p.domain()),
            (None, Initial::Custom { .. }) => Err(CliError::Config("a custom initial datum needs an explicit domain".into())),
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: &str| Err(CliError::Config(m.into()));
        self.domain()?.validate()?;
        if self.alphas.is_empty() {
            return bad("alphas is empty");
        }
        if self.alphas.iter().any(|a| !(*a > 0.0 && *a <= 1.0)) {
            return bad("alphas must lie in (0, 1]");
        }
        let g = &self.lambda_grid;
        if g.count_per_axis < 2 {
            return bad("lambda_grid.count_per_axis must be at least 2");
        }
        if !(g.log_min.is_finite() && g.log_max.is_finite() && g.log_min < g.log_max) {
            return bad("lambda_grid needs finite log_min < log_max");
        }
        for (name, v) in [("t_end", self.t_end), ("dt", self.dt), ("target_h", self.target_h)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("{name} must be positive")));
            }
        }
        if self.t_end < self.dt {
            return bad("t_end must be at least dt");
        }
        Ok(())
    }
}
