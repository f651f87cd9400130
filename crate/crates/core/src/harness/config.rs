//! Trial configuration, read from JSON with defaults for every field.

use serde::{Deserialize, Serialize};

use crate::calculus::Func;
use crate::error::{Error, Result};
use crate::ostrowski::{BoundVariant, KernelSpec};
use crate::timescale::TimeScale;

/// Which time-scale kinds a suite draws from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScaleFamily {
    Grid,
    Integer,
    #[serde(rename = "qlattice")]
    QLattice,
    Real,
}

/// How random functions are drawn.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FuncFamily {
    /// Independent uniform values on `[-range, range]` at every scale point.
    Sampled { range: f64 },
    /// Uniform degree in `0..=max_degree`, coefficients uniform on
    /// `[-coeff_range, coeff_range]`.
    Polynomial { max_degree: usize, coeff_range: f64 },
}

impl FuncFamily {
    fn validate(&self, what: &str) -> Result<()> {
        let ok = match self {
            FuncFamily::Sampled { range } => range.is_finite() && *range > 0.0,
            FuncFamily::Polynomial { coeff_range, .. } => coeff_range.is_finite() && *coeff_range > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("{what}: range must be positive and finite")))
        }
    }
}

/// One fully specified trial, used instead of random draws.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedTrial {
    pub spec: KernelSpec,
    pub f: Func,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Func>,
    /// `(gamma, Gamma)`; defaults to the extrema of `f^Delta`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub n_trials: usize,
    #[serde(default = "default_families")]
    pub scale_families: Vec<ScaleFamily>,
    /// Inclusive `(min, max)` number of scale points.
    #[serde(default = "default_grid_size")]
    pub grid_size: (usize, usize),
    #[serde(default = "default_func_family")]
    pub func_family: FuncFamily,
    #[serde(default = "default_func_family")]
    pub weight_family: FuncFamily,
    /// Used for `f`, `g` and `h` on real intervals, where tables cannot be sampled.
    #[serde(default = "default_real_family")]
    pub real_family: FuncFamily,
    #[serde(default = "default_variants")]
    pub variants: Vec<BoundVariant>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Replaces the random scale draw.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_scale: Option<TimeScale>,
    /// Replaces the whole random draw.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_trial: Option<FixedTrial>,
}

fn default_trials() -> usize {
    100
}

fn default_families() -> Vec<ScaleFamily> {
    vec![ScaleFamily::Grid, ScaleFamily::Integer, ScaleFamily::QLattice]
}

fn default_grid_size() -> (usize, usize) {
    (3, 32)
}

fn default_func_family() -> FuncFamily {
    FuncFamily::Sampled { range: 10.0 }
}

fn default_real_family() -> FuncFamily {
    FuncFamily::Polynomial { max_degree: 5, coeff_range: 2.0 }
}

fn default_variants() -> Vec<BoundVariant> {
    vec![BoundVariant::PaperLiteral, BoundVariant::Corrected]
}

fn default_tolerance() -> f64 {
    1e-10
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            seed: 0,
            n_trials: default_trials(),
            scale_families: default_families(),
            grid_size: default_grid_size(),
            func_family: default_func_family(),
            weight_family: default_func_family(),
            real_family: default_real_family(),
            variants: default_variants(),
            tolerance: default_tolerance(),
            fixed_scale: None,
            fixed_trial: None,
        }
    }
}

impl TrialConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: TrialConfig = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.n_trials == 0 {
            return bad("n_trials must be at least 1");
        }
        if self.scale_families.is_empty() && self.fixed_scale.is_none() && self.fixed_trial.is_none() {
            return bad("scale_families is empty");
        }
        let (lo, hi) = self.grid_size;
        if lo < 3 || hi < lo {
            return bad("grid_size must satisfy 3 <= min <= max");
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return bad("tolerance must be positive");
        }
        if self.variants.is_empty() {
            return bad("variants is empty");
        }
        if let Some(ts) = &self.fixed_scale {
            if ts.is_discrete() && ts.len() < 3 {
                return bad("fixed_scale needs at least three points");
            }
        }
        if !matches!(self.real_family, FuncFamily::Polynomial { .. }) {
            return bad("real_family must be polynomial");
        }
        self.func_family.validate("func_family")?;
        self.weight_family.validate("weight_family")?;
        self.real_family.validate("real_family")
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_trials(mut self, n: usize) -> Self {
        self.n_trials = n;
        self
    }

    pub fn with_families(mut self, families: Vec<ScaleFamily>) -> Self {
        self.scale_families = families;
        self
    }
}
