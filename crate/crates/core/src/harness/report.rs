//! Suite reports: per-check aggregates, flat rows and replayable witnesses.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::calculus::Func;
use crate::error::{Error, Result};
use crate::ostrowski::{self, BoundVariant, KernelSpec, SpecSummary, T7Kind, Theorem};

/// Tally for one check (a theorem/variant pair or an identity).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub trials: usize,
    pub passes: usize,
    pub violations: usize,
    /// Smallest `rhs - lhs` seen (bound checks).
    pub min_slack: Option<f64>,
    /// Largest `|lhs - rhs|` seen (identity checks).
    pub max_abs_residual: Option<f64>,
}

impl Aggregate {
    fn record(&mut self, row: &Row) {
        self.trials += 1;
        if row.pass {
            self.passes += 1;
        } else {
            self.violations += 1;
        }
        if row.is_bound() {
            self.min_slack = Some(self.min_slack.map_or(row.slack, |m| m.min(row.slack)));
        } else {
            let r = row.slack.abs();
            self.max_abs_residual = Some(self.max_abs_residual.map_or(r, |m| m.max(r)));
        }
    }
}

/// One evaluated check. Bound rows hold `slack = rhs - lhs`; identity rows
/// hold the two sides of the identity and their difference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub trial_id: u64,
    pub theorem: String,
    pub variant: Option<BoundVariant>,
    pub spec: SpecSummary,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

impl Row {
    pub fn is_bound(&self) -> bool {
        Theorem::parse(&self.theorem).is_some() || self.theorem == CHAIN_CHECK || self.theorem == GRUSS_CHECK
    }

    pub fn key(&self) -> String {
        match self.variant {
            Some(v) => format!("{}/{}", self.theorem, v.label()),
            None => self.theorem.clone(),
        }
    }
}

/// Name of the `rhs(L2) <= rhs(Gruss)` check.
pub const CHAIN_CHECK: &str = "T7-chain";
/// `var(f^Delta) <= (Gamma - gamma)^2 / 4`.
pub const GRUSS_CHECK: &str = "gruss";

/// Everything needed to rerun a violating check on its own.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub seed: u64,
    pub trial: u64,
    pub theorem: String,
    pub variant: Option<BoundVariant>,
    pub spec: KernelSpec,
    pub f: Func,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Func>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<(f64, f64)>,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

impl Witness {
    /// Recomputes `(lhs, rhs)` through the evaluators, independent of the suite.
    pub fn replay(&self) -> Result<(f64, f64)> {
        if let Some(theorem) = Theorem::parse(&self.theorem) {
            let variant = self.variant.unwrap_or(BoundVariant::Corrected);
            let r = ostrowski::evaluate(theorem, &self.spec, &self.f, self.g.as_ref(), self.range, variant)?;
            return Ok((r.lhs, r.rhs));
        }
        match self.theorem.as_str() {
            "identity" => {
                Ok((ostrowski::montgomery_lhs(&self.spec, &self.f)?, ostrowski::montgomery_rhs(&self.spec, &self.f)?))
            }
            CHAIN_CHECK => {
                let (gamma, big_gamma) = self.range.ok_or_else(|| Error::InvalidBounds("missing range".into()))?;
                let v = self.variant.unwrap_or(BoundVariant::Corrected);
                let l2 = ostrowski::bound_t7(&self.spec, &self.f, T7Kind::L2, v)?;
                let gr = ostrowski::bound_t7(&self.spec, &self.f, T7Kind::Gruss { gamma, big_gamma }, v)?;
                Ok((l2.rhs, gr.rhs))
            }
            GRUSS_CHECK => {
                let (gamma, big_gamma) = self.range.ok_or_else(|| Error::InvalidBounds("missing range".into()))?;
                let s = &self.spec;
                let gr = ostrowski::gruss_variance_check(s.scale(), &self.f, s.a(), s.b(), gamma, big_gamma)?;
                Ok((gr.variance, gr.bound))
            }
            other => Err(Error::UnsupportedTheorem(format!("no standalone replay for {other}"))),
        }
    }

    /// Recomputed `rhs - lhs`.
    pub fn replay_slack(&self) -> Result<f64> {
        let (lhs, rhs) = self.replay()?;
        Ok(rhs - lhs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    /// Only literal-variant violations.
    Findings,
    /// At least one check that must hold did not.
    Failure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub n_trials: usize,
    pub tolerance: f64,
    pub aggregates: BTreeMap<String, Aggregate>,
    pub failures: Vec<Witness>,
    pub findings: Vec<Witness>,
    pub rows: Vec<Row>,
    pub wall_time_ms: u64,
    pub outcome: Outcome,
}

impl SuiteReport {
    pub(crate) fn new(suite: &str, seed: u64, n_trials: usize, tolerance: f64) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            seed,
            n_trials,
            tolerance,
            aggregates: BTreeMap::new(),
            failures: Vec::new(),
            findings: Vec::new(),
            rows: Vec::new(),
            wall_time_ms: 0,
            outcome: Outcome::Pass,
        }
    }

    pub(crate) fn push(&mut self, row: Row, witness: impl FnOnce() -> Witness) {
        self.aggregates.entry(row.key()).or_default().record(&row);
        if !row.pass {
            let w = witness();
            if row.variant == Some(BoundVariant::PaperLiteral) {
                self.findings.push(w);
            } else {
                self.failures.push(w);
            }
        }
        self.rows.push(row);
    }

    pub(crate) fn finish(&mut self) {
        self.outcome = if !self.failures.is_empty() {
            Outcome::Failure
        } else if !self.findings.is_empty() {
            Outcome::Findings
        } else {
            Outcome::Pass
        };
    }

    pub fn total_violations(&self) -> usize {
        self.aggregates.values().map(|a| a.violations).sum()
    }

    /// The largest `max_abs_residual` across identity checks whose key
    /// starts with `prefix`.
    pub fn max_residual(&self, prefix: &str) -> f64 {
        self.aggregates
            .iter()
            .filter(|(k, _)| k.starts_with(prefix))
            .filter_map(|(_, a)| a.max_abs_residual)
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }
}
