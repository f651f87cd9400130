//! Coordinate ascent on `lhs / rhs` for one corrected bound.
//!
//! The search variables are the values of `f^Delta` at the points of
//! `[a, b)` plus the offset `f(a)` (and the same for `g` on T6a/T6b). A
//! table is rebuilt from them by `f(sigma(t)) = f(t) + mu(t) f^Delta(t)`.
//! Working on `f^Delta` rather than on raw samples lets a single move change
//! one derivative value without disturbing its neighbour.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::rng::{trial_rng, TrialRng};
use crate::calculus::{Func, SampledFunc};
use crate::error::{Error, Result};
use crate::ostrowski::{self, BoundVariant, KernelSpec, Theorem};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharpnessConfig {
    #[serde(default)]
    pub seed: u64,
    /// Candidate evaluations allowed after the initial draw.
    #[serde(default = "default_iterations")]
    pub max_iterations: usize,
    #[serde(default = "default_initial_step")]
    pub initial_step: f64,
    #[serde(default = "default_min_step")]
    pub min_step: f64,
    /// Initial `f^Delta` values are uniform on `[-value_range, value_range]`.
    #[serde(default = "default_value_range")]
    pub value_range: f64,
    /// Fixed `(gamma, Gamma)` for T7-Gruss and T8; candidates leaving it are
    /// rejected. Without it the observed extrema of `f^Delta` are used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<(f64, f64)>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_iterations() -> usize {
    5000
}

fn default_initial_step() -> f64 {
    0.5
}

fn default_min_step() -> f64 {
    1e-6
}

fn default_value_range() -> f64 {
    1.0
}

fn default_tolerance() -> f64 {
    1e-10
}

impl Default for SharpnessConfig {
    fn default() -> Self {
        SharpnessConfig {
            seed: 0,
            max_iterations: default_iterations(),
            initial_step: default_initial_step(),
            min_step: default_min_step(),
            value_range: default_value_range(),
            range: None,
            tolerance: default_tolerance(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpnessResult {
    pub theorem: Theorem,
    pub best_ratio: f64,
    /// Largest ratio among all evaluated candidates, accepted or not.
    pub max_ratio_seen: f64,
    /// Ratio after the initial draw and after every accepted move.
    pub accepted: Vec<f64>,
    pub spec: KernelSpec,
    pub f: Func,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Func>,
    pub iterations: usize,
    /// Some candidate exceeded `1 + tolerance`: the corrected bound failed.
    pub violation: bool,
}

/// Values of `f^Delta` on `[a, b)` plus `f(a)`.
#[derive(Clone, Debug)]
struct Coords {
    offset: f64,
    slopes: Vec<f64>,
}

impl Coords {
    fn len(&self) -> usize {
        self.slopes.len() + 1
    }

    fn get(&self, i: usize) -> f64 {
        if i == 0 {
            self.offset
        } else {
            self.slopes[i - 1]
        }
    }

    fn set(&mut self, i: usize, v: f64) {
        if i == 0 {
            self.offset = v;
        } else {
            self.slopes[i - 1] = v;
        }
    }

    fn to_func(&self, points: &[f64]) -> Result<Func> {
        let mut values = Vec::with_capacity(points.len());
        let mut acc = self.offset;
        values.push(acc);
        for (w, d) in points.windows(2).zip(&self.slopes) {
            acc += (w[1] - w[0]) * d;
            values.push(acc);
        }
        Ok(Func::Sampled(SampledFunc::from_points(points, &values)?))
    }
}

struct Search<'a> {
    theorem: Theorem,
    spec: &'a KernelSpec,
    points: Vec<f64>,
    range: Option<(f64, f64)>,
}

impl Search<'_> {
    fn ratio(&self, f: &Coords, g: Option<&Coords>) -> Result<Option<f64>> {
        if let Some((lo, hi)) = self.range {
            if f.slopes.iter().any(|&d| d < lo || d > hi) {
                return Ok(None);
            }
        }
        let ff = f.to_func(&self.points)?;
        let gf = g.map(|g| g.to_func(&self.points)).transpose()?;
        let range = match self.range {
            Some(r) => r,
            None => ostrowski::delta_derivative_range(self.spec.scale(), &ff, self.spec.a(), self.spec.b())?,
        };
        let r = ostrowski::evaluate(self.theorem, self.spec, &ff, gf.as_ref(), Some(range), BoundVariant::Corrected)?;
        Ok(Some(ratio(r.lhs, r.rhs)))
    }

    fn draw(&self, rng: &mut TrialRng, value_range: f64) -> Coords {
        let (lo, hi) = self.range.unwrap_or((-value_range, value_range));
        let slopes = (0..self.points.len() - 1).map(|_| if lo < hi { rng.random_range(lo..=hi) } else { lo }).collect();
        Coords { offset: rng.random_range(-value_range..=value_range), slopes }
    }
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        lhs / rhs
    } else if lhs <= f64::EPSILON {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Maximizes `lhs / rhs` of the corrected `theorem` over sampled `f` (and
/// `g`) on the discrete scale of `spec`. Each candidate costs one
/// iteration; the step halves after a sweep without improvement and the
/// search stops once it would drop below `min_step`.
pub fn sharpness_search(theorem: Theorem, spec: &KernelSpec, config: &SharpnessConfig) -> Result<SharpnessResult> {
    let ts = spec.scale();
    if !ts.is_discrete() {
        return Err(Error::UnsupportedTheorem(format!("{} search needs a discrete scale", theorem.label())));
    }
    let range = if theorem.needs_range() { config.range } else { None };
    if let Some((lo, hi)) = range {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidBounds(format!("Gamma = {hi} < gamma = {lo}")));
        }
    }
    let (ia, ib) = ts.index_range(spec.a(), spec.b())?;
    let search = Search { theorem, spec, points: (ia..=ib).map(|i| ts.point(i)).collect(), range };

    let mut rng = trial_rng(config.seed, 0);
    let mut f = search.draw(&mut rng, config.value_range);
    let mut g = theorem.needs_g().then(|| search.draw(&mut rng, config.value_range));
    let mut best = search.ratio(&f, g.as_ref())?.expect("initial draw respects the range");
    let mut accepted = vec![best];
    let mut max_seen = best;
    let mut iterations = 0;
    let mut step = config.initial_step;

    'outer: while step >= config.min_step {
        let mut improved = false;
        let n_f = f.len();
        let n_total = n_f + g.as_ref().map_or(0, Coords::len);
        for coord in 0..n_total {
            for dir in [1.0, -1.0] {
                if iterations >= config.max_iterations {
                    break 'outer;
                }
                iterations += 1;
                let (mut cf, mut cg) = (f.clone(), g.clone());
                let target = if coord < n_f { &mut cf } else { cg.as_mut().expect("g coordinates exist") };
                let i = if coord < n_f { coord } else { coord - n_f };
                target.set(i, target.get(i) + dir * step);
                let Some(r) = search.ratio(&cf, cg.as_ref())? else { continue };
                max_seen = max_seen.max(r);
                if r > best {
                    best = r;
                    accepted.push(r);
                    f = cf;
                    g = cg;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    Ok(SharpnessResult {
        theorem,
        best_ratio: best,
        max_ratio_seen: max_seen,
        accepted,
        spec: spec.clone(),
        f: f.to_func(&search.points)?,
        g: g.map(|g| g.to_func(&search.points)).transpose()?,
        iterations,
        violation: max_seen > 1.0 + config.tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timescale::TimeScale;

    fn spec(n: i64) -> KernelSpec {
        KernelSpec::new(
            TimeScale::integer(0, n).unwrap(),
            0.0,
            n as f64,
            (n / 2) as f64,
            1.0,
            1.0,
            Func::poly(vec![0.0, 1.0]),
        )
        .unwrap()
    }

    #[test]
    fn t5_reaches_one() {
        let r = sharpness_search(Theorem::T5, &spec(4), &SharpnessConfig::default()).unwrap();
        assert!(r.best_ratio > 0.99, "{}", r.best_ratio);
        assert!(!r.violation);
        assert!(r.accepted.windows(2).all(|w| w[0] <= w[1]));
        // maximizer: f^Delta = M sign(P) on t = 1, 2, 3
        let m = ostrowski::sup_abs_delta_derivative(r.spec.scale(), &r.f, 0.0, 4.0).unwrap();
        for (t, sign) in [(1.0, 1.0), (2.0, -1.0), (3.0, -1.0)] {
            let d = crate::calculus::delta_derivative(r.spec.scale(), &r.f, t).unwrap();
            assert!((d - sign * m).abs() < 1e-2 * m, "t={t}: {d} vs {m}");
        }
    }

    #[test]
    fn zero_budget_returns_initial() {
        let cfg = SharpnessConfig { max_iterations: 0, ..SharpnessConfig::default() };
        let r = sharpness_search(Theorem::T5, &spec(4), &cfg).unwrap();
        assert_eq!(r.iterations, 0);
        assert_eq!(r.accepted, vec![r.best_ratio]);
    }

    #[test]
    fn t8_fixed_range_never_violates() {
        let cfg = SharpnessConfig { range: Some((-2.0, 2.0)), max_iterations: 2000, ..SharpnessConfig::default() };
        let r = sharpness_search(Theorem::T8, &spec(6), &cfg).unwrap();
        assert!(!r.violation && r.max_ratio_seen <= 1.0 + 1e-10);
        let (lo, hi) = ostrowski::delta_derivative_range(r.spec.scale(), &r.f, 0.0, 6.0).unwrap();
        assert!(lo >= -2.0 && hi <= 2.0);
    }

    #[test]
    fn t6_searches_both_functions() {
        let cfg = SharpnessConfig { max_iterations: 500, ..SharpnessConfig::default() };
        let r = sharpness_search(Theorem::T6b, &spec(4), &cfg).unwrap();
        assert!(r.g.is_some() && !r.violation);
    }

    #[test]
    fn continuous_scale_rejected() {
        let s =
            KernelSpec::new(TimeScale::real(0.0, 1.0).unwrap(), 0.0, 1.0, 0.5, 1.0, 1.0, Func::poly(vec![0.0, 1.0]))
                .unwrap();
        assert!(matches!(
            sharpness_search(Theorem::T5, &s, &SharpnessConfig::default()),
            Err(Error::UnsupportedTheorem(_))
        ));
    }
}
