//! The identity, bound and cross-check suites.

use super::config::{ScaleFamily, TrialConfig};
use super::generate::{draw_trial, gen_scale_of, gen_trial_on, Trial};
use super::report::{Row, SuiteReport, Witness, CHAIN_CHECK, GRUSS_CHECK};
use super::rng::trial_rng;
use crate::calculus::{parts_terms, product_rule_terms};
use crate::error::Result;
use crate::ostrowski::{
    self, bound_t7, closed_form_rhs, delta_derivative_range, gruss_variance_check, korkine_check, montgomery_terms,
    BoundVariant, Family, SpecSummary, T7Kind,
};

/// Relative tolerance for the closed-form cross-check.
pub const CROSSCHECK_RTOL: f64 = 1e-12;

/// One check inside a trial, before aggregation.
struct Check {
    name: String,
    variant: Option<BoundVariant>,
    lhs: f64,
    rhs: f64,
    pass: bool,
    range: Option<(f64, f64)>,
}

impl Check {
    /// Two sides of an identity, compared at `tol * scale`.
    fn identity(name: &str, lhs: f64, rhs: f64, tol: f64, scale: f64) -> Check {
        Check { name: name.into(), variant: None, lhs, rhs, pass: (rhs - lhs).abs() <= tol * scale, range: None }
    }
}

struct TrialResult {
    idx: u64,
    trial: Trial,
    checks: Vec<Check>,
}

#[cfg(feature = "parallel")]
fn map_trials<T: Send>(n: usize, f: impl Fn(u64) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    use rayon::prelude::*;
    (0..n as u64).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_trials<T: Send>(n: usize, f: impl Fn(u64) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    (0..n as u64).map(f).collect()
}

#[cfg(not(target_arch = "wasm32"))]
fn timed<T>(run: impl FnOnce() -> T) -> (T, u64) {
    let start = std::time::Instant::now();
    let out = run();
    (out, start.elapsed().as_millis() as u64)
}

#[cfg(target_arch = "wasm32")]
fn timed<T>(run: impl FnOnce() -> T) -> (T, u64) {
    (run(), 0)
}

fn assemble(name: &str, config: &TrialConfig, results: Vec<TrialResult>) -> SuiteReport {
    let mut report = SuiteReport::new(name, config.seed, config.n_trials, config.tolerance);
    for TrialResult { idx, trial, checks } in results {
        let summary = SpecSummary::from(&trial.spec);
        for c in checks {
            let row = Row {
                trial_id: idx,
                theorem: c.name.clone(),
                variant: c.variant,
                spec: summary.clone(),
                lhs: c.lhs,
                rhs: c.rhs,
                slack: c.rhs - c.lhs,
                pass: c.pass,
            };
            report.push(row, || Witness {
                seed: config.seed,
                trial: idx,
                theorem: c.name,
                variant: c.variant,
                spec: trial.spec.clone(),
                f: trial.f.clone(),
                g: Some(trial.g.clone()),
                range: c.range,
                lhs: c.lhs,
                rhs: c.rhs,
                slack: c.rhs - c.lhs,
            });
        }
    }
    report.finish();
    report
}

fn identity_checks(trial: &Trial, tol: f64) -> Result<Vec<Check>> {
    let Trial { spec, f, g, .. } = trial;
    let ts = spec.scale();
    let (a, b) = (spec.a(), spec.b());
    let mut checks = Vec::new();

    let lhs = ostrowski::montgomery_lhs(spec, f)?;
    let rhs = montgomery_terms(spec, f)?.rhs();
    checks.push(Check::identity("identity", lhs, rhs, tol, 1f64.max(lhs.abs())));

    let parts = parts_terms(ts, f, g, a, b)?;
    checks.push(Check::identity("parts", parts.integral, parts.boundary - parts.correction, tol, parts.scale()));

    // every right-scattered point of [a, b) on discrete scales, x on the reals
    let points = if ts.is_discrete() { ts.grid_points(a, b)? } else { vec![spec.x()] };
    let worst = points
        .iter()
        .map(|&t| product_rule_terms(ts, f, g, t))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max_by(|p, q| (p.residual().abs() / p.scale()).total_cmp(&(q.residual().abs() / q.scale())))
        .expect("at least one point");
    checks.push(Check::identity("product_rule", worst.product_derivative, worst.expansion, tol, worst.scale()));

    if ts.is_discrete() {
        let k = korkine_check(spec, f)?;
        let c = k.chebyshev;
        checks.push(Check::identity("korkine", c.single, c.double, tol, c.magnitude));
        let v = k.variance;
        checks.push(Check::identity("korkine_variance", v.single, v.double, tol, v.magnitude));
    }

    let (gamma, big_gamma) = delta_derivative_range(ts, f, a, b)?;
    let gr = gruss_variance_check(ts, f, a, b, gamma, big_gamma)?;
    checks.push(Check {
        name: GRUSS_CHECK.into(),
        variant: None,
        lhs: gr.variance,
        rhs: gr.bound,
        pass: gr.holds,
        range: Some((gamma, big_gamma)),
    });

    if let Some(family) = Family::of(ts) {
        checks.push(crosscheck(trial, family)?);
    }
    Ok(checks)
}

fn crosscheck(trial: &Trial, family: Family) -> Result<Check> {
    let terms = montgomery_terms(&trial.spec, &trial.f)?;
    let engine = terms.rhs();
    let closed = closed_form_rhs(&trial.spec, &trial.f, family)?;
    let spec = &trial.spec;
    let ab = terms.weight_sum;
    let mut scale = 1f64.max((terms.fx * terms.bracket / ab).abs());
    if spec.alpha() != 0.0 {
        scale = scale.max((spec.alpha() / (spec.x() - spec.a()) * terms.left_integral / ab).abs());
    }
    if spec.beta() != 0.0 {
        scale = scale.max((spec.beta() / (spec.b() - spec.x()) * terms.right_integral / ab).abs());
    }
    Ok(Check::identity(&format!("specialization-{}", family.label()), engine, closed, CROSSCHECK_RTOL, scale))
}

/// Identity exactness, integration by parts, product rule, Korkine forms,
/// the Gruss variance step and the closed-form specializations.
pub fn run_identity_suite(config: &TrialConfig) -> Result<SuiteReport> {
    config.validate()?;
    let (results, ms) = timed(|| {
        map_trials(config.n_trials, |idx| {
            let trial = draw_trial(config, idx)?;
            let checks = identity_checks(&trial, config.tolerance)?;
            Ok(TrialResult { idx, trial, checks })
        })
    });
    let mut report = assemble("identity", config, results?);
    report.wall_time_ms = ms;
    Ok(report)
}

fn bound_checks(trial: &Trial, config: &TrialConfig) -> Result<Vec<Check>> {
    let Trial { spec, f, g, range } = trial;
    let range = match range {
        Some(r) => *r,
        None => delta_derivative_range(spec.scale(), f, spec.a(), spec.b())?,
    };
    let mut checks = Vec::new();
    for &variant in &config.variants {
        for r in ostrowski::evaluate_all(spec, f, g, Some(range), variant)? {
            checks.push(Check {
                name: r.theorem.label().into(),
                variant: Some(variant),
                lhs: r.lhs,
                rhs: r.rhs,
                pass: r.holds(config.tolerance),
                range: r.theorem.needs_range().then_some(range),
            });
        }
    }
    let (gamma, big_gamma) = range;
    let l2 = bound_t7(spec, f, T7Kind::L2, BoundVariant::Corrected)?;
    let gr = bound_t7(spec, f, T7Kind::Gruss { gamma, big_gamma }, BoundVariant::Corrected)?;
    let scale = 1f64.max(l2.rhs.abs()).max(gr.rhs.abs());
    checks.push(Check {
        name: CHAIN_CHECK.into(),
        variant: None,
        lhs: l2.rhs,
        rhs: gr.rhs,
        pass: l2.rhs <= gr.rhs + config.tolerance * scale,
        range: Some(range),
    });
    Ok(checks)
}

/// Every theorem in every configured variant, plus the T7 chain.
/// Corrected violations are failures; literal violations are findings.
pub fn run_bound_suite(config: &TrialConfig) -> Result<SuiteReport> {
    config.validate()?;
    let (results, ms) = timed(|| {
        map_trials(config.n_trials, |idx| {
            let trial = draw_trial(config, idx)?;
            let checks = bound_checks(&trial, config)?;
            Ok(TrialResult { idx, trial, checks })
        })
    });
    let mut report = assemble("bounds", config, results?);
    report.wall_time_ms = ms;
    Ok(report)
}

const CROSSCHECK_FAMILIES: [(ScaleFamily, Family); 3] =
    [(ScaleFamily::Integer, Family::Z), (ScaleFamily::QLattice, Family::Q), (ScaleFamily::Real, Family::R)];

/// Generic engine against the closed forms, `n_trials` per configured
/// family among integer, q-lattice and real. Trial ids are
/// `3 * trial + family index`.
pub fn run_crosscheck_suite(config: &TrialConfig) -> Result<SuiteReport> {
    config.validate()?;
    let families: Vec<(usize, ScaleFamily, Family)> = CROSSCHECK_FAMILIES
        .iter()
        .enumerate()
        .filter(|(_, (sf, _))| config.scale_families.contains(sf))
        .map(|(i, &(sf, f))| (i, sf, f))
        .collect();
    let (results, ms) = timed(|| {
        map_trials(config.n_trials * CROSSCHECK_FAMILIES.len(), |id| {
            let slot = id as usize % 3;
            let Some(&(_, sf, family)) = families.iter().find(|(i, _, _)| *i == slot) else {
                return Ok(None);
            };
            let mut rng = trial_rng(config.seed, id);
            let ts = gen_scale_of(&mut rng, sf, config);
            let trial = gen_trial_on(&mut rng, ts, config)?;
            let check = crosscheck(&trial, family)?;
            Ok(Some(TrialResult { idx: id, trial, checks: vec![check] }))
        })
    });
    let results: Vec<TrialResult> = results?.into_iter().flatten().collect();
    let mut report = assemble("crosscheck", config, results);
    report.wall_time_ms = ms;
    Ok(report)
}
