//! Random scales, functions and kernel specs.

use rand::Rng;

use super::config::{FuncFamily, ScaleFamily, TrialConfig};
use super::rng::{trial_rng, TrialRng};
use crate::calculus::{Func, SampledFunc};
use crate::error::{Error, Result};
use crate::ostrowski::KernelSpec;
use crate::timescale::TimeScale;

/// Random grid points are drawn from `[-GRID_SPAN, GRID_SPAN]`.
const GRID_SPAN: f64 = 5.0;
/// Upper end of the `alpha`, `beta` draw.
const WEIGHT_MAX: f64 = 5.0;
/// Probability of forcing one weight to zero.
const DEGENERATE_WEIGHT_PROB: f64 = 0.1;

/// One drawn instance: a spec, the function under test and a partner `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trial {
    pub spec: KernelSpec,
    pub f: Func,
    pub g: Func,
    /// Fixed `(gamma, Gamma)`, when the trial was supplied rather than drawn.
    pub range: Option<(f64, f64)>,
}

fn point_count(rng: &mut TrialRng, config: &TrialConfig) -> usize {
    let (lo, hi) = config.grid_size;
    rng.random_range(lo..=hi)
}

/// Draws a scale of the given family.
pub fn gen_scale_of(rng: &mut TrialRng, family: ScaleFamily, config: &TrialConfig) -> TimeScale {
    let n = point_count(rng, config);
    let ts = match family {
        ScaleFamily::Grid => loop {
            let mut pts: Vec<f64> = (0..n).map(|_| rng.random_range(-GRID_SPAN..GRID_SPAN)).collect();
            pts.sort_by(f64::total_cmp);
            if pts.windows(2).all(|w| w[0] < w[1]) {
                break TimeScale::grid(pts);
            }
        },
        ScaleFamily::Integer => {
            let lo = rng.random_range(-10..=10i64);
            TimeScale::integer(lo, lo + n as i64 - 1)
        }
        ScaleFamily::QLattice => {
            let q = 3.0 - 2.0 * rng.random::<f64>();
            let kmin = rng.random_range(-3..=3i32);
            TimeScale::qlattice(q, kmin, kmin + n as i32 - 1)
        }
        ScaleFamily::Real => {
            let lo = rng.random_range(-2.0..1.0);
            TimeScale::real(lo, lo + rng.random_range(0.5..3.0))
        }
    };
    ts.expect("generated scale parameters are valid")
}

/// Draws a scale from the configured families, or returns the fixed one.
pub fn gen_random_scale(rng: &mut TrialRng, config: &TrialConfig) -> TimeScale {
    if let Some(ts) = &config.fixed_scale {
        return ts.clone();
    }
    let family = config.scale_families[rng.random_range(0..config.scale_families.len())];
    gen_scale_of(rng, family, config)
}

/// Draws a function on `ts`. Sampled tables cover every scale point.
pub fn gen_random_func(rng: &mut TrialRng, ts: &TimeScale, family: &FuncFamily) -> Result<Func> {
    match *family {
        FuncFamily::Sampled { range } => {
            if !ts.is_discrete() {
                return Err(Error::Config("sampled functions need a discrete scale".into()));
            }
            let pts: Vec<f64> = (0..ts.len()).map(|i| ts.point(i)).collect();
            let vals: Vec<f64> = pts.iter().map(|_| rng.random_range(-range..=range)).collect();
            Ok(Func::Sampled(SampledFunc::from_points(&pts, &vals)?))
        }
        FuncFamily::Polynomial { max_degree, coeff_range } => {
            let degree = rng.random_range(0..=max_degree);
            Ok(Func::poly((0..=degree).map(|_| rng.random_range(-coeff_range..=coeff_range)).collect()))
        }
    }
}

/// `(alpha, beta)` uniform on `[0, 5]^2` minus the origin; with probability
/// 0.1 one of them is forced to zero. The flag reports which, if any.
fn gen_weights(rng: &mut TrialRng) -> (f64, f64, Option<bool>) {
    if rng.random_bool(DEGENERATE_WEIGHT_PROB) {
        let w = loop {
            let w = rng.random_range(0.0..=WEIGHT_MAX);
            if w > 0.0 {
                break w;
            }
        };
        return if rng.random_bool(0.5) { (0.0, w, Some(true)) } else { (w, 0.0, Some(false)) };
    }
    loop {
        let (alpha, beta) = (rng.random_range(0.0..=WEIGHT_MAX), rng.random_range(0.0..=WEIGHT_MAX));
        if alpha + beta > 0.0 {
            return (alpha, beta, None);
        }
    }
}

/// `x` uniform over interior points; with a zero weight, `x` moves to the
/// matching endpoint half of the time.
fn gen_x(rng: &mut TrialRng, ts: &TimeScale, zero_alpha: Option<bool>) -> f64 {
    let (a, b) = (ts.min(), ts.max());
    let to_end = zero_alpha.is_some() && rng.random_bool(0.5);
    match zero_alpha {
        Some(true) if to_end => return a,
        Some(false) if to_end => return b,
        _ => {}
    }
    if ts.is_discrete() {
        ts.point(rng.random_range(1..ts.len() - 1))
    } else {
        loop {
            let x = rng.random_range(a..b);
            if x > a {
                return x;
            }
        }
    }
}

/// Draws a complete spec with `h`, `f` and `g` on the given scale.
pub fn gen_trial_on(rng: &mut TrialRng, ts: TimeScale, config: &TrialConfig) -> Result<Trial> {
    let (alpha, beta, zero_alpha) = gen_weights(rng);
    let x = gen_x(rng, &ts, zero_alpha);
    let (wf, ff) = if ts.is_discrete() {
        (&config.weight_family, &config.func_family)
    } else {
        (&config.real_family, &config.real_family)
    };
    let h = gen_random_func(rng, &ts, wf)?;
    let f = gen_random_func(rng, &ts, ff)?;
    let g = gen_random_func(rng, &ts, ff)?;
    let (a, b) = (ts.min(), ts.max());
    let spec = KernelSpec::new(ts, a, b, x, alpha, beta, h)?;
    Ok(Trial { spec, f, g, range: None })
}

/// The trial with index `idx`: fixed when configured, otherwise drawn from
/// the stream `(seed, idx)`.
pub fn draw_trial(config: &TrialConfig, idx: u64) -> Result<Trial> {
    if let Some(fixed) = &config.fixed_trial {
        return Ok(Trial {
            spec: fixed.spec.clone(),
            f: fixed.f.clone(),
            g: fixed.g.clone().unwrap_or_else(|| fixed.f.clone()),
            range: fixed.range,
        });
    }
    let mut rng = trial_rng(config.seed, idx);
    let ts = gen_random_scale(&mut rng, config);
    gen_trial_on(&mut rng, ts, config)
}
