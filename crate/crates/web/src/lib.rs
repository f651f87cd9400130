//! Browser bindings for the demo page. Everything crosses the boundary as
//! JSON text so the page needs no generated type glue beyond strings.

use delta_ineq::calculus::delta_derivative;
use delta_ineq::harness::{sharpness_search, FixedTrial, SharpnessConfig, SharpnessResult};
use delta_ineq::ostrowski::{self, KernelMoments};
use delta_ineq::{BoundVariant, KernelSpec, Theorem};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Debug, Serialize)]
pub struct KernelPoint {
    pub t: f64,
    pub p: f64,
    /// Graininess at `t`; 0 on a real interval.
    pub mu: f64,
}

#[derive(Debug, Serialize)]
pub struct KernelProfile {
    pub discrete: bool,
    pub a: f64,
    pub b: f64,
    pub x: f64,
    pub points: Vec<KernelPoint>,
    pub moments: KernelMoments,
}

#[derive(Debug, Serialize)]
pub struct BoundLine {
    pub theorem: &'static str,
    pub variant: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct BoundTable {
    pub identity_lhs: f64,
    pub identity_rhs: f64,
    pub moments: KernelMoments,
    pub range: (f64, f64),
    pub bounds: Vec<BoundLine>,
}

#[derive(Debug, Serialize)]
pub struct WitnessPoint {
    pub t: f64,
    pub p: f64,
    pub derivative: f64,
}

#[derive(Debug, Serialize)]
pub struct SharpnessView {
    pub theorem: &'static str,
    pub best_ratio: f64,
    pub max_ratio_seen: f64,
    pub iterations: usize,
    pub violation: bool,
    pub accepted: Vec<f64>,
    pub witness: Vec<WitnessPoint>,
}

fn err(e: impl ToString) -> String {
    e.to_string()
}

fn to_json(v: &impl Serialize) -> Result<String, String> {
    serde_json::to_string(v).map_err(err)
}

/// `P(x, t)` over `[a, b)`: every scale point on discrete scales, `samples`
/// evenly spaced points (plus `x`) on a real interval.
#[wasm_bindgen]
pub fn kernel_profile(spec_json: &str, samples: usize) -> Result<String, String> {
    let spec = KernelSpec::from_json(spec_json).map_err(err)?;
    let ts = spec.scale();
    let (a, b, x) = (spec.a(), spec.b(), spec.x());
    let mut points = Vec::new();
    if ts.is_discrete() {
        for t in ts.grid_points(a, b).map_err(err)? {
            points.push(KernelPoint { t, p: ostrowski::kernel_p(&spec, t).map_err(err)?, mu: ts.mu(t).map_err(err)? });
        }
    } else {
        let n = samples.max(2);
        let mut grid: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
        grid.push(x);
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        for t in grid.into_iter().filter(|&t| t < b) {
            points.push(KernelPoint { t, p: ostrowski::kernel_p(&spec, t).map_err(err)?, mu: 0.0 });
        }
    }
    let moments = ostrowski::kernel_moments(&spec, 0.0).map_err(err)?;
    to_json(&KernelProfile { discrete: ts.is_discrete(), a, b, x, points, moments })
}

/// Both variants of every bound for one trial (`g` defaults to `f`).
#[wasm_bindgen]
pub fn evaluate_bounds(trial_json: &str, tol: f64) -> Result<String, String> {
    let trial: FixedTrial = serde_json::from_str(trial_json).map_err(err)?;
    let FixedTrial { spec, f, g, range } = trial;
    let range = match range {
        Some(r) => r,
        None => ostrowski::delta_derivative_range(spec.scale(), &f, spec.a(), spec.b()).map_err(err)?,
    };
    let g = g.unwrap_or_else(|| f.clone());
    let mut bounds = Vec::new();
    for variant in [BoundVariant::PaperLiteral, BoundVariant::Corrected] {
        for r in ostrowski::evaluate_all(&spec, &f, &g, Some(range), variant).map_err(err)? {
            bounds.push(BoundLine {
                theorem: r.theorem.label(),
                variant: variant.label(),
                lhs: r.lhs,
                rhs: r.rhs,
                slack: r.slack,
                pass: r.holds(tol),
            });
        }
    }
    to_json(&BoundTable {
        identity_lhs: ostrowski::montgomery_lhs(&spec, &f).map_err(err)?,
        identity_rhs: ostrowski::montgomery_rhs(&spec, &f).map_err(err)?,
        moments: ostrowski::kernel_moments(&spec, 0.0).map_err(err)?,
        range,
        bounds,
    })
}

/// Runs the sharpness search and returns the ratio trajectory with the
/// witness `f^Delta` next to `P` at every point of `[a, b)`.
#[wasm_bindgen]
pub fn sharpness(theorem: &str, spec_json: &str, seed: u32, iterations: usize) -> Result<String, String> {
    let theorem = Theorem::parse(theorem).ok_or_else(|| format!("unknown theorem '{theorem}'"))?;
    let spec = KernelSpec::from_json(spec_json).map_err(err)?;
    let config = SharpnessConfig { seed: seed.into(), max_iterations: iterations, ..SharpnessConfig::default() };
    let r: SharpnessResult = sharpness_search(theorem, &spec, &config).map_err(err)?;
    let ts = spec.scale();
    let mut witness = Vec::new();
    for t in ts.grid_points(spec.a(), spec.b()).map_err(err)? {
        witness.push(WitnessPoint {
            t,
            p: ostrowski::kernel_p(&spec, t).map_err(err)?,
            derivative: delta_derivative(ts, &r.f, t).map_err(err)?,
        });
    }
    to_json(&SharpnessView {
        theorem: theorem.label(),
        best_ratio: r.best_ratio,
        max_ratio_seen: r.max_ratio_seen,
        iterations: r.iterations,
        violation: r.violation,
        accepted: r.accepted,
        witness,
    })
}
