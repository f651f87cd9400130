//! Numerical checks of the identities used to derive the perturbed bounds.
//!
//! The Chebyshev functional
//! `T(u, v) = (1/L) int u v - ((1/L) int u)((1/L) int v)` over `[a, b)`,
//! `L = b - a`, has the Korkine double-sum form
//! `T(u, v) = 1/(2 L^2) sum_t sum_s (u_t - u_s)(v_t - v_s) mu_t mu_s`.
//! On discrete scales both sides are finite sums, so they can be compared
//! directly.

use serde::{Deserialize, Serialize};

use super::bounds::{check_range, derivative_variance};
use super::kernel::{kernel_p, KernelSpec};
use crate::calculus::{delta_derivative, Func};
use crate::error::{Error, Result};
use crate::timescale::TimeScale;

/// Tolerance for `variance <= ((Gamma - gamma)/2)^2`.
const GRUSS_ATOL: f64 = 1e-12;

/// Single-sum and double-sum evaluations of one Chebyshev functional.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevForms {
    pub single: f64,
    pub double: f64,
    /// Magnitude of the largest term entering either side.
    pub magnitude: f64,
}

impl ChebyshevForms {
    pub fn residual(&self) -> f64 {
        self.single - self.double
    }
}

/// Korkine check for `T(P, f^Delta)` and for the kernel variance `T(P, P)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KorkineCheck {
    pub chebyshev: ChebyshevForms,
    pub variance: ChebyshevForms,
}

impl KorkineCheck {
    /// The residual of larger magnitude.
    pub fn residual(&self) -> f64 {
        let (c, v) = (self.chebyshev.residual(), self.variance.residual());
        if c.abs() >= v.abs() {
            c
        } else {
            v
        }
    }

    pub fn magnitude(&self) -> f64 {
        self.chebyshev.magnitude.max(self.variance.magnitude)
    }
}

fn chebyshev_forms(len: f64, mu: &[f64], u: &[f64], v: &[f64]) -> ChebyshevForms {
    let int_uv: f64 = (0..mu.len()).map(|i| mu[i] * u[i] * v[i]).sum();
    let int_u: f64 = (0..mu.len()).map(|i| mu[i] * u[i]).sum();
    let int_v: f64 = (0..mu.len()).map(|i| mu[i] * v[i]).sum();
    let single = int_uv / len - (int_u / len) * (int_v / len);
    let mut acc = 0.0;
    for i in 0..mu.len() {
        for j in 0..mu.len() {
            acc += (u[i] - u[j]) * (v[i] - v[j]) * mu[i] * mu[j];
        }
    }
    let double = acc / (2.0 * len * len);
    let magnitude = 1f64.max((int_uv / len).abs()).max((int_u / len * int_v / len).abs());
    ChebyshevForms { single, double, magnitude }
}

/// Evaluates both Korkine forms. Discrete scales only.
pub fn korkine_check(spec: &KernelSpec, f: &Func) -> Result<KorkineCheck> {
    let ts = spec.scale();
    if !ts.is_discrete() {
        return Err(Error::ContinuousScale);
    }
    let steps = ts.steps(spec.a(), spec.b())?;
    let mut mu = Vec::with_capacity(steps.len());
    let mut p = Vec::with_capacity(steps.len());
    let mut df = Vec::with_capacity(steps.len());
    for &(t, _, m) in &steps {
        mu.push(m);
        p.push(kernel_p(spec, t)?);
        df.push(delta_derivative(ts, f, t)?);
    }
    let len = spec.length();
    Ok(KorkineCheck { chebyshev: chebyshev_forms(len, &mu, &p, &df), variance: chebyshev_forms(len, &mu, &p, &p) })
}

/// Single-sum minus double-sum form; the larger of the two checks.
pub fn korkine_residual(spec: &KernelSpec, f: &Func) -> Result<f64> {
    korkine_check(spec, f).map(|k| k.residual())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrussCheck {
    /// `(1/(b-a)) int (f^Delta)^2 - ((f(b)-f(a))/(b-a))^2`
    pub variance: f64,
    /// `((Gamma - gamma)/2)^2`
    pub bound: f64,
    pub holds: bool,
}

/// Variance of `f^Delta` against the range bound, given
/// `gamma <= f^Delta <= Gamma`.
pub fn gruss_variance_check(
    ts: &TimeScale,
    f: &Func,
    a: f64,
    b: f64,
    gamma: f64,
    big_gamma: f64,
) -> Result<GrussCheck> {
    check_range(ts, f, a, b, gamma, big_gamma)?;
    let variance = derivative_variance(ts, f, a, b)?;
    let bound = ((big_gamma - gamma) / 2.0).powi(2);
    Ok(GrussCheck { variance, bound, holds: variance <= bound + GRUSS_ATOL * bound.max(1.0) })
}
