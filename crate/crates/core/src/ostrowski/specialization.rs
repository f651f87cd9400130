//! Closed forms of the identity on the integers, q-lattices and the reals,
//! evaluated without the generic Delta-calculus, plus the reduction to the
//! classical weighted Ostrowski bound.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use super::bounds::{bound_t5, BoundReport, BoundVariant, Theorem};
use super::kernel::{kernel_derivative_bound, kernel_moments, weighted_integral, KernelSpec};
use crate::calculus::{self, h_monomial, Func, Polynomial};
use crate::error::{Error, Result};
use crate::timescale::{ScaleKind, TimeScale};

/// Minimum Gauss-Legendre order used on the real line.
const MIN_QUADRATURE_ORDER: usize = 16;
/// Tolerance for the reduction's internal equalities.
const REDUCTION_RTOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Z,
    Q,
    R,
}

impl Family {
    pub fn of(ts: &TimeScale) -> Option<Family> {
        match ts.kind() {
            ScaleKind::Integer { .. } => Some(Family::Z),
            ScaleKind::QLattice { .. } => Some(Family::Q),
            ScaleKind::Real { .. } => Some(Family::R),
            ScaleKind::Grid { .. } => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Family::Z => "Z",
            Family::Q => "Q",
            Family::R => "R",
        }
    }
}

/// Assembles the right side from the two weighted sums.
fn assemble(spec: &KernelSpec, fx: f64, hx: f64, ha: f64, hb: f64, left: f64, right: f64) -> f64 {
    let (a, b, x) = (spec.a(), spec.b(), spec.x());
    let (alpha, beta) = (spec.alpha(), spec.beta());
    let mut bracket = 0.0;
    let mut means = 0.0;
    if alpha != 0.0 {
        bracket += alpha * (hx - ha) / (x - a);
        means += alpha / (x - a) * left;
    }
    if beta != 0.0 {
        bracket += beta * (hb - hx) / (b - x);
        means += beta / (b - x) * right;
    }
    let ab = alpha + beta;
    fx / ab * bracket - means / ab
}

/// `sum_{t=lo}^{hi-1} f(t+1) (h(t+1) - h(t))`.
fn integer_sum(f: &Func, h: &Func, lo: i64, hi: i64) -> Result<f64> {
    let mut acc = 0.0;
    for t in lo..hi {
        let (t0, t1) = (t as f64, (t + 1) as f64);
        acc += f.eval(t1)? * (h.eval(t1)? - h.eval(t0)?);
    }
    Ok(acc)
}

/// Jackson sum `int_{q^klo}^{q^khi} D_q h(tau) f(q tau) d_q tau`
/// `= sum_k (q-1) q^k D_q h(q^k) f(q^{k+1})`.
fn jackson_sum(f: &Func, h: &Func, q: f64, klo: i32, khi: i32) -> Result<f64> {
    let mut acc = 0.0;
    for k in klo..khi {
        let tau = q.powi(k);
        let next = q.powi(k + 1);
        let dq_h = (h.eval(next)? - h.eval(tau)?) / ((q - 1.0) * tau);
        acc += (q - 1.0) * tau * dq_h * f.eval(next)?;
    }
    Ok(acc)
}

fn quadrature(rule: &GaussLegendre, p: &Polynomial, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        return 0.0;
    }
    rule.integrate(lo, hi, |t| p.eval(t))
}

/// Right side of the identity from the family's own formula.
///
/// - `Z`: plain sums `sum f(t+1) Delta h(t)` over `[a, x)` and `[x, b)`;
/// - `Q`: Jackson sums with the q-derivative of `h`;
/// - `R`: Gauss-Legendre quadrature of `h' f`, exact for the polynomial degrees involved.
pub fn closed_form_rhs(spec: &KernelSpec, f: &Func, family: Family) -> Result<f64> {
    if Family::of(spec.scale()) != Some(family) {
        return Err(Error::FamilyMismatch(family.label()));
    }
    let (a, b, x) = (spec.a(), spec.b(), spec.x());
    let h = spec.h();
    let (left, right) = match spec.scale().kind() {
        ScaleKind::Integer { .. } => {
            let (ai, bi, xi) = (a as i64, b as i64, x as i64);
            (integer_sum(f, h, ai, xi)?, integer_sum(f, h, xi, bi)?)
        }
        ScaleKind::QLattice { q, .. } => {
            let ts = spec.scale();
            let (ka, kb, kx) = (ts.q_exponent_of(a)?, ts.q_exponent_of(b)?, ts.q_exponent_of(x)?);
            (jackson_sum(f, h, *q, ka, kx)?, jackson_sum(f, h, *q, kx, kb)?)
        }
        ScaleKind::Real { .. } => {
            let integrand = &h.require_polynomial()?.derivative() * f.require_polynomial()?;
            let order = MIN_QUADRATURE_ORDER.max(integrand.degree() / 2 + 1);
            let rule = GaussLegendre::new(NonZeroUsize::new(order).expect("order is positive"));
            (quadrature(&rule, &integrand, a, x), quadrature(&rule, &integrand, x, b))
        }
        ScaleKind::Grid { .. } => unreachable!("family check excludes grids"),
    };
    Ok(assemble(spec, f.eval(x)?, h.eval(x)?, h.eval(a)?, h.eval(b)?, left, right))
}

/// The reduction with `alpha = x - a`, `beta = b - x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    /// T5 instance with lhs
    /// `|(h(b)-h(a))/(b-a) f(x) - (1/(b-a)) int h^Delta f(sigma)|` and rhs
    /// `M/(b-a) * bracket`.
    pub report: BoundReport,
    /// `int_a^x |h(t)-h(a)| Delta t + int_x^b |h(b)-h(t)| Delta t`.
    pub bracket: f64,
    /// `M int |P|` for the same spec.
    pub kernel_rhs: f64,
    /// `h_2(x, a) + h_2(x, b)`; present when `h(t) = t`.
    pub monomial_bracket: Option<f64>,
    /// Reduced lhs minus the generic T5 lhs.
    pub lhs_residual: f64,
    /// Reduced rhs minus `M int |P|`.
    pub rhs_residual: f64,
    /// `bracket - monomial_bracket`, when present.
    pub monomial_residual: Option<f64>,
}

impl ReductionReport {
    /// Whether every internal equality holds within `rtol` relative.
    pub fn consistent(&self, rtol: f64) -> bool {
        let scale = 1f64.max(self.report.lhs.abs()).max(self.report.rhs.abs()).max(self.bracket.abs());
        let ok = |r: f64| r.abs() <= rtol * scale;
        ok(self.lhs_residual) && ok(self.rhs_residual) && self.monomial_residual.is_none_or(ok)
    }
}

fn is_identity(ts: &TimeScale, h: &Func, a: f64, b: f64) -> Result<bool> {
    if let Some(p) = h.as_polynomial() {
        return Ok(*p == Polynomial::identity());
    }
    if !ts.is_discrete() {
        return Ok(false);
    }
    let (ia, ib) = ts.index_range(a, b)?;
    for i in ia..=ib {
        let t = ts.point(i);
        if h.eval(t)? != t {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `int_lo^hi |g(t)| Delta t` for `g = sign * (h(t) - h(anchor))`.
fn abs_branch(ts: &TimeScale, h: &Func, anchor: f64, lo: f64, hi: f64) -> Result<f64> {
    if lo >= hi {
        return Ok(0.0);
    }
    let h_anchor = calculus::eval(ts, h, anchor)?;
    if ts.is_discrete() {
        let mut acc = 0.0;
        for (t, _, mu) in ts.steps(lo, hi)? {
            acc += mu * (h.eval(t)? - h_anchor).abs();
        }
        return Ok(acc);
    }
    let shifted = h.require_polynomial()? - &Polynomial::constant(h_anchor);
    Ok(shifted.abs_integral(lo, hi))
}

/// Reduces the kernel bound to the classical weighted Ostrowski inequality
/// and checks the reduction's internal equalities.
pub fn reduction_weighted_ostrowski(
    ts: &TimeScale,
    f: &Func,
    h: &Func,
    a: f64,
    b: f64,
    x: f64,
) -> Result<ReductionReport> {
    let (a, b, x) = (ts.canonical(a)?, ts.canonical(b)?, ts.canonical(x)?);
    if !(a < x && x < b) {
        return Err(Error::InvalidSpec(format!("reduction needs a < x < b, got {a}, {x}, {b}")));
    }
    let spec = KernelSpec::new(ts.clone(), a, b, x, x - a, b - x, h.clone())?;
    let len = b - a;
    let hb_ha = calculus::eval(ts, h, b)? - calculus::eval(ts, h, a)?;
    let mean = weighted_integral(&spec, f, a, b)? / len;
    let lhs = (hb_ha / len * calculus::eval(ts, f, x)? - mean).abs();

    let bracket = abs_branch(ts, h, a, a, x)? + abs_branch(ts, h, b, x, b)?;
    let m = kernel_derivative_bound(&spec, f)?;
    let rhs = m / len * bracket;
    let kernel_rhs = m * kernel_moments(&spec, 0.0)?.int_abs_p;
    let generic = bound_t5(&spec, f, BoundVariant::Corrected)?;

    let monomial_bracket =
        if is_identity(ts, h, a, b)? { Some(h_monomial(ts, 2, x, a)? + h_monomial(ts, 2, x, b)?) } else { None };
    Ok(ReductionReport {
        report: BoundReport::new(Theorem::T5, BoundVariant::Corrected, lhs, rhs, &spec),
        bracket,
        kernel_rhs,
        monomial_bracket,
        lhs_residual: lhs - generic.lhs,
        rhs_residual: rhs - kernel_rhs,
        monomial_residual: monomial_bracket.map(|mb| bracket - mb),
    })
}

/// Runs the reduction and raises `IdentityMismatch` if it is inconsistent.
pub fn checked_reduction(ts: &TimeScale, f: &Func, h: &Func, a: f64, b: f64, x: f64) -> Result<ReductionReport> {
    let r = reduction_weighted_ostrowski(ts, f, h, a, b, x)?;
    if !r.consistent(REDUCTION_RTOL) {
        return Err(Error::IdentityMismatch(format!(
            "reduction residuals lhs {}, rhs {}, monomial {:?}",
            r.lhs_residual, r.rhs_residual, r.monomial_residual
        )));
    }
    Ok(r)
}
