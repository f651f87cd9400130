//! The weighted two-mean kernel `P(x, t)` and the Montgomery identity it
//! satisfies:
//!
//! ```text
//! int_a^b P(x,t) f^Delta(t) Delta t
//!   = f(x)/(alpha+beta) * B
//!     - 1/(alpha+beta) * [ alpha/(x-a) int_a^x h^Delta f(sigma)
//!                        + beta/(b-x) int_x^b h^Delta f(sigma) ]
//! B = alpha (h(x)-h(a))/(x-a) + beta (h(b)-h(x))/(b-x)
//! ```

use serde::{Deserialize, Serialize};

use crate::calculus::{self, delta_derivative, delta_sum, real_integral, Func, Polynomial};
use crate::error::{Error, Result};
use crate::timescale::TimeScale;

/// Kernel parameters `(scale, a, b, x, alpha, beta, h)`.
///
/// Endpoint placements of `x` are only accepted when the branch they would
/// divide by zero carries a zero weight: `x = a` needs `alpha = 0`, and
/// `x = b` needs `beta = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawKernelSpec", into = "RawKernelSpec")]
pub struct KernelSpec {
    scale: TimeScale,
    a: f64,
    b: f64,
    x: f64,
    alpha: f64,
    beta: f64,
    h: Func,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawKernelSpec {
    pub scale: TimeScale,
    pub a: f64,
    pub b: f64,
    pub x: f64,
    pub alpha: f64,
    pub beta: f64,
    pub h: Func,
}

impl TryFrom<RawKernelSpec> for KernelSpec {
    type Error = Error;

    fn try_from(r: RawKernelSpec) -> Result<Self> {
        KernelSpec::new(r.scale, r.a, r.b, r.x, r.alpha, r.beta, r.h)
    }
}

impl From<KernelSpec> for RawKernelSpec {
    fn from(s: KernelSpec) -> Self {
        RawKernelSpec { scale: s.scale, a: s.a, b: s.b, x: s.x, alpha: s.alpha, beta: s.beta, h: s.h }
    }
}

impl KernelSpec {
    pub fn new(scale: TimeScale, a: f64, b: f64, x: f64, alpha: f64, beta: f64, h: Func) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        let a = scale.canonical(a)?;
        let b = scale.canonical(b)?;
        let x = scale.canonical(x)?;
        if a >= b {
            return bad(format!("a = {a} must be below b = {b}"));
        }
        if !(alpha.is_finite() && beta.is_finite()) || alpha < 0.0 || beta < 0.0 {
            return bad(format!("weights must be finite and nonnegative: alpha={alpha}, beta={beta}"));
        }
        if alpha + beta <= 0.0 {
            return bad("alpha and beta cannot both vanish".into());
        }
        let interior = a < x && x < b;
        let left_end = x == a && alpha == 0.0;
        let right_end = x == b && beta == 0.0;
        if !(interior || left_end || right_end) {
            return bad(format!("x = {x} is not admissible for [{a}, {b}] with alpha={alpha}, beta={beta}"));
        }
        if scale.is_discrete() {
            let (ia, ib) = scale.index_range(a, b)?;
            for i in ia..=ib {
                h.eval(scale.point(i))?;
            }
        } else {
            h.require_polynomial()?;
        }
        Ok(Self { scale, a, b, x, alpha, beta, h })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: RawKernelSpec = serde_json::from_str(s).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        raw.try_into()
    }

    pub fn scale(&self) -> &TimeScale {
        &self.scale
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn x(&self) -> f64 {
        self.x
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn h(&self) -> &Func {
        &self.h
    }

    /// Same kernel with new weights.
    pub fn with_weights(&self, alpha: f64, beta: f64) -> Result<Self> {
        Self::new(self.scale.clone(), self.a, self.b, self.x, alpha, beta, self.h.clone())
    }

    pub fn weight_sum(&self) -> f64 {
        self.alpha + self.beta
    }

    pub(crate) fn left_active(&self) -> bool {
        self.alpha > 0.0 && self.x > self.a
    }

    pub(crate) fn right_active(&self) -> bool {
        self.beta > 0.0 && self.x < self.b
    }

    /// `b - a`, the Delta-measure of `[a, b)`.
    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    /// `alpha (h(x)-h(a))/(x-a) + beta (h(b)-h(x))/(b-x)`, zero-weight terms dropped.
    pub fn bracket(&self) -> Result<f64> {
        let (ha, hb, hx) = (self.h.eval(self.a)?, self.h.eval(self.b)?, self.h.eval(self.x)?);
        let mut out = 0.0;
        if self.left_active() {
            out += self.alpha * (hx - ha) / (self.x - self.a);
        }
        if self.right_active() {
            out += self.beta * (hb - hx) / (self.b - self.x);
        }
        Ok(out)
    }

    /// Left and right kernel branches as polynomials (real interval only).
    pub(crate) fn branch_polys(&self) -> Result<(Polynomial, Polynomial)> {
        let h = self.h.require_polynomial()?;
        let ab = self.weight_sum();
        let left = if self.left_active() {
            (h - &Polynomial::constant(h.eval(self.a))).scale(self.alpha / ab / (self.x - self.a))
        } else {
            Polynomial::constant(0.0)
        };
        let right = if self.right_active() {
            (h - &Polynomial::constant(h.eval(self.b))).scale(self.beta / ab / (self.b - self.x))
        } else {
            Polynomial::constant(0.0)
        };
        Ok((left, right))
    }
}

/// `P(x, t)` for `t` in `[a, b)`.
pub fn kernel_p(spec: &KernelSpec, t: f64) -> Result<f64> {
    let t = spec.scale.canonical(t)?;
    if t < spec.a || t >= spec.b {
        return Err(Error::OutOfRange { t, a: spec.a, b: spec.b });
    }
    let ab = spec.weight_sum();
    if t < spec.x {
        if spec.alpha == 0.0 {
            return Ok(0.0);
        }
        Ok(spec.alpha / ab * ((spec.h.eval(t)? - spec.h.eval(spec.a)?) / (spec.x - spec.a)))
    } else {
        if spec.beta == 0.0 {
            return Ok(0.0);
        }
        Ok(-spec.beta / ab * ((spec.h.eval(spec.b)? - spec.h.eval(t)?) / (spec.b - spec.x)))
    }
}

/// Delta-integrals of `P`, `|P|` and `P^2` over `[a, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelMoments {
    pub int_p: f64,
    pub int_abs_p: f64,
    pub int_p2: f64,
}

pub fn kernel_moments(spec: &KernelSpec, _tol: f64) -> Result<KernelMoments> {
    let ts = &spec.scale;
    if ts.is_discrete() {
        let mut m = KernelMoments { int_p: 0.0, int_abs_p: 0.0, int_p2: 0.0 };
        for (t, _, mu) in ts.steps(spec.a, spec.b)? {
            let p = kernel_p(spec, t)?;
            m.int_p += mu * p;
            m.int_abs_p += mu * p.abs();
            m.int_p2 += mu * p * p;
        }
        return Ok(m);
    }
    let (left, right) = spec.branch_polys()?;
    let (a, x, b) = (spec.a, spec.x, spec.b);
    Ok(KernelMoments {
        int_p: left.integrate(a, x) + right.integrate(x, b),
        int_abs_p: left.abs_integral(a, x) + right.abs_integral(x, b),
        int_p2: (&left * &left).integrate(a, x) + (&right * &right).integrate(x, b),
    })
}

/// `int_a^b P(x,t) f^Delta(t) Delta t`.
pub fn montgomery_lhs(spec: &KernelSpec, f: &Func) -> Result<f64> {
    let ts = &spec.scale;
    if ts.is_discrete() {
        return delta_sum(ts, spec.a, spec.b, |t, _, mu| Ok(mu * kernel_p(spec, t)? * delta_derivative(ts, f, t)?));
    }
    let df = f.require_polynomial()?.derivative();
    let (left, right) = spec.branch_polys()?;
    Ok((&left * &df).integrate(spec.a, spec.x) + (&right * &df).integrate(spec.x, spec.b))
}

/// `int_lo^hi h^Delta(t) f(sigma(t)) Delta t`.
pub(crate) fn weighted_integral(spec: &KernelSpec, f: &Func, lo: f64, hi: f64) -> Result<f64> {
    let ts = &spec.scale;
    if ts.is_discrete() {
        delta_sum(ts, lo, hi, |t, s, mu| Ok(mu * delta_derivative(ts, &spec.h, t)? * f.eval(s)?))
    } else {
        let hp = spec.h.require_polynomial()?.derivative();
        real_integral(ts, &(&hp * f.require_polynomial()?), lo, hi)
    }
}

/// The pieces of the identity's right side for one function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MontgomeryTerms {
    /// `f(x)`
    pub fx: f64,
    /// `alpha (h(x)-h(a))/(x-a) + beta (h(b)-h(x))/(b-x)`
    pub bracket: f64,
    /// `int_a^x h^Delta f(sigma)`
    pub left_integral: f64,
    /// `int_x^b h^Delta f(sigma)`
    pub right_integral: f64,
    /// `alpha/(x-a) * left_integral + beta/(b-x) * right_integral`
    pub means: f64,
    pub weight_sum: f64,
}

impl MontgomeryTerms {
    /// `f(x) B/(alpha+beta) - means/(alpha+beta)`.
    pub fn rhs(&self) -> f64 {
        self.fx / self.weight_sum * self.bracket - self.means / self.weight_sum
    }
}

pub fn montgomery_terms(spec: &KernelSpec, f: &Func) -> Result<MontgomeryTerms> {
    let (a, b, x) = (spec.a, spec.b, spec.x);
    let fx = calculus::eval(&spec.scale, f, x)?;
    let mut left_integral = 0.0;
    let mut right_integral = 0.0;
    let mut means = 0.0;
    if spec.left_active() {
        left_integral = weighted_integral(spec, f, a, x)?;
        means += spec.alpha / (x - a) * left_integral;
    }
    if spec.right_active() {
        right_integral = weighted_integral(spec, f, x, b)?;
        means += spec.beta / (b - x) * right_integral;
    }
    Ok(MontgomeryTerms {
        fx,
        bracket: spec.bracket()?,
        left_integral,
        right_integral,
        means,
        weight_sum: spec.weight_sum(),
    })
}

/// Right side of the weighted Montgomery identity.
pub fn montgomery_rhs(spec: &KernelSpec, f: &Func) -> Result<f64> {
    montgomery_terms(spec, f).map(|m| m.rhs())
}

/// `montgomery_lhs - montgomery_rhs`; vanishes up to rounding.
pub fn identity_residual(spec: &KernelSpec, f: &Func) -> Result<f64> {
    Ok(montgomery_lhs(spec, f)? - montgomery_rhs(spec, f)?)
}

/// `sup |f^Delta(t)|` over the open interval `(a, b)`.
///
/// Discrete scales: exact maximum over scale points strictly between `a`
/// and `b` (0 when there are none). Real interval: maximum of `|f'|` over
/// `[a, b]` from the polynomial's critical points.
pub fn sup_abs_delta_derivative(ts: &TimeScale, f: &Func, a: f64, b: f64) -> Result<f64> {
    if ts.is_discrete() {
        let mut m: f64 = 0.0;
        for (t, _, _) in ts.steps(a, b)? {
            if t > a {
                m = m.max(delta_derivative(ts, f, t)?.abs());
            }
        }
        return Ok(m);
    }
    ts.canonical(a)?;
    ts.canonical(b)?;
    if a >= b {
        return Err(Error::EmptyRange { a, b });
    }
    Ok(f.require_polynomial()?.derivative().max_abs_on(a, b))
}

/// `(min, max)` of `f^Delta` over `[a, b)` (discrete) or `[a, b]` (real).
pub fn delta_derivative_range(ts: &TimeScale, f: &Func, a: f64, b: f64) -> Result<(f64, f64)> {
    if ts.is_discrete() {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (t, _, _) in ts.steps(a, b)? {
            let d = delta_derivative(ts, f, t)?;
            lo = lo.min(d);
            hi = hi.max(d);
        }
        return Ok((lo, hi));
    }
    ts.canonical(a)?;
    ts.canonical(b)?;
    if a >= b {
        return Err(Error::EmptyRange { a, b });
    }
    Ok(f.require_polynomial()?.derivative().min_max_on(a, b))
}

/// The derivative bound used by the kernel bounds: `sup_{(a,b)} |f^Delta|`,
/// widened by `|f^Delta(a)|` on discrete scales when `x = a` (the only case
/// where the kernel is nonzero at `a`).
pub(crate) fn kernel_derivative_bound(spec: &KernelSpec, f: &Func) -> Result<f64> {
    let ts = &spec.scale;
    let m = sup_abs_delta_derivative(ts, f, spec.a, spec.b)?;
    if ts.is_discrete() && spec.x == spec.a {
        return Ok(m.max(delta_derivative(ts, f, spec.a)?.abs()));
    }
    Ok(m)
}
