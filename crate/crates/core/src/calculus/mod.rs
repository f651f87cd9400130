//! Delta calculus over a [`TimeScale`].
//!
//! On discrete scales every integral is a finite `mu`-weighted sum, evaluated
//! exactly up to float rounding. On a real interval only polynomials are
//! accepted, and integrals go through closed-form antiderivatives.

mod poly;

pub use poly::{Polynomial, ROOT_BISECT_TOL, ROOT_SCAN_CELLS};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timescale::TimeScale;

const SAMPLE_MATCH_RTOL: f64 = 1e-12;

/// A function sampled on the points of a discrete scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSampled", into = "RawSampled")]
pub struct SampledFunc {
    table: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct RawSampled {
    table: Vec<(f64, f64)>,
}

impl TryFrom<RawSampled> for SampledFunc {
    type Error = Error;

    fn try_from(raw: RawSampled) -> Result<Self> {
        SampledFunc::new(raw.table)
    }
}

impl From<SampledFunc> for RawSampled {
    fn from(f: SampledFunc) -> Self {
        RawSampled { table: f.table }
    }
}

impl SampledFunc {
    pub fn new(mut table: Vec<(f64, f64)>) -> Result<Self> {
        if table.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
            return Err(Error::InvalidFunc("non-finite sample".into()));
        }
        table.sort_by(|a, b| a.0.total_cmp(&b.0));
        if table.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidFunc("duplicate sample point".into()));
        }
        Ok(Self { table })
    }

    /// Samples `values[i]` at the `i`-th point of `points`.
    pub fn from_points(points: &[f64], values: &[f64]) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::InvalidFunc("points and values differ in length".into()));
        }
        Self::new(points.iter().copied().zip(values.iter().copied()).collect())
    }

    pub fn table(&self) -> &[(f64, f64)] {
        &self.table
    }

    pub fn get(&self, t: f64) -> Option<f64> {
        let tol = SAMPLE_MATCH_RTOL * t.abs().max(1.0);
        let i = self.table.partition_point(|(p, _)| *p < t - tol);
        self.table.get(i).filter(|(p, _)| (p - t).abs() <= tol).map(|(_, v)| *v)
    }
}

/// A function on a time scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "repr")]
pub enum Func {
    #[serde(rename = "poly")]
    Polynomial(Polynomial),
    #[serde(rename = "sampled")]
    Sampled(SampledFunc),
}

impl Func {
    pub fn poly(coeffs: Vec<f64>) -> Self {
        Func::Polynomial(Polynomial::new(coeffs))
    }

    pub fn sampled(table: Vec<(f64, f64)>) -> Result<Self> {
        SampledFunc::new(table).map(Func::Sampled)
    }

    /// Samples `f` on every point of a discrete scale.
    pub fn tabulate(ts: &TimeScale, f: impl Fn(f64) -> f64) -> Result<Self> {
        if !ts.is_discrete() {
            return Err(Error::ContinuousScale);
        }
        Self::sampled((0..ts.len()).map(|i| ts.point(i)).map(|t| (t, f(t))).collect())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidFunc(e.to_string()))
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        match self {
            Func::Polynomial(p) => Ok(p.eval(t)),
            Func::Sampled(s) => s.get(t).ok_or(Error::MissingSample(t)),
        }
    }

    pub fn as_polynomial(&self) -> Option<&Polynomial> {
        match self {
            Func::Polynomial(p) => Some(p),
            Func::Sampled(_) => None,
        }
    }

    /// The polynomial form, or `ContinuousScale` for sampled functions.
    pub(crate) fn require_polynomial(&self) -> Result<&Polynomial> {
        self.as_polynomial().ok_or(Error::ContinuousScale)
    }
}

/// `f(t)` after checking `t` belongs to the scale.
pub fn eval(ts: &TimeScale, f: &Func, t: f64) -> Result<f64> {
    f.eval(ts.canonical(t)?)
}

/// `f(sigma(t))`.
pub fn eval_sigma(ts: &TimeScale, f: &Func, t: f64) -> Result<f64> {
    f.eval(ts.sigma(t)?)
}

pub fn delta_derivative(ts: &TimeScale, f: &Func, t: f64) -> Result<f64> {
    let t = ts.canonical(t)?;
    let mu = ts.mu(t)?;
    if mu > 0.0 {
        let s = ts.sigma(t)?;
        return Ok((f.eval(s)? - f.eval(t)?) / mu);
    }
    if ts.is_discrete() {
        // only the maximum of a discrete scale has mu = 0
        return Err(Error::NotInKappa(t));
    }
    match f {
        Func::Polynomial(p) => Ok(p.derivative().eval(t)),
        Func::Sampled(_) => Err(Error::DensePointSampledFunc(t)),
    }
}

/// Oriented Delta-sum over a discrete scale: `sum_{t in [a,b)} integrand(t, sigma(t), mu(t))`,
/// negated when `a > b`.
pub(crate) fn delta_sum(
    ts: &TimeScale,
    a: f64,
    b: f64,
    mut integrand: impl FnMut(f64, f64, f64) -> Result<f64>,
) -> Result<f64> {
    let a = ts.canonical(a)?;
    let b = ts.canonical(b)?;
    let (lo, hi, sign) = match a.partial_cmp(&b) {
        Some(std::cmp::Ordering::Less) => (a, b, 1.0),
        Some(std::cmp::Ordering::Greater) => (b, a, -1.0),
        _ => return Ok(0.0),
    };
    let mut acc = 0.0;
    for (t, s, mu) in ts.steps(lo, hi)? {
        acc += integrand(t, s, mu)?;
    }
    Ok(sign * acc)
}

/// Oriented polynomial integral on a real interval, with membership checks.
pub(crate) fn real_integral(ts: &TimeScale, p: &Polynomial, a: f64, b: f64) -> Result<f64> {
    ts.canonical(a)?;
    ts.canonical(b)?;
    Ok(p.integrate(a, b))
}

/// `int_a^b f(t) Delta t`.
///
/// `_tol` is accepted for interface uniformity; every supported path is exact.
pub fn delta_integral(ts: &TimeScale, f: &Func, a: f64, b: f64, _tol: f64) -> Result<f64> {
    if ts.is_discrete() {
        delta_sum(ts, a, b, |t, _, mu| Ok(mu * f.eval(t)?))
    } else {
        real_integral(ts, f.require_polynomial()?, a, b)
    }
}

/// Generalized monomial `h_k(t, s)`, by repeated Delta-integration.
pub fn h_monomial(ts: &TimeScale, k: usize, t: f64, s: f64) -> Result<f64> {
    let t = ts.canonical(t)?;
    let s = ts.canonical(s)?;
    if !ts.is_discrete() {
        let mut h = Polynomial::constant(1.0);
        for _ in 0..k {
            let anti = h.antiderivative();
            h = &anti - &Polynomial::constant(anti.eval(s));
        }
        return Ok(h.eval(t));
    }
    if k == 0 || t == s {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    let (lo, hi) = (t.min(s), t.max(s));
    let (ia, ib) = ts.index_range(lo, hi)?;
    let pts: Vec<f64> = (ia..=ib).map(|i| ts.point(i)).collect();
    let n = pts.len();
    // vals[j] = h_m(pts[j], s)
    let mut vals = vec![1.0; n];
    for _ in 0..k {
        let mut next = vec![0.0; n];
        if t > s {
            // s = pts[0]; h_{m+1}(pts[j]) = sum_{i<j} mu_i h_m(pts[i])
            for j in 1..n {
                next[j] = next[j - 1] + (pts[j] - pts[j - 1]) * vals[j - 1];
            }
        } else {
            // s = pts[n-1]; h_{m+1}(pts[j]) = -sum_{i=j}^{n-2} mu_i h_m(pts[i])
            for j in (0..n - 1).rev() {
                next[j] = next[j + 1] - (pts[j + 1] - pts[j]) * vals[j];
            }
        }
        vals = next;
    }
    Ok(if t > s { vals[n - 1] } else { vals[0] })
}

/// Both sides of the product rule at `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductRuleTerms {
    /// `(fg)^Delta(t)`
    pub product_derivative: f64,
    /// `f^Delta(t) g(t) + f(sigma(t)) g^Delta(t)`
    pub expansion: f64,
}

impl ProductRuleTerms {
    pub fn residual(&self) -> f64 {
        self.product_derivative - self.expansion
    }

    pub fn scale(&self) -> f64 {
        1f64.max(self.product_derivative.abs()).max(self.expansion.abs())
    }
}

pub fn product_rule_terms(ts: &TimeScale, f: &Func, g: &Func, t: f64) -> Result<ProductRuleTerms> {
    let t = ts.canonical(t)?;
    let mu = ts.mu(t)?;
    let fd = delta_derivative(ts, f, t)?;
    let gd = delta_derivative(ts, g, t)?;
    let product_derivative = if mu > 0.0 {
        let s = ts.sigma(t)?;
        (f.eval(s)? * g.eval(s)? - f.eval(t)? * g.eval(t)?) / mu
    } else {
        let fg = f.require_polynomial()? * g.require_polynomial()?;
        fg.derivative().eval(t)
    };
    let expansion = fd * g.eval(t)? + eval_sigma(ts, f, t)? * gd;
    Ok(ProductRuleTerms { product_derivative, expansion })
}

/// `(fg)^Delta(t) - [f^Delta(t) g(t) + f(sigma(t)) g^Delta(t)]`.
pub fn product_rule_residual(ts: &TimeScale, f: &Func, g: &Func, t: f64) -> Result<f64> {
    product_rule_terms(ts, f, g, t).map(|p| p.residual())
}

/// The three pieces of Delta integration by parts over `[a, b]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartsTerms {
    /// `int f g^Delta`
    pub integral: f64,
    /// `(fg)(b) - (fg)(a)`
    pub boundary: f64,
    /// `int f^Delta g(sigma)`
    pub correction: f64,
}

impl PartsTerms {
    pub fn residual(&self) -> f64 {
        self.integral - (self.boundary - self.correction)
    }

    pub fn scale(&self) -> f64 {
        1f64.max(self.integral.abs()).max(self.boundary.abs()).max(self.correction.abs())
    }
}

pub fn parts_terms(ts: &TimeScale, f: &Func, g: &Func, a: f64, b: f64) -> Result<PartsTerms> {
    if a.partial_cmp(&b) != Some(std::cmp::Ordering::Less) {
        return Err(Error::EmptyRange { a, b });
    }
    let boundary = f.eval(ts.canonical(b)?)? * g.eval(b)? - f.eval(ts.canonical(a)?)? * g.eval(a)?;
    let (integral, correction) = if ts.is_discrete() {
        (
            delta_sum(ts, a, b, |t, _, mu| Ok(mu * f.eval(t)? * delta_derivative(ts, g, t)?))?,
            delta_sum(ts, a, b, |t, s, mu| Ok(mu * delta_derivative(ts, f, t)? * g.eval(s)?))?,
        )
    } else {
        let (fp, gp) = (f.require_polynomial()?, g.require_polynomial()?);
        (real_integral(ts, &(fp * &gp.derivative()), a, b)?, real_integral(ts, &(&fp.derivative() * gp), a, b)?)
    };
    Ok(PartsTerms { integral, boundary, correction })
}

/// `int_a^b f g^Delta - [(fg)(b) - (fg)(a) - int_a^b f^Delta g(sigma)]`.
pub fn parts_residual(ts: &TimeScale, f: &Func, g: &Func, a: f64, b: f64) -> Result<f64> {
    parts_terms(ts, f, g, a, b).map(|p| p.residual())
}
