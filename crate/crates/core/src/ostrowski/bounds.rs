//! Evaluators for the bound families built on the weighted kernel.
//!
//! Each evaluator returns a [`BoundReport`]. The left side is always the
//! printed expression (assembled from the identity's right side); the right
//! side depends on the [`BoundVariant`]:
//!
//! | theorem  | `Corrected` rhs                              | `PaperLiteral` rhs                 |
//! |----------|----------------------------------------------|------------------------------------|
//! | T5       | `M int|P|`                                   | `M/(alpha+beta) int|P|`            |
//! | T6a      | `(M1|g(x)| + M2|f(x)|)/2 int|P|`             | same over `2(alpha+beta)`          |
//! | T6b      | `(alpha+beta)^2 M1 M2 (int|P|)^2`            | `(alpha+beta)^2 (int|P|)^2`        |
//! | T7, T8   | identical in both variants                   |                                    |

use serde::{Deserialize, Serialize};

use super::kernel::{
    delta_derivative_range, kernel_derivative_bound, kernel_moments, kernel_p, montgomery_lhs, montgomery_terms,
    KernelMoments, KernelSpec,
};
use crate::calculus::{self, delta_derivative, delta_sum, real_integral, Func, Polynomial};
use crate::error::{Error, Result};
use crate::timescale::TimeScale;

/// Relative tolerance under which a slightly negative variance is rounding.
const VARIANCE_CLAMP_RTOL: f64 = 1e-12;
/// Relative tolerance for `gamma <= f^Delta <= Gamma` checks.
const RANGE_RTOL: f64 = 1e-12;
/// Expanded and factored forms of the two-function product must agree to this.
const PRODUCT_FORM_RTOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Theorem {
    T5,
    T6a,
    T6b,
    #[serde(rename = "T7-L2")]
    T7L2,
    #[serde(rename = "T7-Gruss")]
    T7Gruss,
    T8,
}

impl Theorem {
    pub const ALL: [Theorem; 6] =
        [Theorem::T5, Theorem::T6a, Theorem::T6b, Theorem::T7L2, Theorem::T7Gruss, Theorem::T8];

    pub fn label(self) -> &'static str {
        match self {
            Theorem::T5 => "T5",
            Theorem::T6a => "T6a",
            Theorem::T6b => "T6b",
            Theorem::T7L2 => "T7-L2",
            Theorem::T7Gruss => "T7-Gruss",
            Theorem::T8 => "T8",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.label().eq_ignore_ascii_case(s))
    }

    /// Whether the theorem bounds a pair of functions.
    pub fn needs_g(self) -> bool {
        matches!(self, Theorem::T6a | Theorem::T6b)
    }

    /// Whether the theorem needs `gamma <= f^Delta <= Gamma`.
    pub fn needs_range(self) -> bool {
        matches!(self, Theorem::T7Gruss | Theorem::T8)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BoundVariant {
    #[serde(rename = "literal")]
    PaperLiteral,
    #[serde(rename = "corrected")]
    Corrected,
}

impl BoundVariant {
    pub fn label(self) -> &'static str {
        match self {
            BoundVariant::PaperLiteral => "literal",
            BoundVariant::Corrected => "corrected",
        }
    }
}

/// Compact description of the kernel spec a report was evaluated on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecSummary {
    pub scale_kind: String,
    pub a: f64,
    pub b: f64,
    pub x: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl From<&KernelSpec> for SpecSummary {
    fn from(s: &KernelSpec) -> Self {
        SpecSummary {
            scale_kind: s.scale().kind_name().to_string(),
            a: s.a(),
            b: s.b(),
            x: s.x(),
            alpha: s.alpha(),
            beta: s.beta(),
        }
    }
}

/// One evaluated inequality instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem: Theorem,
    pub variant: BoundVariant,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub spec_summary: SpecSummary,
}

impl BoundReport {
    pub fn new(theorem: Theorem, variant: BoundVariant, lhs: f64, rhs: f64, spec: &KernelSpec) -> Self {
        BoundReport { theorem, variant, lhs, rhs, slack: rhs - lhs, spec_summary: spec.into() }
    }

    /// `slack >= -tol * max(1, |lhs|, |rhs|)`.
    pub fn holds(&self, tol: f64) -> bool {
        self.slack >= -tol * 1f64.max(self.lhs.abs()).max(self.rhs.abs())
    }
}

/// Which form of the perturbed bound to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum T7Kind {
    /// Cauchy-Schwarz form with the `L^2` deviation of `f^Delta`.
    L2,
    /// Range form: requires `gamma <= f^Delta <= Gamma`.
    Gruss { gamma: f64, big_gamma: f64 },
}

/// Clamps rounding-level negative variances to zero.
pub(crate) fn clamp_variance(v: f64, magnitude: f64) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= -VARIANCE_CLAMP_RTOL * magnitude.max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::NegativeVariance(v))
    }
}

/// Checks `gamma <= f^Delta <= Gamma` on `[a, b)` (discrete) or `[a, b]` (real).
pub fn check_range(ts: &TimeScale, f: &Func, a: f64, b: f64, gamma: f64, big_gamma: f64) -> Result<()> {
    if !(gamma.is_finite() && big_gamma.is_finite()) || big_gamma < gamma {
        return Err(Error::InvalidBounds(format!("Gamma = {big_gamma} < gamma = {gamma}")));
    }
    let (lo, hi) = delta_derivative_range(ts, f, a, b)?;
    let slack = RANGE_RTOL * 1f64.max(gamma.abs()).max(big_gamma.abs());
    if lo < gamma - slack || hi > big_gamma + slack {
        return Err(Error::InvalidBounds(format!("f^Delta ranges over [{lo}, {hi}], outside [{gamma}, {big_gamma}]")));
    }
    Ok(())
}

pub fn bound_t5(spec: &KernelSpec, f: &Func, variant: BoundVariant) -> Result<BoundReport> {
    let lhs = montgomery_terms(spec, f)?.rhs().abs();
    let m = kernel_derivative_bound(spec, f)?;
    let abs_p = kernel_moments(spec, 0.0)?.int_abs_p;
    let rhs = match variant {
        BoundVariant::Corrected => m * abs_p,
        BoundVariant::PaperLiteral => m / spec.weight_sum() * abs_p,
    };
    Ok(BoundReport::new(Theorem::T5, variant, lhs, rhs, spec))
}

pub fn bound_t6a(spec: &KernelSpec, f: &Func, g: &Func, variant: BoundVariant) -> Result<BoundReport> {
    let tf = montgomery_terms(spec, f)?;
    let tg = montgomery_terms(spec, g)?;
    let ab = spec.weight_sum();
    // f g B/(a+b) - (g Fm + f Gm)/(2(a+b)), grouped by identity right side
    let lhs = ((tg.fx * tf.rhs() + tf.fx * tg.rhs()) / 2.0).abs();
    let m1 = kernel_derivative_bound(spec, f)?;
    let m2 = kernel_derivative_bound(spec, g)?;
    let abs_p = kernel_moments(spec, 0.0)?.int_abs_p;
    let numer = m1 * tg.fx.abs() + m2 * tf.fx.abs();
    let rhs = match variant {
        BoundVariant::Corrected => numer / 2.0 * abs_p,
        BoundVariant::PaperLiteral => numer / (2.0 * ab) * abs_p,
    };
    Ok(BoundReport::new(Theorem::T6a, variant, lhs, rhs, spec))
}

/// Expanded four-term product form and the factored form
/// `(alpha+beta)^2 (int P f^Delta)(int P g^Delta)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductForms {
    pub expanded: f64,
    pub factored: f64,
    /// Largest magnitude among the expanded terms; rounding scales with it.
    pub magnitude: f64,
}

impl ProductForms {
    pub fn residual(&self) -> f64 {
        self.expanded - self.factored
    }
}

pub fn product_forms(spec: &KernelSpec, f: &Func, g: &Func) -> Result<ProductForms> {
    let tf = montgomery_terms(spec, f)?;
    let tg = montgomery_terms(spec, g)?;
    let bracket = tf.bracket;
    let t1 = tf.fx * tg.fx * bracket * bracket;
    let t2 = bracket * (tf.fx * tg.means + tg.fx * tf.means);
    let t3 = tf.means * tg.means;
    let ab = spec.weight_sum();
    let factored = ab * ab * montgomery_lhs(spec, f)? * montgomery_lhs(spec, g)?;
    Ok(ProductForms {
        expanded: t1 - t2 + t3,
        factored,
        magnitude: 1f64.max(t1.abs()).max(t2.abs()).max(t3.abs()).max(factored.abs()),
    })
}

/// The left side is `(alpha+beta)^2 (int P f^Delta)(int P g^Delta)`; the
/// expanded four-term form must agree with it to `1e-9` of its largest term.
pub fn bound_t6b(spec: &KernelSpec, f: &Func, g: &Func, variant: BoundVariant) -> Result<BoundReport> {
    let forms = product_forms(spec, f, g)?;
    if forms.residual().abs() > PRODUCT_FORM_RTOL * forms.magnitude {
        return Err(Error::IdentityMismatch(format!(
            "expanded product {} differs from factored {}",
            forms.expanded, forms.factored
        )));
    }
    let lhs = forms.factored.abs();
    let ab = spec.weight_sum();
    let abs_p = kernel_moments(spec, 0.0)?.int_abs_p;
    let rhs = match variant {
        BoundVariant::Corrected => {
            let m1 = kernel_derivative_bound(spec, f)?;
            let m2 = kernel_derivative_bound(spec, g)?;
            ab * ab * m1 * m2 * abs_p * abs_p
        }
        BoundVariant::PaperLiteral => ab * ab * abs_p * abs_p,
    };
    Ok(BoundReport::new(Theorem::T6b, variant, lhs, rhs, spec))
}

/// Variance of `P` under the normalized Delta-measure on `[a, b)`, in the
/// centered form `(1/L) int (P - mean)^2`.
pub(crate) fn kernel_variance(spec: &KernelSpec, m: &KernelMoments) -> Result<f64> {
    let len = spec.length();
    let mean = m.int_p / len;
    let ts = spec.scale();
    let centered = if ts.is_discrete() {
        delta_sum(ts, spec.a(), spec.b(), |t, _, mu| Ok(mu * (kernel_p(spec, t)? - mean).powi(2)))?
    } else {
        let (left, right) = spec.branch_polys()?;
        let shift = Polynomial::constant(mean);
        let (l, r) = (&left - &shift, &right - &shift);
        (&l * &l).integrate(spec.a(), spec.x()) + (&r * &r).integrate(spec.x(), spec.b())
    };
    clamp_variance(centered / len, m.int_p2 / len)
}

/// `(1/(b-a)) int (f^Delta)^2 - ((f(b)-f(a))/(b-a))^2`, evaluated as
/// `(1/(b-a)) int (f^Delta - slope)^2` so that constant `f^Delta` gives 0.
pub fn derivative_variance(ts: &TimeScale, f: &Func, a: f64, b: f64) -> Result<f64> {
    let len = b - a;
    if len <= 0.0 {
        return Err(Error::EmptyRange { a, b });
    }
    let slope = (calculus::eval(ts, f, b)? - calculus::eval(ts, f, a)?) / len;
    let (centered, second) = if ts.is_discrete() {
        let mut centered = 0.0;
        let mut second = 0.0;
        delta_sum(ts, a, b, |t, _, mu| {
            let d = delta_derivative(ts, f, t)?;
            centered += mu * (d - slope).powi(2);
            second += mu * d * d;
            Ok(0.0)
        })?;
        (centered, second)
    } else {
        let df = f.require_polynomial()?.derivative();
        let dev = &df - &Polynomial::constant(slope);
        (real_integral(ts, &(&dev * &dev), a, b)?, real_integral(ts, &(&df * &df), a, b)?)
    };
    clamp_variance(centered / len, second / len)
}

pub fn bound_t7(spec: &KernelSpec, f: &Func, kind: T7Kind, variant: BoundVariant) -> Result<BoundReport> {
    let len = spec.length();
    let moments = kernel_moments(spec, 0.0)?;
    let slope = (calculus::eval(spec.scale(), f, spec.b())? - calculus::eval(spec.scale(), f, spec.a())?) / len;
    let lhs = (montgomery_terms(spec, f)?.rhs() - slope * moments.int_p).abs();
    let p_dev = kernel_variance(spec, &moments)?.sqrt();
    let (theorem, rhs) = match kind {
        T7Kind::L2 => (Theorem::T7L2, len * p_dev * derivative_variance(spec.scale(), f, spec.a(), spec.b())?.sqrt()),
        T7Kind::Gruss { gamma, big_gamma } => {
            check_range(spec.scale(), f, spec.a(), spec.b(), gamma, big_gamma)?;
            (Theorem::T7Gruss, len * p_dev * (big_gamma - gamma) / 2.0)
        }
    };
    Ok(BoundReport::new(theorem, variant, lhs, rhs, spec))
}

pub fn bound_t8(spec: &KernelSpec, f: &Func, gamma: f64, big_gamma: f64, variant: BoundVariant) -> Result<BoundReport> {
    check_range(spec.scale(), f, spec.a(), spec.b(), gamma, big_gamma)?;
    let moments = kernel_moments(spec, 0.0)?;
    let lhs = (montgomery_terms(spec, f)?.rhs() - (gamma + big_gamma) / 2.0 * moments.int_p).abs();
    let rhs = (big_gamma - gamma) / 2.0 * moments.int_abs_p;
    Ok(BoundReport::new(Theorem::T8, variant, lhs, rhs, spec))
}

/// Evaluates one theorem. `g` is required for T6a/T6b and `range`
/// (`gamma`, `Gamma`) for T7-Gruss/T8.
pub fn evaluate(
    theorem: Theorem,
    spec: &KernelSpec,
    f: &Func,
    g: Option<&Func>,
    range: Option<(f64, f64)>,
    variant: BoundVariant,
) -> Result<BoundReport> {
    let need_g = || g.ok_or_else(|| Error::InvalidSpec(format!("{} needs a second function g", theorem.label())));
    let need_range = || range.ok_or_else(|| Error::InvalidBounds(format!("{} needs gamma and Gamma", theorem.label())));
    match theorem {
        Theorem::T5 => bound_t5(spec, f, variant),
        Theorem::T6a => bound_t6a(spec, f, need_g()?, variant),
        Theorem::T6b => bound_t6b(spec, f, need_g()?, variant),
        Theorem::T7L2 => bound_t7(spec, f, T7Kind::L2, variant),
        Theorem::T7Gruss => {
            let (gamma, big_gamma) = need_range()?;
            bound_t7(spec, f, T7Kind::Gruss { gamma, big_gamma }, variant)
        }
        Theorem::T8 => {
            let (gamma, big_gamma) = need_range()?;
            bound_t8(spec, f, gamma, big_gamma, variant)
        }
    }
}

/// All six bounds for one variant, in [`Theorem::ALL`] order. `gamma`,
/// `Gamma` default to the exact extrema of `f^Delta`.
pub fn evaluate_all(
    spec: &KernelSpec,
    f: &Func,
    g: &Func,
    range: Option<(f64, f64)>,
    variant: BoundVariant,
) -> Result<Vec<BoundReport>> {
    let range = match range {
        Some(r) => r,
        None => delta_derivative_range(spec.scale(), f, spec.a(), spec.b())?,
    };
    Theorem::ALL.iter().map(|&t| evaluate(t, spec, f, Some(g), Some(range), variant)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked() -> KernelSpec {
        KernelSpec::new(TimeScale::integer(0, 4).unwrap(), 0.0, 4.0, 2.0, 1.0, 1.0, Func::poly(vec![0.0, 1.0])).unwrap()
    }

    fn square() -> Func {
        Func::poly(vec![0.0, 0.0, 1.0])
    }

    #[test]
    fn t5_worked() {
        let c = bound_t5(&worked(), &square(), BoundVariant::Corrected).unwrap();
        assert_eq!((c.lhs, c.rhs, c.slack), (3.5, 7.0, 3.5));
        let l = bound_t5(&worked(), &square(), BoundVariant::PaperLiteral).unwrap();
        assert_eq!((l.rhs, l.slack), (3.5, 0.0));
    }

    fn table(values: &[f64]) -> Func {
        Func::sampled(values.iter().enumerate().map(|(i, &v)| (i as f64, v)).collect()).unwrap()
    }

    #[test]
    fn t5_literal_witness() {
        // f^Delta = 7 sign(P) where P != 0
        let f = table(&[0.0, 7.0, 14.0, 7.0, 0.0]);
        let l = bound_t5(&worked(), &f, BoundVariant::PaperLiteral).unwrap();
        assert_eq!((l.lhs, l.rhs, l.slack), (7.0, 3.5, -3.5));
        assert!(!l.holds(1e-10));
        let c = bound_t5(&worked(), &f, BoundVariant::Corrected).unwrap();
        assert_eq!((c.lhs, c.rhs, c.slack), (7.0, 7.0, 0.0));
        assert!(c.holds(1e-10));
    }

    #[test]
    fn t5_misaligned_table() {
        // f^Delta = (7, -7, -7, -7) disagrees with sign(P) at t = 1
        let f = table(&[0.0, 7.0, 0.0, -7.0, -14.0]);
        let l = bound_t5(&worked(), &f, BoundVariant::PaperLiteral).unwrap();
        assert_eq!((l.lhs, l.rhs, l.slack), (3.5, 3.5, 0.0));
    }

    #[test]
    fn t6a_constants_and_scaling() {
        let one = Func::poly(vec![1.0]);
        let r = bound_t6a(&worked(), &one, &one, BoundVariant::Corrected).unwrap();
        assert_eq!((r.lhs, r.rhs, r.slack), (0.0, 0.0, 0.0));
        let g = Func::poly(vec![0.0, 1.0]);
        let base = bound_t6a(&worked(), &square(), &g, BoundVariant::Corrected).unwrap();
        assert!(base.slack >= 0.0);
        let scaled = worked().with_weights(10.0, 10.0).unwrap();
        let s = bound_t6a(&scaled, &square(), &g, BoundVariant::Corrected).unwrap();
        assert!((s.lhs - base.lhs).abs() < 1e-12 && (s.rhs - base.rhs).abs() < 1e-12);
    }

    #[test]
    fn t6b_worked() {
        let c = bound_t6b(&worked(), &square(), &square(), BoundVariant::Corrected).unwrap();
        assert_eq!((c.lhs, c.rhs, c.slack), (49.0, 196.0, 147.0));
        let l = bound_t6b(&worked(), &square(), &square(), BoundVariant::PaperLiteral).unwrap();
        assert_eq!((l.lhs, l.rhs), (49.0, 4.0));
        assert!(l.slack < 0.0);
        let one = Func::poly(vec![1.0]);
        assert_eq!(bound_t6b(&worked(), &square(), &one, BoundVariant::Corrected).unwrap().lhs, 0.0);
    }

    #[test]
    fn t7_worked() {
        let l2 = bound_t7(&worked(), &square(), T7Kind::L2, BoundVariant::Corrected).unwrap();
        assert_eq!(l2.lhs, 1.5);
        assert!((l2.rhs - 2.5).abs() < 1e-12);
        let gr = bound_t7(&worked(), &square(), T7Kind::Gruss { gamma: 1.0, big_gamma: 7.0 }, BoundVariant::Corrected)
            .unwrap();
        let expected = 4.0 * 0.078125f64.sqrt() * 3.0;
        assert!((gr.rhs - expected).abs() < 1e-12);
        assert!((gr.rhs - 3.3541).abs() < 1e-4);
        assert!((gr.slack - 1.854).abs() < 1e-3);
    }

    #[test]
    fn t7_linear() {
        let f = Func::poly(vec![1.0, -2.5]);
        let r = bound_t7(&worked(), &f, T7Kind::L2, BoundVariant::Corrected).unwrap();
        assert!(r.lhs.abs() < 1e-15 && r.rhs.abs() < 1e-15);
    }

    #[test]
    fn t7_invalid_bounds() {
        let bad = T7Kind::Gruss { gamma: 2.0, big_gamma: 7.0 };
        assert!(matches!(bound_t7(&worked(), &square(), bad, BoundVariant::Corrected), Err(Error::InvalidBounds(_))));
        let inverted = T7Kind::Gruss { gamma: 7.0, big_gamma: 1.0 };
        assert!(bound_t7(&worked(), &square(), inverted, BoundVariant::Corrected).is_err());
    }

    #[test]
    fn t8_worked() {
        let r = bound_t8(&worked(), &square(), 1.0, 7.0, BoundVariant::Corrected).unwrap();
        assert_eq!((r.lhs, r.rhs, r.slack), (1.5, 3.0, 1.5));
        let lin = Func::poly(vec![0.0, 3.0]);
        let r = bound_t8(&worked(), &lin, 3.0, 3.0, BoundVariant::Corrected).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
    }

    #[test]
    fn evaluate_all_six() {
        let g = Func::poly(vec![0.0, 1.0]);
        let reports = evaluate_all(&worked(), &square(), &g, None, BoundVariant::Corrected).unwrap();
        let ids: Vec<_> = reports.iter().map(|r| r.theorem).collect();
        assert_eq!(ids, Theorem::ALL.to_vec());
        assert!(reports.iter().all(|r| r.holds(1e-10)));
    }

    #[test]
    fn variance_clamp() {
        assert_eq!(clamp_variance(-1e-14, 1.0).unwrap(), 0.0);
        assert_eq!(clamp_variance(0.25, 1.0).unwrap(), 0.25);
        assert!(matches!(clamp_variance(-1e-3, 1.0), Err(Error::NegativeVariance(_))));
    }
}
