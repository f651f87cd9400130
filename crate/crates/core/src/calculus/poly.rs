//! Dense real polynomials with exact calculus.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Number of uniform cells used to bracket sign changes before bisection.
pub const ROOT_SCAN_CELLS: usize = 1024;
/// Bisection stops once the bracket is narrower than this.
pub const ROOT_BISECT_TOL: f64 = 1e-12;

/// `t -> sum_i coeffs[i] * t^i`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// The identity `t -> t`.
    pub fn identity() -> Self {
        Self::new(vec![0.0, 1.0])
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last() == Some(&0.0) {
            self.coeffs.pop();
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::constant(0.0);
        }
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| c * i as f64).collect())
    }

    /// Antiderivative vanishing at 0.
    pub fn antiderivative(&self) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(0.0);
        out.extend(self.coeffs.iter().enumerate().map(|(i, &c)| c / (i + 1) as f64));
        Self::new(out)
    }

    /// `int_a^b p(t) dt` via the antiderivative.
    pub fn integrate(&self, a: f64, b: f64) -> f64 {
        let anti = self.antiderivative();
        anti.eval(b) - anti.eval(a)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Roots of `p` in the open interval `(lo, hi)`, located by a sign-change
    /// scan on `ROOT_SCAN_CELLS` cells refined by bisection.
    ///
    /// Roots of even multiplicity that do not change sign are not reported;
    /// they do not affect `|p|` integrals or extrema.
    pub fn roots_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        if self.degree() == 0 || lo >= hi {
            return Vec::new();
        }
        let width = (hi - lo) / ROOT_SCAN_CELLS as f64;
        let mut roots = Vec::new();
        let mut left = lo;
        let mut f_left = self.eval(lo);
        for i in 1..=ROOT_SCAN_CELLS {
            let right = if i == ROOT_SCAN_CELLS { hi } else { lo + width * i as f64 };
            let f_right = self.eval(right);
            if f_right == 0.0 && i < ROOT_SCAN_CELLS {
                roots.push(right);
            } else if f_left * f_right < 0.0 {
                roots.push(self.bisect(left, right, f_left));
            }
            left = right;
            f_left = f_right;
        }
        roots
    }

    fn bisect(&self, mut lo: f64, mut hi: f64, mut f_lo: f64) -> f64 {
        while hi - lo > ROOT_BISECT_TOL {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let f_mid = self.eval(mid);
            if f_mid == 0.0 {
                return mid;
            }
            if (f_mid < 0.0) == (f_lo < 0.0) {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// `int_lo^hi |p(t)| dt`, split at the sign changes of `p`.
    pub fn abs_integral(&self, lo: f64, hi: f64) -> f64 {
        if lo >= hi {
            return 0.0;
        }
        let anti = self.antiderivative();
        let mut knots = vec![lo];
        knots.extend(self.roots_in(lo, hi));
        knots.push(hi);
        knots.windows(2).map(|w| (anti.eval(w[1]) - anti.eval(w[0])).abs()).sum()
    }

    /// Minimum and maximum of `p` over `[lo, hi]`, from endpoints and the
    /// critical points (sign changes of `p'`).
    pub fn min_max_on(&self, lo: f64, hi: f64) -> (f64, f64) {
        let mut candidates = vec![lo, hi];
        candidates.extend(self.derivative().roots_in(lo, hi));
        candidates
            .iter()
            .map(|&t| self.eval(t))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(mn, mx), v| (mn.min(v), mx.max(v)))
    }

    pub fn max_abs_on(&self, lo: f64, hi: f64) -> f64 {
        let (mn, mx) = self.min_max_on(lo, hi);
        mn.abs().max(mx.abs())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let at = |p: &Polynomial, i: usize| p.coeffs.get(i).copied().unwrap_or(0.0);
        Polynomial::new((0..n).map(|i| at(self, i) + at(rhs, i)).collect())
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_derivative() {
        let p = Polynomial::new(vec![0.0, 0.0, 1.0]);
        assert_eq!(p.eval(3.0), 9.0);
        assert_eq!(p.derivative().eval(0.5), 1.0);
        assert_eq!(Polynomial::constant(4.0).derivative().eval(2.0), 0.0);
    }

    #[test]
    fn integrate_linear() {
        assert_eq!(Polynomial::identity().integrate(0.0, 2.0), 2.0);
        assert_eq!(Polynomial::identity().integrate(2.0, 0.0), -2.0);
    }

    #[test]
    fn arithmetic() {
        let a = Polynomial::new(vec![1.0, 2.0]);
        let b = Polynomial::new(vec![-1.0, 0.0, 3.0]);
        let prod = &a * &b;
        for t in [-1.5, 0.0, 0.7, 2.0] {
            assert!((prod.eval(t) - a.eval(t) * b.eval(t)).abs() < 1e-12);
            assert!(((&a - &b).eval(t) - (a.eval(t) - b.eval(t))).abs() < 1e-12);
        }
        assert_eq!((&a - &a).degree(), 0);
    }

    #[test]
    fn roots_and_abs_integral() {
        // t^2 - 1 on [-2, 2]: roots at +-1
        let p = Polynomial::new(vec![-1.0, 0.0, 1.0]);
        let roots = p.roots_in(-2.0, 2.0);
        assert_eq!(roots.len(), 2);
        assert!((roots[0] + 1.0).abs() < 1e-11 && (roots[1] - 1.0).abs() < 1e-11);
        // |t^2-1| over [-2,2] = 2*(2/3 + 4/3) = 4
        assert!((p.abs_integral(-2.0, 2.0) - 4.0).abs() < 1e-11);
    }

    #[test]
    fn extrema_of_derivative() {
        // f = t^3 - t, f' = 3t^2 - 1; max |f'| on [-1.5, 1.5] at endpoints = 5.75
        let f = Polynomial::new(vec![0.0, -1.0, 0.0, 1.0]);
        let df = f.derivative();
        assert!((df.max_abs_on(-1.5, 1.5) - 5.75).abs() < 1e-12);
        let (mn, _) = df.min_max_on(-1.5, 1.5);
        assert!((mn + 1.0).abs() < 1e-12);
    }
}
