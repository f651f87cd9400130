//! Engine results against brute-force evaluations written directly from the
//! definitions on plain arrays.

use approx::assert_relative_eq;
use delta_ineq::calculus::{delta_integral, h_monomial};
use delta_ineq::harness::trial_rng;
use delta_ineq::ostrowski::{
    self, bound_t5, bound_t6a, bound_t6b, bound_t7, bound_t8, closed_form_rhs, kernel_moments, kernel_p, Family, T7Kind,
};
use delta_ineq::{BoundVariant, Func, KernelSpec, TimeScale};
use rand::Rng;

/// A random instance on a plain list of points.
struct Arrays {
    pts: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
    h: Vec<f64>,
    ix: usize,
    alpha: f64,
    beta: f64,
}

impl Arrays {
    fn draw(seed: u64) -> Arrays {
        let mut rng = trial_rng(seed, 0);
        let n = rng.random_range(3..=12);
        let mut pts: Vec<f64> = (0..n).map(|_| rng.random_range(-4.0..4.0)).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let m = pts.len();
        let mut vals = || (0..m).map(|_| rng.random_range(-3.0..3.0)).collect::<Vec<f64>>();
        let (f, g, h) = (vals(), vals(), vals());
        Arrays {
            ix: rng.random_range(1..m - 1),
            alpha: rng.random_range(0.1..4.0),
            beta: rng.random_range(0.1..4.0),
            pts,
            f,
            g,
            h,
        }
    }

    fn func(&self, v: &[f64]) -> Func {
        Func::sampled(self.pts.iter().copied().zip(v.iter().copied()).collect()).unwrap()
    }

    fn spec(&self) -> KernelSpec {
        let ts = TimeScale::grid(self.pts.clone()).unwrap();
        let n = self.pts.len();
        KernelSpec::new(ts, self.pts[0], self.pts[n - 1], self.pts[self.ix], self.alpha, self.beta, self.func(&self.h))
            .unwrap()
    }

    fn mu(&self, i: usize) -> f64 {
        self.pts[i + 1] - self.pts[i]
    }

    fn diff(&self, v: &[f64], i: usize) -> f64 {
        (v[i + 1] - v[i]) / self.mu(i)
    }

    fn p(&self, i: usize) -> f64 {
        let n = self.pts.len();
        let (a, b, x) = (self.pts[0], self.pts[n - 1], self.pts[self.ix]);
        let ab = self.alpha + self.beta;
        if i < self.ix {
            self.alpha / ab * (self.h[i] - self.h[0]) / (x - a)
        } else {
            -self.beta / ab * (self.h[n - 1] - self.h[i]) / (b - x)
        }
    }

    fn steps(&self) -> std::ops::Range<usize> {
        0..self.pts.len() - 1
    }

    fn int_p_d(&self, v: &[f64]) -> f64 {
        self.steps().map(|i| self.mu(i) * self.p(i) * self.diff(v, i)).sum()
    }

    fn int_abs_p(&self) -> f64 {
        self.steps().map(|i| self.mu(i) * self.p(i).abs()).sum()
    }

    fn sup(&self, v: &[f64]) -> f64 {
        (1..self.pts.len() - 1).map(|i| self.diff(v, i).abs()).fold(0.0, f64::max)
    }

    /// `f(x) B/(a+b) - means/(a+b)` from explicit loops over the two halves.
    fn identity_rhs(&self, v: &[f64]) -> f64 {
        let n = self.pts.len();
        let (a, b, x) = (self.pts[0], self.pts[n - 1], self.pts[self.ix]);
        let ab = self.alpha + self.beta;
        let bracket = self.alpha * (self.h[self.ix] - self.h[0]) / (x - a)
            + self.beta * (self.h[n - 1] - self.h[self.ix]) / (b - x);
        let left: f64 = (0..self.ix).map(|i| (self.h[i + 1] - self.h[i]) * v[i + 1]).sum();
        let right: f64 = (self.ix..n - 1).map(|i| (self.h[i + 1] - self.h[i]) * v[i + 1]).sum();
        v[self.ix] * bracket / ab - (self.alpha / (x - a) * left + self.beta / (b - x) * right) / ab
    }
}

#[test]
fn kernel_and_identity_against_arrays() {
    for seed in 0..200 {
        let arr = Arrays::draw(seed);
        let spec = arr.spec();
        for i in arr.steps() {
            assert_relative_eq!(kernel_p(&spec, arr.pts[i]).unwrap(), arr.p(i), max_relative = 1e-12, epsilon = 1e-14);
        }
        let f = arr.func(&arr.f);
        assert_relative_eq!(ostrowski::montgomery_lhs(&spec, &f).unwrap(), arr.int_p_d(&arr.f), epsilon = 1e-12);
        assert_relative_eq!(ostrowski::montgomery_rhs(&spec, &f).unwrap(), arr.identity_rhs(&arr.f), epsilon = 1e-11);
        assert_relative_eq!(arr.int_p_d(&arr.f), arr.identity_rhs(&arr.f), epsilon = 1e-10, max_relative = 1e-10);
        let m = kernel_moments(&spec, 1e-12).unwrap();
        assert_relative_eq!(m.int_abs_p, arr.int_abs_p(), epsilon = 1e-12);
    }
}

#[test]
fn bounds_against_arrays() {
    for seed in 0..200 {
        let arr = Arrays::draw(1000 + seed);
        let spec = arr.spec();
        let (f, g) = (arr.func(&arr.f), arr.func(&arr.g));
        let ab = arr.alpha + arr.beta;
        let (if_, ig) = (arr.int_p_d(&arr.f), arr.int_p_d(&arr.g));
        let (m1, m2, abs_p) = (arr.sup(&arr.f), arr.sup(&arr.g), arr.int_abs_p());
        let fx = arr.f[arr.ix];
        let gx = arr.g[arr.ix];

        let t5 = bound_t5(&spec, &f, BoundVariant::Corrected).unwrap();
        assert_relative_eq!(t5.lhs, if_.abs(), epsilon = 1e-10);
        assert_relative_eq!(t5.rhs, m1 * abs_p, max_relative = 1e-12);
        let t5l = bound_t5(&spec, &f, BoundVariant::PaperLiteral).unwrap();
        assert_relative_eq!(t5l.rhs, m1 * abs_p / ab, max_relative = 1e-12);

        let t6a = bound_t6a(&spec, &f, &g, BoundVariant::Corrected).unwrap();
        assert_relative_eq!(t6a.lhs, (gx * if_ + fx * ig).abs() / 2.0, epsilon = 1e-10);
        assert_relative_eq!(t6a.rhs, (m1 * gx.abs() + m2 * fx.abs()) / 2.0 * abs_p, max_relative = 1e-12);

        let t6b = bound_t6b(&spec, &f, &g, BoundVariant::Corrected).unwrap();
        assert_relative_eq!(t6b.lhs, (ab * ab * if_ * ig).abs(), epsilon = 1e-9, max_relative = 1e-10);
        assert_relative_eq!(t6b.rhs, ab * ab * m1 * m2 * abs_p * abs_p, max_relative = 1e-12);

        let n = arr.pts.len();
        let len = arr.pts[n - 1] - arr.pts[0];
        let int_p: f64 = arr.steps().map(|i| arr.mu(i) * arr.p(i)).sum();
        let int_p2: f64 = arr.steps().map(|i| arr.mu(i) * arr.p(i).powi(2)).sum();
        let slope = (arr.f[n - 1] - arr.f[0]) / len;
        let int_d2: f64 = arr.steps().map(|i| arr.mu(i) * arr.diff(&arr.f, i).powi(2)).sum();
        let var_p = (int_p2 / len - (int_p / len).powi(2)).max(0.0);
        let var_f = (int_d2 / len - slope * slope).max(0.0);
        let t7 = bound_t7(&spec, &f, T7Kind::L2, BoundVariant::Corrected).unwrap();
        assert_relative_eq!(t7.lhs, (if_ - slope * int_p).abs(), epsilon = 1e-10);
        assert_relative_eq!(t7.rhs, len * var_p.sqrt() * var_f.sqrt(), epsilon = 1e-9, max_relative = 1e-9);

        let ds: Vec<f64> = arr.steps().map(|i| arr.diff(&arr.f, i)).collect();
        let (lo, hi) = ds.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &d| (l.min(d), h.max(d)));
        let t8 = bound_t8(&spec, &f, lo, hi, BoundVariant::Corrected).unwrap();
        assert_relative_eq!(t8.lhs, (if_ - (lo + hi) / 2.0 * int_p).abs(), epsilon = 1e-10);
        assert_relative_eq!(t8.rhs, (hi - lo) / 2.0 * abs_p, max_relative = 1e-12);
        for r in [&t5, &t6a, &t6b, &t7, &t8] {
            assert!(r.holds(1e-10), "{r:?}");
        }
    }
}

/// `prod_{j<k} (t - s - j) / k!` on the integers.
fn integer_monomial(k: usize, t: i64, s: i64) -> f64 {
    (0..k).map(|j| (t - s - j as i64) as f64 / (j + 1) as f64).product()
}

/// `prod_{nu<k} (t - q^nu s) / (1 + q + ... + q^nu)` on a q-lattice.
fn q_monomial(q: f64, k: usize, t: f64, s: f64) -> f64 {
    (0..k)
        .map(|nu| {
            let denom: f64 = (0..=nu).map(|m| q.powi(m as i32)).sum();
            (t - q.powi(nu as i32) * s) / denom
        })
        .product()
}

#[test]
fn monomials_closed_forms() {
    let z = TimeScale::integer(-3, 9).unwrap();
    for k in 0..6 {
        for t in -3..=9i64 {
            for s in -3..=9i64 {
                let got = h_monomial(&z, k, t as f64, s as f64).unwrap();
                assert_relative_eq!(got, integer_monomial(k, t, s), epsilon = 1e-9, max_relative = 1e-12);
            }
        }
    }
    let q = TimeScale::qlattice(1.5, -2, 6).unwrap();
    let pts: Vec<f64> = (0..q.len()).map(|i| q.point(i)).collect();
    for k in 0..5 {
        for &t in &pts {
            for &s in &pts {
                let got = h_monomial(&q, k, t, s).unwrap();
                assert_relative_eq!(got, q_monomial(1.5, k, t, s), epsilon = 1e-10, max_relative = 1e-10);
            }
        }
    }
}

#[test]
fn jackson_integral_of_identity() {
    // int_1^8 t d_q t on 2^Z = sum (q-1) q^k q^k for k = 0..2 = 1 + 4 + 16
    let q = TimeScale::qlattice(2.0, 0, 3).unwrap();
    assert_eq!(delta_integral(&q, &Func::poly(vec![0.0, 1.0]), 1.0, 8.0, 0.0).unwrap(), 21.0);
}

#[test]
fn qlattice_worked_closed_form() {
    let spec =
        KernelSpec::new(TimeScale::qlattice(2.0, 0, 3).unwrap(), 1.0, 8.0, 2.0, 1.0, 1.0, Func::poly(vec![0.0, 1.0]))
            .unwrap();
    let f = Func::poly(vec![0.0, 1.0]);
    // left: (2-1)*2 = 2; right: (4-2)*4 + (8-4)*8 = 40
    // B = 1 + 1 = 2; rhs = 2*2/2 - (1/2)(2/1 + 40/6)
    let oracle = 2.0 - 0.5 * (2.0 + 40.0 / 6.0);
    assert_relative_eq!(closed_form_rhs(&spec, &f, Family::Q).unwrap(), oracle, max_relative = 1e-12);
    assert_relative_eq!(ostrowski::montgomery_rhs(&spec, &f).unwrap(), oracle, max_relative = 1e-12);
    assert_relative_eq!(ostrowski::montgomery_lhs(&spec, &f).unwrap(), oracle, max_relative = 1e-12);
}

#[test]
fn real_moments_against_simpson() {
    let spec = KernelSpec::new(
        TimeScale::real(-1.0, 2.0).unwrap(),
        -1.0,
        2.0,
        0.3,
        1.5,
        2.5,
        Func::poly(vec![0.2, -1.0, -0.5, 1.0]),
    )
    .unwrap();
    let n = 60_000;
    let simpson = |lo: f64, hi: f64, g: &dyn Fn(f64) -> f64| {
        let h = (hi - lo) / n as f64;
        let mut acc = g(lo) + g(hi - 1e-15);
        for i in 1..n {
            acc += g(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc * h / 3.0
    };
    let p = |t: f64| kernel_p(&spec, t.min(2.0 - 1e-12)).unwrap();
    let m = kernel_moments(&spec, 1e-12).unwrap();
    let int_p = simpson(-1.0, 0.3, &p) + simpson(0.3, 2.0, &p);
    let int_abs = simpson(-1.0, 0.3, &|t| p(t).abs()) + simpson(0.3, 2.0, &|t| p(t).abs());
    let int_p2 = simpson(-1.0, 0.3, &|t| p(t).powi(2)) + simpson(0.3, 2.0, &|t| p(t).powi(2));
    assert_relative_eq!(m.int_p, int_p, epsilon = 1e-9);
    assert_relative_eq!(m.int_abs_p, int_abs, epsilon = 1e-6);
    assert_relative_eq!(m.int_p2, int_p2, epsilon = 1e-9);
}
