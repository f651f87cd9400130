//! Time scales: closed subsets of the reals with jump operators.
//!
//! Four families are supported. Three are discrete and enumerable
//! (`grid`, `integer`, `qlattice`); `real` is a closed real interval.
//! On the discrete families every point is addressed by an index, and
//! all jump operators are computed from neighbouring indices, so no
//! floating-point drift accumulates when walking a scale.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used to recognise a q-lattice point `q^k`.
const QLATTICE_MEMBER_RTOL: f64 = 1e-12;

/// Raw, unvalidated description of a time scale (the JSON form).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ScaleKind {
    Grid {
        points: Vec<f64>,
    },
    Integer {
        lo: i64,
        hi: i64,
    },
    #[serde(rename = "qlattice")]
    QLattice {
        q: f64,
        kmin: i32,
        kmax: i32,
    },
    Real {
        lo: f64,
        hi: f64,
    },
}

/// A validated time scale. Immutable after construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScaleKind", into = "ScaleKind")]
pub struct TimeScale {
    kind: ScaleKind,
}

impl TryFrom<ScaleKind> for TimeScale {
    type Error = Error;

    fn try_from(kind: ScaleKind) -> Result<Self> {
        match &kind {
            ScaleKind::Grid { points } => {
                if points.len() < 2 {
                    return Err(Error::InvalidScale("grid needs at least two points".into()));
                }
                if points.iter().any(|p| !p.is_finite()) {
                    return Err(Error::InvalidScale("grid points must be finite".into()));
                }
                if points.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidScale("grid points must be strictly increasing".into()));
                }
            }
            ScaleKind::Integer { lo, hi } => {
                if lo >= hi {
                    return Err(Error::InvalidScale(format!("integer interval {lo} >= {hi}")));
                }
            }
            ScaleKind::QLattice { q, kmin, kmax } => {
                if !(q.is_finite() && *q > 1.0) {
                    return Err(Error::InvalidScale(format!("q = {q} must exceed 1")));
                }
                if kmin >= kmax {
                    return Err(Error::InvalidScale(format!("kmin {kmin} >= kmax {kmax}")));
                }
                if !q.powi(*kmax).is_finite() || q.powi(*kmin) == 0.0 {
                    return Err(Error::InvalidScale("q-lattice exponents overflow".into()));
                }
            }
            ScaleKind::Real { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                    return Err(Error::InvalidScale(format!("real interval [{lo}, {hi}]")));
                }
            }
        }
        Ok(Self { kind })
    }
}

impl From<TimeScale> for ScaleKind {
    fn from(ts: TimeScale) -> Self {
        ts.kind
    }
}

/// Whether a point is scattered or dense on one side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Scattered,
    Dense,
}

/// Summary tag of a point classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointTag {
    /// Right-scattered, left-dense.
    RightScattered,
    /// Left-scattered, right-dense.
    LeftScattered,
    Isolated,
    Dense,
}

/// Classification of a point by its jump operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointClass {
    pub right: Side,
    pub left: Side,
    pub is_max: bool,
    pub is_min: bool,
}

impl PointClass {
    pub fn is_right_scattered(&self) -> bool {
        self.right == Side::Scattered
    }

    pub fn is_left_scattered(&self) -> bool {
        self.left == Side::Scattered
    }

    pub fn is_right_dense(&self) -> bool {
        self.right == Side::Dense
    }

    pub fn is_left_dense(&self) -> bool {
        self.left == Side::Dense
    }

    pub fn tag(&self) -> PointTag {
        match (self.right, self.left) {
            (Side::Scattered, Side::Scattered) => PointTag::Isolated,
            (Side::Dense, Side::Dense) => PointTag::Dense,
            (Side::Scattered, Side::Dense) => PointTag::RightScattered,
            (Side::Dense, Side::Scattered) => PointTag::LeftScattered,
        }
    }
}

impl TimeScale {
    pub fn grid(points: Vec<f64>) -> Result<Self> {
        ScaleKind::Grid { points }.try_into()
    }

    pub fn integer(lo: i64, hi: i64) -> Result<Self> {
        ScaleKind::Integer { lo, hi }.try_into()
    }

    pub fn qlattice(q: f64, kmin: i32, kmax: i32) -> Result<Self> {
        ScaleKind::QLattice { q, kmin, kmax }.try_into()
    }

    pub fn real(lo: f64, hi: f64) -> Result<Self> {
        ScaleKind::Real { lo, hi }.try_into()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidScale(e.to_string()))
    }

    pub fn kind(&self) -> &ScaleKind {
        &self.kind
    }

    /// Short family name, as used in the JSON `kind` tag and in reports.
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ScaleKind::Grid { .. } => "grid",
            ScaleKind::Integer { .. } => "integer",
            ScaleKind::QLattice { .. } => "qlattice",
            ScaleKind::Real { .. } => "real",
        }
    }

    pub fn is_discrete(&self) -> bool {
        !matches!(self.kind, ScaleKind::Real { .. })
    }

    pub fn min(&self) -> f64 {
        match &self.kind {
            ScaleKind::Real { lo, .. } => *lo,
            _ => self.point(0),
        }
    }

    pub fn max(&self) -> f64 {
        match &self.kind {
            ScaleKind::Real { hi, .. } => *hi,
            _ => self.point(self.len() - 1),
        }
    }

    /// Number of points of a discrete scale (0 for a real interval).
    pub fn len(&self) -> usize {
        match &self.kind {
            ScaleKind::Grid { points } => points.len(),
            ScaleKind::Integer { lo, hi } => (hi - lo + 1) as usize,
            ScaleKind::QLattice { kmin, kmax, .. } => (kmax - kmin + 1) as usize,
            ScaleKind::Real { .. } => 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The `i`-th point of a discrete scale in ascending order.
    ///
    /// Panics if `i` is out of bounds or the scale is continuous.
    pub fn point(&self, i: usize) -> f64 {
        match &self.kind {
            ScaleKind::Grid { points } => points[i],
            ScaleKind::Integer { lo, hi } => {
                assert!((i as i64) <= hi - lo, "index {i} out of bounds");
                (lo + i as i64) as f64
            }
            ScaleKind::QLattice { q, kmin, kmax } => {
                assert!((i as i64) <= i64::from(kmax - kmin), "index {i} out of bounds");
                q.powi(kmin + i as i32)
            }
            ScaleKind::Real { .. } => panic!("real interval has no indexed points"),
        }
    }

    /// Index of `t` within a discrete scale.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        if !t.is_finite() {
            return Err(Error::NotInScale(t));
        }
        match &self.kind {
            ScaleKind::Grid { points } => {
                points.binary_search_by(|p| p.total_cmp(&t)).map_err(|_| Error::NotInScale(t))
            }
            ScaleKind::Integer { lo, hi } => {
                if t.fract() != 0.0 || t < *lo as f64 || t > *hi as f64 {
                    return Err(Error::NotInScale(t));
                }
                Ok((t as i64 - lo) as usize)
            }
            ScaleKind::QLattice { q, kmin, kmax } => {
                let k = self.q_exponent(*q, t).ok_or(Error::NotInScale(t))?;
                if k < *kmin || k > *kmax {
                    return Err(Error::NotInScale(t));
                }
                Ok((k - kmin) as usize)
            }
            ScaleKind::Real { .. } => Err(Error::ContinuousScale),
        }
    }

    fn q_exponent(&self, q: f64, t: f64) -> Option<i32> {
        if t <= 0.0 {
            return None;
        }
        let k = (t.ln() / q.ln()).round();
        if k.abs() > f64::from(i32::MAX) {
            return None;
        }
        let k = k as i32;
        ((q.powi(k) - t).abs() <= QLATTICE_MEMBER_RTOL * t).then_some(k)
    }

    /// Exponent `k` with `t = q^k` on a q-lattice.
    pub fn q_exponent_of(&self, t: f64) -> Result<i32> {
        match &self.kind {
            ScaleKind::QLattice { kmin, .. } => Ok(kmin + self.index_of(t)? as i32),
            _ => Err(Error::FamilyMismatch("q-lattice")),
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        match &self.kind {
            ScaleKind::Real { lo, hi } => *lo <= t && t <= *hi,
            _ => self.index_of(t).is_ok(),
        }
    }

    /// Canonical representative of `t` (the exact stored lattice point).
    pub fn canonical(&self, t: f64) -> Result<f64> {
        match &self.kind {
            ScaleKind::Real { .. } => {
                if self.contains(t) {
                    Ok(t)
                } else {
                    Err(Error::NotInScale(t))
                }
            }
            _ => Ok(self.point(self.index_of(t)?)),
        }
    }

    /// Forward jump operator: the next point above `t`, or `t` at the maximum.
    pub fn sigma(&self, t: f64) -> Result<f64> {
        match &self.kind {
            ScaleKind::Real { .. } => self.canonical(t),
            _ => {
                let i = self.index_of(t)?;
                Ok(self.point((i + 1).min(self.len() - 1)))
            }
        }
    }

    /// Backward jump operator: the previous point below `t`, or `t` at the minimum.
    pub fn rho(&self, t: f64) -> Result<f64> {
        match &self.kind {
            ScaleKind::Real { .. } => self.canonical(t),
            _ => {
                let i = self.index_of(t)?;
                Ok(self.point(i.saturating_sub(1)))
            }
        }
    }

    /// Graininess `sigma(t) - t`.
    pub fn mu(&self, t: f64) -> Result<f64> {
        match &self.kind {
            ScaleKind::Real { .. } => self.canonical(t).map(|_| 0.0),
            _ => {
                let i = self.index_of(t)?;
                if i + 1 == self.len() {
                    Ok(0.0)
                } else {
                    Ok(self.point(i + 1) - self.point(i))
                }
            }
        }
    }

    pub fn classify(&self, t: f64) -> Result<PointClass> {
        let s = self.sigma(t)?;
        let r = self.rho(t)?;
        let t = self.canonical(t)?;
        let side = |scattered: bool| if scattered { Side::Scattered } else { Side::Dense };
        Ok(PointClass { right: side(s > t), left: side(r < t), is_max: t == self.max(), is_min: t == self.min() })
    }

    /// Points `t` with `a <= t < b`, ascending. Discrete scales only.
    pub fn grid_points(&self, a: f64, b: f64) -> Result<Vec<f64>> {
        let (ia, ib) = self.index_range(a, b)?;
        Ok((ia..ib).map(|i| self.point(i)).collect())
    }

    /// Index range `[ia, ib)` covering `[a, b)`.
    pub(crate) fn index_range(&self, a: f64, b: f64) -> Result<(usize, usize)> {
        if !self.is_discrete() {
            return Err(Error::ContinuousScale);
        }
        let ia = self.index_of(a)?;
        let ib = self.index_of(b)?;
        if ia >= ib {
            return Err(Error::EmptyRange { a, b });
        }
        Ok((ia, ib))
    }

    /// Ordered `(t, sigma(t), mu(t))` triples over `[a, b)`.
    pub(crate) fn steps(&self, a: f64, b: f64) -> Result<Vec<(f64, f64, f64)>> {
        let (ia, ib) = self.index_range(a, b)?;
        Ok((ia..ib)
            .map(|i| {
                let (t, s) = (self.point(i), self.point(i + 1));
                (t, s, s - t)
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_examples() {
        let z = TimeScale::integer(0, 4).unwrap();
        assert_eq!(z.sigma(2.0).unwrap(), 3.0);
        assert_eq!(z.sigma(4.0).unwrap(), 4.0);
        let r = TimeScale::real(0.0, 1.0).unwrap();
        assert_eq!(r.sigma(0.5).unwrap(), 0.5);
        let q = TimeScale::qlattice(2.0, 0, 3).unwrap();
        // successor by scanning the sorted list
        let pts: Vec<f64> = (0..q.len()).map(|i| q.point(i)).collect();
        let succ = *pts.iter().find(|&&p| p > 2.0).unwrap();
        assert_eq!(q.sigma(2.0).unwrap(), succ);
        assert_eq!(succ, 4.0);
    }

    #[test]
    fn rho_examples() {
        let z = TimeScale::integer(0, 4).unwrap();
        assert_eq!(z.rho(2.0).unwrap(), 1.0);
        assert_eq!(z.rho(0.0).unwrap(), 0.0);
        let r = TimeScale::real(0.0, 1.0).unwrap();
        assert_eq!(r.rho(0.5).unwrap(), 0.5);
        let g = TimeScale::grid(vec![0.0, 0.5, 2.0, 3.0]).unwrap();
        assert_eq!(g.rho(2.0).unwrap(), 0.5);
    }

    #[test]
    fn mu_examples() {
        assert_eq!(TimeScale::integer(0, 4).unwrap().mu(1.0).unwrap(), 1.0);
        let r = TimeScale::real(0.0, 1.0).unwrap();
        for t in [0.0, 0.25, 1.0] {
            assert_eq!(r.mu(t).unwrap(), 0.0);
        }
        assert_eq!(TimeScale::qlattice(3.0, 0, 2).unwrap().mu(3.0).unwrap(), 6.0);
    }

    #[test]
    fn classify_examples() {
        let z = TimeScale::integer(0, 4).unwrap();
        assert_eq!(z.classify(2.0).unwrap().tag(), PointTag::Isolated);
        let r = TimeScale::real(0.0, 1.0).unwrap();
        assert_eq!(r.classify(0.5).unwrap().tag(), PointTag::Dense);
        let g = TimeScale::grid(vec![0.0, 1.0, 1.5]).unwrap();
        let c = g.classify(0.0).unwrap();
        assert_eq!(c.tag(), PointTag::RightScattered);
        assert!(c.is_min && !c.is_max);
        let top = g.classify(1.5).unwrap();
        assert!(top.is_max && top.is_right_dense() && top.is_left_scattered());
    }

    #[test]
    fn grid_points_examples() {
        let z = TimeScale::integer(0, 4).unwrap();
        assert_eq!(z.grid_points(0.0, 4.0).unwrap(), vec![0.0, 1.0, 2.0, 3.0]);
        let q = TimeScale::qlattice(2.0, 0, 3).unwrap();
        assert_eq!(q.grid_points(1.0, 8.0).unwrap(), vec![1.0, 2.0, 4.0]);
        let g = TimeScale::grid(vec![0.0, 1.0, 1.5, 3.0]).unwrap();
        assert_eq!(g.grid_points(1.0, 3.0).unwrap(), vec![1.0, 1.5]);
    }

    #[test]
    fn grid_points_errors() {
        let r = TimeScale::real(0.0, 1.0).unwrap();
        assert_eq!(r.grid_points(0.0, 1.0), Err(Error::ContinuousScale));
        let z = TimeScale::integer(0, 4).unwrap();
        assert_eq!(z.grid_points(0.5, 2.0), Err(Error::NotInScale(0.5)));
        assert!(matches!(z.grid_points(3.0, 3.0), Err(Error::EmptyRange { .. })));
        assert!(matches!(z.grid_points(3.0, 1.0), Err(Error::EmptyRange { .. })));
    }

    #[test]
    fn membership_errors() {
        let z = TimeScale::integer(0, 4).unwrap();
        assert_eq!(z.sigma(5.0), Err(Error::NotInScale(5.0)));
        assert_eq!(z.mu(1.5), Err(Error::NotInScale(1.5)));
        let q = TimeScale::qlattice(2.0, 0, 3).unwrap();
        assert!(q.contains(8.0) && !q.contains(3.0) && !q.contains(16.0) && !q.contains(0.0));
        // tolerant recovery of a slightly perturbed lattice point
        assert_eq!(q.canonical(4.0 * (1.0 + 1e-14)).unwrap(), 4.0);
        let r = TimeScale::real(0.0, 1.0).unwrap();
        assert_eq!(r.classify(1.5), Err(Error::NotInScale(1.5)));
    }

    #[test]
    fn constructor_invariants() {
        assert!(TimeScale::grid(vec![0.0]).is_err());
        assert!(TimeScale::grid(vec![0.0, 0.0, 1.0]).is_err());
        assert!(TimeScale::integer(3, 3).is_err());
        assert!(TimeScale::qlattice(1.0, 0, 3).is_err());
        assert!(TimeScale::qlattice(2.0, 3, 3).is_err());
        assert!(TimeScale::real(1.0, 0.0).is_err());
    }

    #[test]
    fn json_forms() {
        let z = TimeScale::from_json(r#"{"kind":"integer","lo":0,"hi":4}"#).unwrap();
        assert_eq!(z, TimeScale::integer(0, 4).unwrap());
        let q = TimeScale::from_json(r#"{"kind":"qlattice","q":2.0,"kmin":0,"kmax":6}"#).unwrap();
        assert_eq!(q.max(), 64.0);
        let g = TimeScale::from_json(r#"{"kind":"grid","points":[0,0.5,2]}"#).unwrap();
        assert_eq!(g.len(), 3);
        let r = TimeScale::from_json(r#"{"kind":"real","lo":0.0,"hi":1.0}"#).unwrap();
        assert!(!r.is_discrete());
        assert!(TimeScale::from_json(r#"{"kind":"integer","lo":4,"hi":0}"#).is_err());
        let back = serde_json::to_string(&q).unwrap();
        assert_eq!(TimeScale::from_json(&back).unwrap(), q);
    }
}
