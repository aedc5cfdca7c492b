//! Coefficient sets `U`, `V`, `W` of the sub-, main- and superdiagonal, the
//! ellipses `E(u, w)` and the spectral inclusion sets built from them.
//!
//! Continuous sets are discretized for every set-level quantifier, but the
//! modulus extremes and distances to `V` use closed forms, so `delta` and the
//! upper-bound test are exact for intervals and circular arcs.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ComplexPoint = Complex64;

/// Slack for boundary and degeneracy decisions (`f ~ 0`, `|u| ~ |w|`).
pub const TOL_CASE: f64 = 1e-9;

/// Default discretization density of continuous sets.
pub const DEFAULT_SAMPLES: usize = 257;

/// Upper limit on the number of points `lower_spectral_bound` will emit.
pub const LOWER_BOUND_BUDGET: usize = 5_000_000;

/// Geometric description of a compact coefficient set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SetShape {
    Points { points: Vec<ComplexPoint> },
    Interval { lo: f64, hi: f64 },
    Circle { radius: f64, angle_lo: f64, angle_hi: f64 },
}

/// A non-empty compact subset of the complex plane together with its samples.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolSet {
    shape: SetShape,
    samples: Vec<ComplexPoint>,
}

fn finite(z: ComplexPoint) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

fn angle_in_arc(theta: f64, lo: f64, hi: f64) -> bool {
    if hi - lo >= TAU {
        return true;
    }
    (theta - lo).rem_euclid(TAU) <= hi - lo
}

impl SymbolSet {
    pub fn new(shape: SetShape, sample_count: usize) -> Result<Self> {
        if sample_count == 0 {
            return Err(Error::InvalidSet("sample count must be positive".into()));
        }
        let samples = match &shape {
            SetShape::Points { points } => {
                if points.is_empty() {
                    return Err(Error::InvalidSet("empty point list".into()));
                }
                if !points.iter().copied().all(finite) {
                    return Err(Error::InvalidSet("non-finite point".into()));
                }
                points.clone()
            }
            &SetShape::Interval { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                    return Err(Error::InvalidSet(format!("bad interval [{lo}, {hi}]")));
                }
                grid(lo, hi, sample_count)
                    .map(|x| ComplexPoint::new(x, 0.0))
                    .collect()
            }
            &SetShape::Circle { radius, angle_lo, angle_hi } => {
                if !(radius.is_finite() && angle_lo.is_finite() && angle_hi.is_finite())
                    || radius < 0.0
                    || angle_lo > angle_hi
                {
                    return Err(Error::InvalidSet(format!(
                        "bad circle arc r = {radius}, [{angle_lo}, {angle_hi}]"
                    )));
                }
                grid(angle_lo, angle_hi, sample_count)
                    .map(|t| ComplexPoint::from_polar(radius, t))
                    .collect()
            }
        };
        Ok(Self { shape, samples })
    }

    pub fn points(points: Vec<ComplexPoint>) -> Result<Self> {
        let n = points.len().max(1);
        Self::new(SetShape::Points { points }, n)
    }

    pub fn point(z: ComplexPoint) -> Self {
        Self::points(vec![z]).expect("single finite point")
    }

    pub fn real_points(xs: &[f64]) -> Result<Self> {
        Self::points(xs.iter().map(|&x| ComplexPoint::new(x, 0.0)).collect())
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(SetShape::Interval { lo, hi }, DEFAULT_SAMPLES)
    }

    pub fn circle_arc(radius: f64, angle_lo: f64, angle_hi: f64) -> Result<Self> {
        Self::new(SetShape::Circle { radius, angle_lo, angle_hi }, DEFAULT_SAMPLES)
    }

    /// The full circle of the given radius around 0.
    pub fn circle(radius: f64) -> Result<Self> {
        Self::circle_arc(radius, 0.0, TAU)
    }

    pub fn with_samples(self, sample_count: usize) -> Result<Self> {
        Self::new(self.shape, sample_count)
    }

    pub fn shape(&self) -> &SetShape {
        &self.shape
    }

    pub fn samples(&self) -> &[ComplexPoint] {
        &self.samples
    }

    pub fn sample_count(&self) -> usize {
        self.samples.len()
    }

    /// `(min |z|, max |z|)` over the set, in closed form.
    pub fn modulus_range(&self) -> (f64, f64) {
        match self.shape {
            SetShape::Points { ref points } => points.iter().fold((f64::INFINITY, 0.0), |acc, z| {
                let m = z.norm();
                (acc.0.min(m), acc.1.max(m))
            }),
            SetShape::Interval { lo, hi } => {
                let max = lo.abs().max(hi.abs());
                let min = if lo <= 0.0 && hi >= 0.0 { 0.0 } else { lo.abs().min(hi.abs()) };
                (min, max)
            }
            SetShape::Circle { radius, .. } => (radius, radius),
        }
    }

    /// Point of the set at parameter `t` in `[0, 1]`.
    ///
    /// For point lists the parameter selects an element, `t = 1` maps to the last one.
    pub fn param_point(&self, t: f64) -> ComplexPoint {
        let t = t.clamp(0.0, 1.0);
        match self.shape {
            SetShape::Points { ref points } => {
                let k = ((t * points.len() as f64) as usize).min(points.len() - 1);
                points[k]
            }
            SetShape::Interval { lo, hi } => ComplexPoint::new((lo + t * (hi - lo)).clamp(lo, hi), 0.0),
            SetShape::Circle { radius, angle_lo, angle_hi } => {
                ComplexPoint::from_polar(radius, angle_lo + t * (angle_hi - angle_lo))
            }
        }
    }

    /// Euclidean distance from `z` to the set (closed form for every variant).
    pub fn distance(&self, z: ComplexPoint) -> f64 {
        match self.shape {
            SetShape::Points { ref points } => {
                points.iter().map(|p| (z - p).norm()).fold(f64::INFINITY, f64::min)
            }
            SetShape::Interval { lo, hi } => {
                (ComplexPoint::new(z.re.clamp(lo, hi), 0.0) - z).norm()
            }
            SetShape::Circle { radius, angle_lo, angle_hi } => {
                if z.norm() > 0.0 && angle_in_arc(z.arg(), angle_lo, angle_hi) {
                    (z.norm() - radius).abs()
                } else if z.norm() == 0.0 {
                    radius
                } else {
                    let a = ComplexPoint::from_polar(radius, angle_lo);
                    let b = ComplexPoint::from_polar(radius, angle_hi);
                    (z - a).norm().min((z - b).norm())
                }
            }
        }
    }

    /// Largest distance from `z` to a point of the set.
    pub fn max_distance(&self, z: ComplexPoint) -> f64 {
        match self.shape {
            SetShape::Points { ref points } => points.iter().map(|p| (z - p).norm()).fold(0.0, f64::max),
            SetShape::Interval { lo, hi } => {
                let a = ComplexPoint::new(lo, 0.0);
                let b = ComplexPoint::new(hi, 0.0);
                (z - a).norm().max((z - b).norm())
            }
            SetShape::Circle { radius, angle_lo, angle_hi } => {
                let antipode = if z.norm() > 0.0 { z.arg() + std::f64::consts::PI } else { angle_lo };
                if angle_in_arc(antipode, angle_lo, angle_hi) {
                    z.norm() + radius
                } else {
                    let a = ComplexPoint::from_polar(radius, angle_lo);
                    let b = ComplexPoint::from_polar(radius, angle_hi);
                    (z - a).norm().max((z - b).norm())
                }
            }
        }
    }

    pub fn contains(&self, z: ComplexPoint, tol: f64) -> bool {
        match self.shape {
            SetShape::Points { ref points } => points.iter().any(|p| (z - p).norm() <= tol),
            _ => self.distance(z) <= tol,
        }
    }

    /// True when every element of the set is real.
    pub fn is_real(&self) -> bool {
        match self.shape {
            SetShape::Points { ref points } => points.iter().all(|z| z.im == 0.0),
            SetShape::Interval { .. } => true,
            SetShape::Circle { radius, angle_lo, angle_hi } => {
                radius == 0.0 || (angle_lo == angle_hi && (angle_lo.sin() * radius) == 0.0)
            }
        }
    }
}

fn grid(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> {
    (0..count).map(move |k| {
        if count == 1 {
            lo
        } else if k == count - 1 {
            hi
        } else {
            lo + (hi - lo) * (k as f64 / (count - 1) as f64)
        }
    })
}

/// The triple `(U, V, W)` with cached modulus extremes and `delta`.
#[derive(Clone, Debug, PartialEq)]
pub struct TriSymbolSet {
    u: SymbolSet,
    v: SymbolSet,
    w: SymbolSet,
    u_range: (f64, f64),
    v_range: (f64, f64),
    w_range: (f64, f64),
    delta: f64,
}

impl TriSymbolSet {
    pub fn new(u: SymbolSet, v: SymbolSet, w: SymbolSet) -> Self {
        let u_range = u.modulus_range();
        let v_range = v.modulus_range();
        let w_range = w.modulus_range();
        let delta = v_range.0 - (u_range.1 + w_range.1);
        Self { u, v, w, u_range, v_range, w_range, delta }
    }

    /// `U = {e^g}`, `V = [-a, a]`, `W = {e^-g}`.
    pub fn hatano_nelson(g: f64, a: f64) -> Result<Self> {
        Ok(Self::new(
            SymbolSet::point(ComplexPoint::new(g.exp(), 0.0)),
            SymbolSet::interval(-a, a)?,
            SymbolSet::point(ComplexPoint::new((-g).exp(), 0.0)),
        ))
    }

    /// `U = W = {1}` with a real potential set.
    pub fn anderson(v: SymbolSet) -> Self {
        let one = SymbolSet::point(ComplexPoint::new(1.0, 0.0));
        Self::new(one.clone(), v, one)
    }

    /// `U = {1}`, `V = {0}`, `W` the unit circle.
    pub fn feinberg_zee() -> Self {
        Self::new(
            SymbolSet::point(ComplexPoint::new(1.0, 0.0)),
            SymbolSet::point(ComplexPoint::new(0.0, 0.0)),
            SymbolSet::circle(1.0).expect("unit circle"),
        )
    }

    pub fn u(&self) -> &SymbolSet {
        &self.u
    }
    pub fn v(&self) -> &SymbolSet {
        &self.v
    }
    pub fn w(&self) -> &SymbolSet {
        &self.w
    }

    pub fn u_star_max(&self) -> f64 {
        self.u_range.1
    }
    pub fn u_star_min(&self) -> f64 {
        self.u_range.0
    }
    pub fn v_star_max(&self) -> f64 {
        self.v_range.1
    }
    pub fn v_star_min(&self) -> f64 {
        self.v_range.0
    }
    pub fn w_star_max(&self) -> f64 {
        self.w_range.1
    }
    pub fn w_star_min(&self) -> f64 {
        self.w_range.0
    }

    /// `v_* - (u^* + w^*)`.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Number of sampled triples in `U x V x W`.
    pub fn triple_count(&self) -> usize {
        self.u.sample_count() * self.v.sample_count() * self.w.sample_count()
    }

    /// Distance from `z` to `V`.
    pub fn distance_to_v(&self, z: ComplexPoint) -> f64 {
        self.v.distance(z)
    }
}

/// Convenience constructor matching the set-level operation of the same name.
pub fn make_tri_symbol_set(u: SymbolSet, v: SymbolSet, w: SymbolSet) -> TriSymbolSet {
    TriSymbolSet::new(u, v, w)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    /// `|u| > |w|`
    Ccw,
    /// `|u| < |w|`
    Cw,
    /// `|u| = |w|`: the ellipse collapses onto a segment.
    Degenerate,
}

/// The ellipse `E(u, w)` centered at 0 traced by `phi -> u e^{i phi} + w e^{-i phi}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipseGeometry {
    pub u: ComplexPoint,
    pub w: ComplexPoint,
    pub semi_major: f64,
    pub semi_minor: f64,
    /// One focus; the other one is `-focus`.
    pub focus: ComplexPoint,
    pub orientation: Orientation,
}

impl EllipseGeometry {
    pub fn point_at(&self, phi: f64) -> ComplexPoint {
        self.u * ComplexPoint::from_polar(1.0, phi) + self.w * ComplexPoint::from_polar(1.0, -phi)
    }
}

pub fn ellipse(u: ComplexPoint, w: ComplexPoint) -> EllipseGeometry {
    let (mu, mw) = (u.norm(), w.norm());
    let orientation = if (mu - mw).abs() <= TOL_CASE {
        Orientation::Degenerate
    } else if mu > mw {
        Orientation::Ccw
    } else {
        Orientation::Cw
    };
    EllipseGeometry {
        u,
        w,
        semi_major: mu + mw,
        semi_minor: (mu - mw).abs(),
        focus: 2.0 * (u * w).sqrt(),
        orientation,
    }
}

/// `|v + 2 sqrt(uw)| + |v - 2 sqrt(uw)| - 2(|u| + |w|)`.
///
/// Negative inside `E(u, w)`, zero on it, positive outside.
pub fn ellipse_eval(u: ComplexPoint, w: ComplexPoint, v: ComplexPoint) -> f64 {
    let f = 2.0 * (u * w).sqrt();
    (v + f).norm() + (v - f).norm() - 2.0 * (u.norm() + w.norm())
}

/// Samples of the lower bound `V + E(U, W)`: for every sampled triple the curve
/// `v + u e^{i phi} + w e^{-i phi}` at `angles` equally spaced angles.
pub fn lower_spectral_bound(sets: &TriSymbolSet, angles: usize) -> Result<Vec<ComplexPoint>> {
    let total = sets.triple_count().saturating_mul(angles);
    if total > LOWER_BOUND_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "lower bound would emit {total} points (limit {LOWER_BOUND_BUDGET})"
        )));
    }
    let phases: Vec<(ComplexPoint, ComplexPoint)> = (0..angles)
        .map(|k| {
            let t = ComplexPoint::from_polar(1.0, TAU * (k as f64 / angles as f64));
            (t, t.conj())
        })
        .collect();
    let mut out = Vec::with_capacity(total);
    for &u in sets.u.samples() {
        for &w in sets.w.samples() {
            for &v in sets.v.samples() {
                out.extend(phases.iter().map(|&(t, tc)| v + u * t + w * tc));
            }
        }
    }
    Ok(out)
}

/// Membership in the upper bound `V + (u^* + w^*) D` (closed disk).
pub fn upper_spectral_bound_contains(sets: &TriSymbolSet, lambda: ComplexPoint) -> bool {
    let r = sets.u_star_max() + sets.w_star_max();
    sets.distance_to_v(lambda) <= r + 8.0 * f64::EPSILON * (1.0 + r + lambda.norm())
}

/// True when `lambda` lies in the hole excluded from the spectrum of every
/// bi-infinite operator with diagonals in `U`, `V`, `W` by diagonal dominance.
pub fn spectral_hole(sets: &TriSymbolSet, lambda: ComplexPoint) -> bool {
    let reach = sets.v().max_distance(lambda);
    let sub = sets.u_star_min() - sets.w_star_max();
    let sup = sets.w_star_min() - sets.u_star_max();
    (sub > 0.0 && reach < sub) || (sup > 0.0 && reach < sup)
}

/// `V + [-2u^*, 2u^*]` as a sorted union of disjoint closed intervals.
pub fn selfadjoint_spectrum(u: &SymbolSet, v: &SymbolSet) -> Result<Vec<(f64, f64)>> {
    if !v.is_real() {
        return Err(Error::NotSelfadjoint);
    }
    let r = 2.0 * u.modulus_range().1;
    let mut pieces: Vec<(f64, f64)> = match *v.shape() {
        SetShape::Interval { lo, hi } => vec![(lo - r, hi + r)],
        _ => v.samples().iter().map(|z| (z.re - r, z.re + r)).collect(),
    };
    pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pieces.len());
    for (lo, hi) in pieces {
        match merged.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    Ok(merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::E;

    fn c(re: f64, im: f64) -> ComplexPoint {
        ComplexPoint::new(re, im)
    }

    #[test]
    fn delta_examples() {
        let t = TriSymbolSet::new(SymbolSet::point(c(1., 0.)), SymbolSet::point(c(5., 0.)), SymbolSet::point(c(1., 0.)));
        assert_eq!(t.delta(), 3.0);

        let hn = TriSymbolSet::hatano_nelson(1.0, 2.0).unwrap();
        assert!((hn.u_star_max() - E).abs() < 1e-15);
        assert!((hn.w_star_max() - 1.0 / E).abs() < 1e-15);
        assert_eq!(hn.v_star_min(), 0.0);
        assert!((hn.delta() - (-3.0862)).abs() < 1e-4);

        let f = TriSymbolSet::new(SymbolSet::point(c(3., 0.)), SymbolSet::point(c(0., 0.)), SymbolSet::point(c(0., 1.)));
        assert_eq!((f.u_star_max(), f.w_star_max(), f.delta()), (3.0, 1.0, -4.0));
    }

    #[test]
    fn empty_and_bad_sets_rejected() {
        assert!(matches!(SymbolSet::points(vec![]), Err(Error::InvalidSet(_))));
        assert!(SymbolSet::interval(1.0, -1.0).is_err());
        assert!(SymbolSet::circle_arc(-1.0, 0.0, 1.0).is_err());
        assert!(SymbolSet::points(vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn continuous_samples_include_endpoints() {
        let s = SymbolSet::interval(-2.0, 2.0).unwrap();
        assert_eq!(s.sample_count(), DEFAULT_SAMPLES);
        assert_eq!(s.samples()[0], c(-2.0, 0.0));
        assert_eq!(s.samples()[DEFAULT_SAMPLES - 1], c(2.0, 0.0));
        assert!(s.samples().iter().all(|z| s.contains(*z, 0.0)));
        let arc = SymbolSet::circle_arc(2.0, 0.0, 1.0).unwrap();
        assert!(arc.samples().iter().all(|z| arc.contains(*z, 1e-12)));
        assert_eq!(SymbolSet::interval(-3.0, -1.0).unwrap().modulus_range(), (1.0, 3.0));
    }

    #[test]
    fn ellipse_examples() {
        let e = ellipse(c(3.0, 0.0), c(0.0, 1.0));
        assert_eq!((e.semi_major, e.semi_minor), (4.0, 2.0));
        assert_eq!(e.orientation, Orientation::Ccw);

        let e = ellipse(c(1.0, 0.0), c(1.0, 0.0));
        assert_eq!((e.semi_major, e.semi_minor), (2.0, 0.0));
        assert_eq!(e.orientation, Orientation::Degenerate);
        assert!((e.focus - c(2.0, 0.0)).norm() < 1e-15);

        let e = ellipse(c(1.0, 0.0), c(0.0, 0.0));
        assert_eq!((e.semi_major, e.semi_minor), (1.0, 1.0));
        assert_eq!(ellipse(c(0.5, 0.0), c(0.0, 2.0)).orientation, Orientation::Cw);
    }

    #[test]
    fn ellipse_eval_examples() {
        let f = ellipse_eval(c(E, 0.0), c(1.0 / E, 0.0), c(2.0, 0.0));
        assert!((f - (4.0 - 2.0 * (E + 1.0 / E))).abs() < 1e-12);
        assert!((f - (-2.1723)).abs() < 1e-4);
        assert!((ellipse_eval(c(1., 0.), c(1., 0.), c(5., 0.)) - 6.0).abs() < 1e-15);
        assert!(ellipse_eval(c(1., 0.), c(1., 0.), c(2., 0.)).abs() < 1e-15);
    }

    #[test]
    fn lower_bound_examples() {
        let anderson = TriSymbolSet::anderson(SymbolSet::point(c(0., 0.)));
        let pts = lower_spectral_bound(&anderson, 64).unwrap();
        assert!(pts.iter().all(|z| z.im.abs() < 1e-15 && z.re.abs() <= 2.0 + 1e-15));
        assert!(pts.iter().any(|z| (z.re - 2.0).abs() < 1e-12));
        assert!(pts.iter().any(|z| (z.re + 2.0).abs() < 1e-12));

        // Every circle |z - w e^{-i phi}| = 1 lies in the closed radius-2 disk and reaches its rim.
        let fz = TriSymbolSet::feinberg_zee();
        let pts = lower_spectral_bound(&fz, 64).unwrap();
        assert!(pts.iter().all(|z| z.norm() <= 2.0 + 1e-12));
        assert!(pts.iter().filter(|z| (z.norm() - 2.0).abs() < 1e-9).count() > 32);

        let hn = TriSymbolSet::new(SymbolSet::point(c(E, 0.)), SymbolSet::point(c(0., 0.)), SymbolSet::point(c(1.0 / E, 0.)));
        let pts = lower_spectral_bound(&hn, 256).unwrap();
        let cc = 2.0 * 1f64.cosh();
        let ss = 2.0 * 1f64.sinh();
        assert!(pts.iter().all(|z| ((z.re / cc).powi(2) + (z.im / ss).powi(2) - 1.0).abs() < 1e-12));
        let max_re = pts.iter().map(|z| z.re).fold(f64::MIN, f64::max);
        let max_im = pts.iter().map(|z| z.im).fold(f64::MIN, f64::max);
        assert!((max_re - cc).abs() < 1e-12 && (max_im - ss).abs() < 1e-12);
    }

    #[test]
    fn lower_bound_budget() {
        let big = TriSymbolSet::new(
            SymbolSet::interval(0.0, 1.0).unwrap(),
            SymbolSet::interval(0.0, 1.0).unwrap(),
            SymbolSet::interval(0.0, 1.0).unwrap(),
        );
        assert!(matches!(lower_spectral_bound(&big, 257), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn upper_bound_examples() {
        let hn = TriSymbolSet::hatano_nelson(1.0, 2.0).unwrap();
        assert!(!upper_spectral_bound_contains(&hn, c(2.0, 4.0)));
        assert!(upper_spectral_bound_contains(&hn, c(1.0, 0.0)));
        let a = TriSymbolSet::anderson(SymbolSet::point(c(0., 0.)));
        assert!(upper_spectral_bound_contains(&a, c(2.0, 0.0)));
        assert!(!upper_spectral_bound_contains(&a, c(2.0 + 1e-12, 0.0)));
    }

    #[test]
    fn hole_examples() {
        let hn = TriSymbolSet::hatano_nelson(1.0, 2.0).unwrap();
        assert!(spectral_hole(&hn, c(0.0, 0.0)));
        assert!(!spectral_hole(&hn, c(0.4, 0.0)));
        let a = TriSymbolSet::anderson(SymbolSet::point(c(0., 0.)));
        for lam in [c(0., 0.), c(0.1, 0.2), c(5.0, 0.0)] {
            assert!(!spectral_hole(&a, lam));
        }
        // superdiagonal dominance is the mirror case
        let m = TriSymbolSet::new(SymbolSet::point(c(0.1, 0.)), SymbolSet::point(c(0., 0.)), SymbolSet::point(c(2., 0.)));
        assert!(spectral_hole(&m, c(0.5, 0.5)));
    }

    #[test]
    fn selfadjoint_examples() {
        let one = SymbolSet::point(c(1., 0.));
        assert_eq!(selfadjoint_spectrum(&one, &SymbolSet::interval(-1.5, 1.5).unwrap()).unwrap(), vec![(-3.5, 3.5)]);
        assert_eq!(selfadjoint_spectrum(&one, &SymbolSet::real_points(&[0.0, 3.0]).unwrap()).unwrap(), vec![(-2.0, 5.0)]);
        assert_eq!(
            selfadjoint_spectrum(&one, &SymbolSet::real_points(&[0.0, 10.0]).unwrap()).unwrap(),
            vec![(-2.0, 2.0), (8.0, 12.0)]
        );
        let zero = SymbolSet::point(c(0., 0.));
        assert_eq!(selfadjoint_spectrum(&zero, &SymbolSet::real_points(&[7.0]).unwrap()).unwrap(), vec![(7.0, 7.0)]);
        assert!(matches!(
            selfadjoint_spectrum(&one, &SymbolSet::point(c(0., 1.))),
            Err(Error::NotSelfadjoint)
        ));
    }

    #[test]
    fn arc_distances() {
        let arc = SymbolSet::circle_arc(1.0, 0.0, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((arc.distance(c(2.0, 2.0)) - (8f64.sqrt() - 1.0)).abs() < 1e-12);
        assert!((arc.distance(c(-1.0, 0.0)) - 2f64.sqrt()).abs() < 1e-12);
        assert!((arc.max_distance(c(-1.0, -1.0)) - (2f64.sqrt() + 1.0)).abs() < 1e-12);
        // brute force against dense samples
        let dense = arc.clone().with_samples(20001).unwrap();
        for z in [c(0.3, -0.7), c(-2.0, 0.5), c(0.1, 0.1)] {
            let d = dense.samples().iter().map(|p| (z - p).norm()).fold(f64::INFINITY, f64::min);
            let m = dense.samples().iter().map(|p| (z - p).norm()).fold(0.0, f64::max);
            assert!((arc.distance(z) - d).abs() < 1e-6);
            assert!((arc.max_distance(z) - m).abs() < 1e-6);
        }
    }

    fn cp() -> impl Strategy<Value = ComplexPoint> {
        (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(a, b)| c(a, b))
    }

    proptest! {
        #[test]
        fn eval_symmetries(u in cp(), w in cp(), v in cp()) {
            let f = ellipse_eval(u, w, v);
            prop_assert_eq!(f, ellipse_eval(w, u, v));
            prop_assert_eq!(f, ellipse_eval(u, w, -v));
            // the other branch of the square root
            let s = -2.0 * (u * w).sqrt();
            let g = (v + s).norm() + (v - s).norm() - 2.0 * (u.norm() + w.norm());
            prop_assert_eq!(f, g);
        }

        #[test]
        fn eval_rotation_invariant(u in cp(), w in cp(), v in cp(), theta in 0.0..TAU) {
            let r = ComplexPoint::from_polar(1.0, theta);
            let g = ellipse_eval(u * r, w * r.conj(), v);
            prop_assert!((ellipse_eval(u, w, v) - g).abs() <= 1e-11 * (1.0 + v.norm() + u.norm() + w.norm()));
        }

        #[test]
        fn parametrization_on_ellipse(u in cp(), w in cp()) {
            let e = ellipse(u, w);
            for k in 0..256 {
                let z = e.point_at(TAU * k as f64 / 256.0);
                prop_assert!(ellipse_eval(u, w, z).abs() <= 1e-10);
            }
        }

        #[test]
        fn bound_ordering_and_hole_disjointness(
            u in 0.0..3.0f64, w in 0.0..3.0f64, a in 0.0..2.0f64,
            lre in -6.0..6.0f64, lim in -6.0..6.0f64,
        ) {
            let sets = TriSymbolSet::new(
                SymbolSet::point(c(u, 0.0)),
                SymbolSet::interval(-a, a).unwrap().with_samples(9).unwrap(),
                SymbolSet::circle(w).unwrap().with_samples(9).unwrap(),
            );
            let cloud = lower_spectral_bound(&sets, 32).unwrap();
            prop_assert!(cloud.iter().all(|z| upper_spectral_bound_contains(&sets, *z)));
            let lam = c(lre, lim);
            if spectral_hole(&sets, lam) {
                prop_assert!(cloud.iter().all(|z| (z - lam).norm() > 1e-9));
            }
        }
    }
}
