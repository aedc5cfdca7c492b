//! Finite section method with adaptive cut-off windows: window planning,
//! the index-compensating shift, window solves, the full FSM baseline and
//! per-window stability data.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fredholm::{classify_sets, classify_triple, delta_certificate, dominance_certificate, Case, Dominance};
use crate::linalg::{lanczos_largest, lower_substitution, thomas, upper_substitution};
use crate::operator::{field_span, materialize, toeplitz_inverse_norm_triangular, BandedSystem};
use crate::pseudoergodic::{DiagonalField, FieldOrientation, Triple};
use crate::symbol_sets::{ComplexPoint, TriSymbolSet, TOL_CASE};

type C = ComplexPoint;

/// Largest `|index|` the planner will look at.
pub const DEFAULT_HORIZON: i64 = 1 << 21;

/// Windows above this size get no inverse norm.
pub const DEFAULT_NORM_CAP: usize = 5000;

/// Above this size inverse norms use Lanczos on `(A^* A)^{-1}` instead of a dense SVD.
pub const DENSE_NORM_MAX: usize = 400;

const NORM_RTOL: f64 = 1e-6;

/// Predicate deciding whether a window `{lo, ..., hi}` qualifies at step `n`.
pub trait WindowMatcher {
    fn window_ok(&self, field: &DiagonalField, lo: i64, hi: i64, n: usize) -> bool;

    /// For matchers that test each index on its own, the per-index verdict.
    fn entry_ok(&self, _t: &Triple, _n: usize) -> Option<bool> {
        None
    }

    fn describe(&self) -> String;
}

/// Every entry within `1/n` of a fixed triple.
#[derive(Clone, Copy, Debug)]
pub struct ConstantTarget(pub Triple);

impl WindowMatcher for ConstantTarget {
    fn window_ok(&self, field: &DiagonalField, lo: i64, hi: i64, n: usize) -> bool {
        (lo..=hi).all(|i| self.0.distance(&field.at(i)) < 1.0 / n as f64)
    }

    fn entry_ok(&self, t: &Triple, n: usize) -> Option<bool> {
        Some(self.0.distance(t) < 1.0 / n as f64)
    }

    fn describe(&self) -> String {
        format!("constant {:?}", self.0)
    }
}

/// Window ending at `r` mirrors the start of `prefix` (indexed from 1):
/// `|u_{r-i} - u'_{i+2}| + |v_{r-i} - v'_{i+1}| + |w_{r-i} - w'_i| < 1/n` for `i = 0..n`,
/// terms with prefix index below 1 dropped.
#[derive(Clone, Debug)]
pub struct ReversedPrefix {
    pub prefix: Vec<Triple>,
}

impl ReversedPrefix {
    fn at(&self, j: usize) -> Option<&Triple> {
        j.checked_sub(1).and_then(|k| self.prefix.get(k))
    }
}

impl WindowMatcher for ReversedPrefix {
    fn window_ok(&self, field: &DiagonalField, lo: i64, hi: i64, n: usize) -> bool {
        let eps = 1.0 / n as f64;
        (0..=(hi - lo) as usize).all(|i| {
            let t = field.at(hi - i as i64);
            let (Some(pu), Some(pv)) = (self.at(i + 2), self.at(i + 1)) else {
                return false;
            };
            let dw = self.at(i).map_or(0.0, |p| (t.w - p.w).norm());
            (t.u - pu.u).norm() + (t.v - pv.v).norm() + dw < eps
        })
    }

    fn describe(&self) -> String {
        format!("reversed prefix of length {}", self.prefix.len())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanEntry {
    pub n: usize,
    pub l: i64,
    pub r: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowPlan {
    pub target: Option<Triple>,
    pub matcher: String,
    pub entries: Vec<PlanEntry>,
    pub orientation: FieldOrientation,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

/// Grows `field` to reach index `needed` in geometric steps, never past `horizon`.
fn grow(field: &mut DiagonalField, side: Side, needed: i64, horizon: i64) -> bool {
    if !field.is_extendable() {
        return false;
    }
    match side {
        Side::Right => {
            let hi = field.hi();
            let target = needed.max(hi + (hi - field.lo()).max(4096)).min(horizon);
            target >= needed && field.ensure(field.lo(), target).is_ok()
        }
        Side::Left => {
            let lo = field.lo();
            let target = needed.min(lo - (field.hi() - lo).max(4096)).max(-horizon);
            target <= needed && field.ensure(target, field.hi()).is_ok()
        }
    }
}

/// Nearest qualifying window endpoint beyond `prev`.
///
/// Right side: smallest `r > prev` with `{r - n, ..., r}` qualifying.
/// Left side: largest `l < prev` with `{l, ..., l + n}` qualifying.
/// Windows are clipped to `floor` (index 1 for semi-infinite fields).
fn search(
    field: &mut DiagonalField,
    matcher: &dyn WindowMatcher,
    side: Side,
    prev: i64,
    n: usize,
    horizon: i64,
    floor: Option<i64>,
) -> Result<i64> {
    let span = n as i64;
    let err = || Error::HorizonExceeded {
        side: if side == Side::Right { "right" } else { "left" },
        n,
        horizon,
    };
    let pointwise = matcher.entry_ok(&field.at(field.lo()), n).is_some();
    let clip = |lo: i64| floor.map_or(lo, |f| lo.max(f));
    match side {
        Side::Right => {
            let mut i = clip(prev + 1 - span);
            let mut run = 0i64;
            loop {
                if i > horizon {
                    return Err(err());
                }
                if i > field.hi() && !grow(field, side, i, horizon) {
                    return Err(err());
                }
                let r = i;
                if pointwise {
                    run = if matcher.entry_ok(&field.at(i), n) == Some(true) { run + 1 } else { 0 };
                    if r > prev && run > r - clip(r - span) {
                        return Ok(r);
                    }
                } else if r > prev {
                    let lo = clip(r - span);
                    if lo >= field.lo() && matcher.window_ok(field, lo, r, n) {
                        return Ok(r);
                    }
                }
                i += 1;
            }
        }
        Side::Left => {
            let mut i = prev - 1 + span;
            let mut run = 0i64;
            loop {
                if i < -horizon {
                    return Err(err());
                }
                if i < field.lo() && !grow(field, side, i, horizon) {
                    return Err(err());
                }
                let l = i;
                if pointwise {
                    run = if matcher.entry_ok(&field.at(i), n) == Some(true) { run + 1 } else { 0 };
                    if l < prev && run > span {
                        return Ok(l);
                    }
                } else if l < prev
                    && l + span <= field.hi() && matcher.window_ok(field, l, l + span, n) {
                        return Ok(l);
                    }
                i -= 1;
            }
        }
    }
}

fn ensure_window(field: &mut DiagonalField, lo: i64, hi: i64) -> Result<()> {
    if field.covers(lo, hi) {
        return Ok(());
    }
    field.ensure(lo, hi).map_err(|_| Error::OutOfRange { lo, hi, field_lo: field.lo(), field_hi: field.hi() })
}

/// Windows `[l_n, r_n]`, `n = 1..=n_max`, around a bi-infinite field, from `l_0 = r_0 = 0`.
pub fn plan_windows_bi(field: &mut DiagonalField, target: Triple, n_max: usize) -> Result<WindowPlan> {
    let mut plan = plan_windows_bi_with(field, &ConstantTarget(target), n_max, DEFAULT_HORIZON)?;
    plan.target = Some(target);
    Ok(plan)
}

pub fn plan_windows_bi_with(
    field: &mut DiagonalField,
    matcher: &dyn WindowMatcher,
    n_max: usize,
    horizon: i64,
) -> Result<WindowPlan> {
    if field.orientation() != FieldOrientation::BiInfinite {
        return Err(Error::InvalidInput("bi-infinite plan needs a bi-infinite field".into()));
    }
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be at least 1".into()));
    }
    let (mut l, mut r) = (0i64, 0i64);
    let mut entries = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        r = search(field, matcher, Side::Right, r, n, horizon, None)?;
        l = search(field, matcher, Side::Left, l, n, horizon, None)?;
        entries.push(PlanEntry { n, l, r });
    }
    Ok(WindowPlan { target: None, matcher: matcher.describe(), entries, orientation: FieldOrientation::BiInfinite })
}

/// Windows `[1, r_n]` over a semi-infinite field.
pub fn plan_windows_semi(field: &mut DiagonalField, target: Triple, n_max: usize) -> Result<WindowPlan> {
    let mut plan = plan_windows_semi_with(field, &ConstantTarget(target), n_max, DEFAULT_HORIZON)?;
    plan.target = Some(target);
    Ok(plan)
}

pub fn plan_windows_semi_with(
    field: &mut DiagonalField,
    matcher: &dyn WindowMatcher,
    n_max: usize,
    horizon: i64,
) -> Result<WindowPlan> {
    if field.orientation() != FieldOrientation::SemiInfinite {
        return Err(Error::InvalidInput("semi-infinite plan needs a semi-infinite field".into()));
    }
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be at least 1".into()));
    }
    let mut r = 0i64;
    let mut entries = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        r = search(field, matcher, Side::Right, r, n, horizon, Some(1))?;
        entries.push(PlanEntry { n, l: 1, r });
    }
    Ok(WindowPlan { target: None, matcher: matcher.describe(), entries, orientation: FieldOrientation::SemiInfinite })
}

/// Solves one window: Thomas (banded LU fallback) for `k = 0`, back
/// substitution for `k = -1`, forward substitution for `k = +1`.
pub fn solve_window(sys: &BandedSystem, rhs: &[C]) -> Result<Vec<C>> {
    let n = sys.dim();
    if rhs.len() != n {
        return Err(Error::DimensionError { expected: n, got: rhs.len() });
    }
    match sys.shift_k {
        0 => match thomas(&sys.sub, &sys.main, &sys.sup, rhs) {
            Some(x) => Ok(x),
            None => Ok(sys.to_band().factor()?.solve(rhs)),
        },
        -1 => upper_substitution(&sys.sub, &sys.main, &sys.sup, rhs),
        1 => lower_substitution(&sys.sub, &sys.main, &sys.sup, rhs),
        k => Err(Error::UnsupportedShift(k)),
    }
}

/// `||A_n^{-1}||_2 = 1 / sigma_min(A_n)`, infinite for singular windows.
pub fn inverse_norm(sys: &BandedSystem) -> f64 {
    let n = sys.dim();
    if n <= DENSE_NORM_MAX {
        let s = sys.to_dense().singular_values();
        let smin = s.last().copied().unwrap_or(0.0);
        return if smin > 0.0 { 1.0 / smin } else { f64::INFINITY };
    }
    let Ok(lu) = sys.to_band().factor() else {
        return f64::INFINITY;
    };
    let lam = lanczos_largest(n, |x| lu.solve(&lu.solve_adjoint(x)), NORM_RTOL * 1e-2, 600);
    if lam.is_finite() {
        lam.sqrt()
    } else {
        f64::INFINITY
    }
}

/// Best available theoretical bound on `limsup ||A_n^{-1}||` for the adaptive method.
pub fn stability_cap(sets: &TriSymbolSet, case: Case, target: Triple) -> Option<f64> {
    if let Some(b) = delta_certificate(sets) {
        return Some(b);
    }
    let vmax = sets.v_star_max();
    let (gap, shift) = match (case, dominance_certificate(sets)?) {
        (Case::B, Dominance::Sub) => (sets.u_star_min() - vmax - sets.w_star_max(), -1),
        (Case::C, Dominance::Super) => (sets.w_star_min() - vmax - sets.u_star_max(), 1),
        _ => return None,
    };
    let toeplitz = toeplitz_inverse_norm_triangular(target.u, target.v, target.w, shift).ok()?;
    Some((1.0 / gap).max(toeplitz))
}

/// Finitely supported right-hand side over the integers.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Rhs {
    pub entries: BTreeMap<i64, C>,
}

impl Rhs {
    pub fn new(entries: impl IntoIterator<Item = (i64, C)>) -> Self {
        Self { entries: entries.into_iter().collect() }
    }

    /// `e_i`
    pub fn unit(i: i64) -> Self {
        Self::new([(i, C::new(1.0, 0.0))])
    }

    pub fn get(&self, i: i64) -> C {
        self.entries.get(&i).copied().unwrap_or_default()
    }

    /// `(b(lo), ..., b(hi))`
    pub fn restrict(&self, lo: i64, hi: i64) -> Vec<C> {
        (lo..=hi).map(|i| self.get(i)).collect()
    }

    pub fn norm_inf(&self) -> f64 {
        self.entries.values().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowRecord {
    pub n: usize,
    pub l: i64,
    pub r: i64,
    pub size: usize,
    /// Solution over `[l, r]`; empty when the window was singular.
    pub solution: Vec<C>,
    pub residual_inf: f64,
    /// `None` when the window exceeded the norm size cap.
    pub inverse_norm: Option<f64>,
    /// Largest change against the previous window on their overlap.
    pub componentwise_delta: Option<f64>,
    pub singular: bool,
}

impl WindowRecord {
    pub fn value(&self, i: i64) -> Option<C> {
        if self.singular || i < self.l || i > self.r {
            return None;
        }
        self.solution.get((i - self.l) as usize).copied()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub plan: WindowPlan,
    pub case: Case,
    pub shift_k: i32,
    pub records: Vec<WindowRecord>,
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub n_max: usize,
    pub horizon: i64,
    pub norm_cap: usize,
    pub tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { n_max: 6, horizon: DEFAULT_HORIZON, norm_cap: DEFAULT_NORM_CAP, tol: TOL_CASE }
    }
}

impl SolveOptions {
    pub fn with_n_max(n_max: usize) -> Self {
        Self { n_max, ..Self::default() }
    }
}

/// Step 2: the case that fixes the shift. Governing sets, when the field
/// knows them, must classify consistently; the target must agree.
pub fn classify_for_solve(field: &DiagonalField, target: Triple, tol: f64) -> Result<Case> {
    let case = classify_triple(target.u, target.v, target.w, tol);
    if case == Case::NotFredholm {
        return Err(Error::NotFredholm(format!("target {target:?} lies on a decision boundary")));
    }
    if let Some(sets) = field.governing_sets() {
        let verdict = classify_sets(&sets, tol);
        if verdict.case != case {
            return Err(Error::NotFredholm(format!(
                "sampled triples classify as {:?} (consistent = {}), target as {case:?}",
                verdict.case, verdict.consistent
            )));
        }
    }
    Ok(case)
}

/// Adaptive FSM on a bi-infinite field.
pub fn solve_adaptive_bi(field: &mut DiagonalField, rhs: &Rhs, target: Triple, opts: SolveOptions) -> Result<SolveReport> {
    let case = classify_for_solve(field, target, opts.tol)?;
    let mut plan = plan_windows_bi_with(field, &ConstantTarget(target), opts.n_max, opts.horizon)?;
    plan.target = Some(target);
    let k = case.plus_index().expect("Fredholm case");
    run_plan(field, rhs, plan, case, k, opts.norm_cap)
}

/// Adaptive FSM with a custom window matcher and a given case.
pub fn solve_adaptive_bi_with(
    field: &mut DiagonalField,
    rhs: &Rhs,
    matcher: &dyn WindowMatcher,
    case: Case,
    opts: SolveOptions,
) -> Result<SolveReport> {
    let k = case.plus_index().ok_or_else(|| Error::NotFredholm("no shift for a non-Fredholm case".into()))?;
    let plan = plan_windows_bi_with(field, matcher, opts.n_max, opts.horizon)?;
    run_plan(field, rhs, plan, case, k, opts.norm_cap)
}

/// Adaptive FSM on a semi-infinite field; only case (a) is admissible.
pub fn solve_adaptive_semi(field: &mut DiagonalField, rhs: &Rhs, target: Triple, opts: SolveOptions) -> Result<SolveReport> {
    let case = classify_for_solve(field, target, opts.tol)?;
    if case != Case::A {
        return Err(Error::NotFredholm(format!("semi-infinite requires case (a), found {case:?}")));
    }
    let mut plan = plan_windows_semi_with(field, &ConstantTarget(target), opts.n_max, opts.horizon)?;
    plan.target = Some(target);
    run_plan(field, rhs, plan, case, 0, opts.norm_cap)
}

/// Full FSM: windows `[-n, n]`, no shift. Singular windows are recorded, not fatal.
pub fn full_fsm(field: &mut DiagonalField, rhs: &Rhs, opts: SolveOptions) -> Result<SolveReport> {
    if field.orientation() != FieldOrientation::BiInfinite {
        return Err(Error::InvalidInput("full FSM needs a bi-infinite field".into()));
    }
    let entries = (1..=opts.n_max).map(|n| PlanEntry { n, l: -(n as i64), r: n as i64 }).collect();
    let plan = WindowPlan { target: None, matcher: "full".into(), entries, orientation: FieldOrientation::BiInfinite };
    let case = match field.governing_sets() {
        Some(sets) => classify_sets(&sets, opts.tol).case,
        None => Case::NotFredholm,
    };
    run_plan(field, rhs, plan, case, 0, opts.norm_cap)
}

fn run_plan(field: &mut DiagonalField, rhs: &Rhs, plan: WindowPlan, case: Case, k: i32, norm_cap: usize) -> Result<SolveReport> {
    let mut records: Vec<WindowRecord> = Vec::with_capacity(plan.entries.len());
    for e in &plan.entries {
        let (a, b) = field_span(e.l, e.r, k);
        ensure_window(field, a, b)?;
        let sys = materialize(field, e.l, e.r, k)?;
        // row i of S^k A x = S^k b reads b(i - k)
        let kk = k as i64;
        let b = rhs.restrict(e.l - kk, e.r - kk);
        let size = sys.dim();
        let (solution, singular) = match solve_window(&sys, &b) {
            Ok(x) if x.iter().all(|z| z.is_finite()) => (x, false),
            Ok(_) | Err(Error::ExactlySingular(_)) => (Vec::new(), true),
            Err(err) => return Err(err),
        };
        let residual_inf = if singular {
            f64::INFINITY
        } else {
            sys.apply(&solution)?.iter().zip(&b).map(|(y, bi)| (y - bi).norm()).fold(0.0, f64::max)
        };
        let inverse_norm = (size <= norm_cap).then(|| inverse_norm(&sys));
        let mut rec = WindowRecord {
            n: e.n,
            l: e.l,
            r: e.r,
            size,
            solution,
            residual_inf,
            inverse_norm,
            componentwise_delta: None,
            singular,
        };
        if let Some(prev) = records.last() {
            if !prev.singular && !rec.singular {
                let (lo, hi) = (prev.l.max(rec.l), prev.r.min(rec.r));
                rec.componentwise_delta = Some(
                    (lo..=hi)
                        .map(|i| (rec.value(i).unwrap() - prev.value(i).unwrap()).norm())
                        .fold(0.0, f64::max),
                );
            }
        }
        records.push(rec);
    }
    Ok(SolveReport { plan, case, shift_k: k, records })
}
