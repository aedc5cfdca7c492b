//! Command line surface. Every command is also callable as a function that
//! returns a serializable report.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fredholm::{
    classify_sets_with_budget, delta_certificate, dominance_certificate, Case, Dominance, Witness, CLASSIFY_BUDGET,
};
use crate::fsm::{
    full_fsm, inverse_norm, plan_windows_bi_with, plan_windows_semi_with, solve_adaptive_bi, solve_adaptive_semi,
    stability_cap, ConstantTarget, Rhs, SolveOptions, SolveReport, WindowPlan, DEFAULT_HORIZON, DEFAULT_NORM_CAP,
};
use crate::io;
use crate::linalg::{thomas, THOMAS_PIVOT_TOL};
use crate::operator::{circulant_spectrum, laurent_spectrum, materialize, BandedSystem};
use crate::pseudoergodic::{
    verify_pseudoergodic, DiagonalField, FieldOrientation, Generator, IidSampler, SamplingLaw, Triple,
};
use crate::spectra::{
    eigenvalues, hausdorff, pseudospectrum_grid, singular_values, study_window, GridSpec, DEFAULT_GRID_RES,
};
use crate::symbol_sets::{
    lower_spectral_bound, selfadjoint_spectrum, spectral_hole, ComplexPoint, TriSymbolSet, TOL_CASE,
};

type C = ComplexPoint;

#[derive(Parser, Debug)]
#[command(name = "fsm-jacobi", version, about = "Adaptive finite sections for random tridiagonal operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Spectral inclusion sets of a coefficient triple
    Bounds(BoundsArgs),
    /// Fredholm case and plus-index of a coefficient triple
    Classify(ClassifyArgs),
    /// Sample a diagonal field
    Generate(GenerateArgs),
    /// Adaptive cut-off plan for a field
    Plan(PlanArgs),
    /// Solve A x = b by finite sections
    Solve(SolveArgs),
    /// Eigenvalues, singular values or pseudospectra of one window
    Spectrum(SpectrumArgs),
    /// Rerun the Hatano-Nelson experiment
    Reproduce(ReproduceArgs),
    /// Run the built-in invariant checks
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[arg(long)]
    pub sets: PathBuf,
    /// Angles per ellipse in the lower-bound cloud
    #[arg(long, default_value_t = 256)]
    pub angles: usize,
    /// Grid resolution used to locate the hole
    #[arg(long, default_value_t = 101)]
    pub hole_res: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Lower-bound cloud as CSV
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub sets: PathBuf,
    #[arg(long, default_value_t = TOL_CASE)]
    pub tol: f64,
    #[arg(long, default_value_t = CLASSIFY_BUDGET)]
    pub budget: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GeneratorKind {
    Iid,
    Enumeration,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long)]
    pub sets: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Index range `LO..HI`
    #[arg(long, allow_hyphen_values = true)]
    pub range: String,
    /// Field on the positive integers (range must start at 1)
    #[arg(long)]
    pub semi: bool,
    #[arg(long, value_enum, default_value_t = GeneratorKind::Iid)]
    pub generator: GeneratorKind,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct PlanArgs {
    #[arg(long)]
    pub field: PathBuf,
    /// Target triple `u,v,w`; complex entries as `a+bi`
    #[arg(long, allow_hyphen_values = true)]
    pub target: Option<String>,
    #[arg(long, default_value_t = 6)]
    pub nmax: usize,
    #[arg(long, default_value_t = DEFAULT_HORIZON)]
    pub horizon: i64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the field, grown as far as the plan needed
    #[arg(long)]
    pub field_out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SolveMode {
    Adaptive,
    Full,
    Semi,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long)]
    pub field: PathBuf,
    /// Right-hand side; defaults to the unit vector at 0 (at 1 on semi-infinite fields)
    #[arg(long)]
    pub rhs: Option<PathBuf>,
    #[arg(long, default_value_t = 6)]
    pub nmax: usize,
    #[arg(long, value_enum, default_value_t = SolveMode::Adaptive)]
    pub mode: SolveMode,
    #[arg(long, allow_hyphen_values = true)]
    pub target: Option<String>,
    #[arg(long, default_value_t = DEFAULT_HORIZON)]
    pub horizon: i64,
    #[arg(long, default_value_t = DEFAULT_NORM_CAP)]
    pub norm_cap: usize,
    #[arg(long, default_value_t = TOL_CASE)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SpectrumMode {
    Eig,
    Sv,
    Pseudo,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[arg(long, conflicts_with = "system", required_unless_present = "system")]
    pub field: Option<PathBuf>,
    /// Banded system CSV with its `.json` header
    #[arg(long)]
    pub system: Option<PathBuf>,
    /// Window size, centred on 0 (or starting at 1 on semi-infinite fields)
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub shift: i32,
    #[arg(long, value_enum, default_value_t = SpectrumMode::Eig)]
    pub mode: SpectrumMode,
    #[arg(long, value_delimiter = ',', default_value = "0.1")]
    pub eps: Vec<f64>,
    /// `x0,x1,y0,y1,res`
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    #[arg(long, default_value_t = 1.0)]
    pub g: f64,
    #[arg(long, default_value_t = 2.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 6)]
    pub nmax: usize,
    #[arg(long, default_value_t = DEFAULT_NORM_CAP)]
    pub norm_cap: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    /// JSON file with optional `seed` and `inject_fault`
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Swap in a Thomas solver with a perturbed pivot
    #[arg(long)]
    pub inject_fault: bool,
}

// ---- parsing helpers ----

pub fn parse_complex(s: &str) -> Result<C> {
    C::from_str(s.trim()).map_err(|_| Error::Config(format!("cannot parse complex number {s:?}")))
}

pub fn parse_triple(s: &str) -> Result<Triple> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!("target {s:?} must have the form u,v,w")));
    }
    Ok(Triple::new(parse_complex(parts[0])?, parse_complex(parts[1])?, parse_complex(parts[2])?))
}

pub fn parse_range(s: &str) -> Result<(i64, i64)> {
    let (a, b) = s.split_once("..").ok_or_else(|| Error::Config(format!("range {s:?} must be LO..HI")))?;
    let p = |x: &str| x.trim().parse::<i64>().map_err(|e| Error::Config(format!("range {s:?}: {e}")));
    let (lo, hi) = (p(a)?, p(b)?);
    if lo > hi {
        return Err(Error::Config(format!("range {s:?} is empty")));
    }
    Ok((lo, hi))
}

pub fn parse_grid(s: &str) -> Result<GridSpec> {
    let v: Vec<&str> = s.split(',').map(str::trim).collect();
    if v.len() != 5 {
        return Err(Error::Config(format!("grid {s:?} must be x0,x1,y0,y1,res")));
    }
    let f = |x: &str| x.parse::<f64>().map_err(|e| Error::Config(format!("grid {s:?}: {e}")));
    let res = v[4].parse::<usize>().map_err(|e| Error::Config(format!("grid {s:?}: {e}")))?;
    GridSpec::new(f(v[0])?, f(v[1])?, f(v[2])?, f(v[3])?, res, res)
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = io::to_json(value)?;
    match out {
        Some(p) => io::write_atomic(p, format!("{text}\n").as_bytes()),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

/// Default target: the most probable triple of an i.i.d. field.
fn default_target(field: &DiagonalField) -> Result<Triple> {
    match field.generator() {
        Generator::Iid(s) => Ok(s.most_probable()),
        _ => Err(Error::Config("--target is required for fields without an i.i.d. generator".into())),
    }
}

fn target_or_default(field: &DiagonalField, target: Option<&str>) -> Result<Triple> {
    match target {
        Some(t) => parse_triple(t),
        None => default_target(field),
    }
}

// ---- bounds ----

#[derive(Clone, Debug, Serialize)]
pub struct UpperBound {
    /// `V + radius * closed unit disk`
    pub v_samples: usize,
    pub radius: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HoleReport {
    pub nonempty: bool,
    pub grid: GridSpec,
    pub nodes_in_hole: usize,
    /// `[x0, x1, y0, y1]` of the hole nodes
    pub bbox: Option<[f64; 4]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundsReport {
    pub delta: f64,
    pub upper: UpperBound,
    pub lower_points: usize,
    pub hole: HoleReport,
    pub selfadjoint: Option<Vec<(f64, f64)>>,
}

fn selfadjoint_sets(sets: &TriSymbolSet) -> bool {
    let (u, w) = (sets.u().samples(), sets.w().samples());
    sets.v().is_real() && u.len() == w.len() && u.iter().zip(w).all(|(a, b)| (a.conj() - b).norm() <= TOL_CASE)
}

pub fn cmd_bounds(sets: &TriSymbolSet, angles: usize, hole_res: usize) -> Result<(BoundsReport, Vec<C>)> {
    let lower = lower_spectral_bound(sets, angles)?;
    let grid = GridSpec::around(sets, hole_res)?;
    let mut hole: Vec<C> = Vec::new();
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let z = grid.node(ix, iy);
            if spectral_hole(sets, z) {
                hole.push(z);
            }
        }
    }
    let bbox = (!hole.is_empty()).then(|| {
        hole.iter().fold([f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY], |b, z| {
            [b[0].min(z.re), b[1].max(z.re), b[2].min(z.im), b[3].max(z.im)]
        })
    });
    let selfadjoint = if selfadjoint_sets(sets) { Some(selfadjoint_spectrum(sets.u(), sets.v())?) } else { None };
    let report = BoundsReport {
        delta: sets.delta(),
        upper: UpperBound { v_samples: sets.v().sample_count(), radius: sets.u_star_max() + sets.w_star_max() },
        lower_points: lower.len(),
        hole: HoleReport { nonempty: !hole.is_empty(), grid, nodes_in_hole: hole.len(), bbox },
        selfadjoint,
    };
    Ok((report, lower))
}

// ---- classify ----

#[derive(Clone, Debug, Serialize)]
pub struct Certificates {
    /// `1 / delta`, a bound on every inverse and every finite-section inverse
    pub delta_bound: Option<f64>,
    pub dominance: Option<Dominance>,
    /// Bound on `limsup ||A_n^-1||` for the adaptive method at the default target
    pub stability_cap: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassifyReport {
    pub case: Case,
    pub plus_index: Option<i32>,
    pub consistent: bool,
    pub witnesses: Vec<Witness>,
    pub delta: f64,
    pub certificates: Certificates,
    pub triples_checked: usize,
    pub exhaustive: bool,
}

pub fn cmd_classify(sets: &TriSymbolSet, laws: [SamplingLaw; 3], tol: f64, budget: usize) -> ClassifyReport {
    let c = classify_sets_with_budget(sets, tol, budget);
    let target = IidSampler::new(sets.clone(), 0).with_laws(laws).most_probable();
    ClassifyReport {
        case: c.case,
        plus_index: c.plus_index,
        consistent: c.consistent,
        witnesses: c.witnesses,
        delta: sets.delta(),
        certificates: Certificates {
            delta_bound: delta_certificate(sets),
            dominance: dominance_certificate(sets),
            stability_cap: stability_cap(sets, c.case, target),
        },
        triples_checked: c.triples_checked,
        exhaustive: c.exhaustive,
    }
}

// ---- generate ----

pub fn cmd_generate(
    sets: &io::SetsDoc,
    seed: u64,
    lo: i64,
    hi: i64,
    orientation: FieldOrientation,
    kind: GeneratorKind,
) -> Result<DiagonalField> {
    match kind {
        GeneratorKind::Iid => DiagonalField::sample_iid(sets.sampler(seed)?, lo, hi, orientation),
        GeneratorKind::Enumeration => {
            let probe = DiagonalField::sample_iid(IidSampler::new(sets.build()?, seed), 0.max(lo), 0.max(lo), orientation)?;
            let alphabet = probe.alphabet();
            if alphabet.len() > 64 {
                return Err(Error::BudgetExceeded(format!(
                    "enumeration alphabet of {} letters; use point sets",
                    alphabet.len()
                )));
            }
            DiagonalField::word_enumeration(alphabet, lo, hi, orientation)
        }
    }
}

// ---- plan / solve ----

pub fn cmd_plan(field: &mut DiagonalField, target: Triple, n_max: usize, horizon: i64) -> Result<WindowPlan> {
    match field.orientation() {
        FieldOrientation::BiInfinite => plan_windows_bi_with(field, &ConstantTarget(target), n_max, horizon),
        FieldOrientation::SemiInfinite => plan_windows_semi_with(field, &ConstantTarget(target), n_max, horizon),
    }
    .map(|mut p| {
        p.target = Some(target);
        p
    })
}

pub fn default_rhs(field: &DiagonalField) -> Rhs {
    match field.orientation() {
        FieldOrientation::BiInfinite => Rhs::unit(0),
        FieldOrientation::SemiInfinite => Rhs::unit(1),
    }
}

pub fn cmd_solve(
    field: &mut DiagonalField,
    rhs: &Rhs,
    mode: SolveMode,
    target: Option<Triple>,
    opts: SolveOptions,
) -> Result<SolveReport> {
    match mode {
        SolveMode::Full => full_fsm(field, rhs, opts),
        SolveMode::Adaptive | SolveMode::Semi => {
            let target = match target {
                Some(t) => t,
                None => default_target(field)?,
            };
            match (mode, field.orientation()) {
                (SolveMode::Adaptive, FieldOrientation::BiInfinite) => solve_adaptive_bi(field, rhs, target, opts),
                (_, FieldOrientation::SemiInfinite) => solve_adaptive_semi(field, rhs, target, opts),
                (SolveMode::Semi, FieldOrientation::BiInfinite) => {
                    Err(Error::Config("--mode semi needs a semi-infinite field".into()))
                }
                _ => unreachable!(),
            }
        }
    }
}

// ---- spectrum ----

pub fn window_system(field: &mut DiagonalField, n: usize, shift: i32) -> Result<BandedSystem> {
    if n == 0 {
        return Err(Error::Config("window size must be positive".into()));
    }
    let (l, r) = study_window(field.orientation(), n);
    let (a, b) = crate::operator::field_span(l, r, shift);
    let a = if field.orientation() == FieldOrientation::SemiInfinite { a.max(1) } else { a };
    field.ensure(a, b)?;
    materialize(field, l, r, shift)
}

// ---- reproduce ----

#[derive(Clone, Debug, Serialize)]
pub struct HnConstants {
    /// `2 cosh g`
    pub c: f64,
    /// `2 sinh g`
    pub s: f64,
    /// `(c - a)^-1`, the norm of the inverse Toeplitz operator at the target
    pub toeplitz_floor: Option<f64>,
    /// `(s - a)^-1`, the bound on the inverse of the full operator
    pub cap: Option<f64>,
}

pub fn hatano_nelson_constants(g: f64, a: f64) -> HnConstants {
    let (c, s) = (2.0 * g.cosh(), 2.0 * g.sinh());
    HnConstants { c, s, toeplitz_floor: (c > a).then(|| 1.0 / (c - a)), cap: (s > a).then(|| 1.0 / (s - a)) }
}

#[derive(Clone, Debug, Serialize)]
pub struct TableRow {
    pub n: usize,
    pub l: i64,
    pub r: i64,
    pub size: usize,
    pub inverse_norm: Option<f64>,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReproduceReport {
    pub g: f64,
    pub a: f64,
    pub seed: u64,
    pub constants: HnConstants,
    pub case: Case,
    pub plus_index: Option<i32>,
    pub consistent: bool,
    pub target: Triple,
    pub shift_k: Option<i32>,
    pub table: Vec<TableRow>,
    /// First `n` whose window was not found within the search horizon.
    pub horizon_stop: Option<usize>,
}

/// Field with `U = {e^g}`, `V = [-a, a]` (arcsine law), `W = {e^-g}`.
pub fn hatano_nelson_field(g: f64, a: f64, seed: u64) -> Result<DiagonalField> {
    let sets = TriSymbolSet::hatano_nelson(g, a)?;
    let sampler = IidSampler::new(sets, seed).with_laws([SamplingLaw::Uniform, SamplingLaw::Arcsine, SamplingLaw::Uniform]);
    DiagonalField::sample_iid(sampler, -64, 64, FieldOrientation::BiInfinite)
}

pub fn cmd_reproduce_hatano_nelson(g: f64, a: f64, seed: u64, n_max: usize, norm_cap: usize) -> Result<ReproduceReport> {
    if !(g > 0.0 && a > 0.0) {
        return Err(Error::Config(format!("need g > 0 and a > 0, got g = {g}, a = {a}")));
    }
    let mut field = hatano_nelson_field(g, a, seed)?;
    let target = default_target(&field)?;
    let sets = field.governing_sets().expect("i.i.d. field");
    let verdict = classify_sets_with_budget(&sets, TOL_CASE, CLASSIFY_BUDGET);
    let mut report = ReproduceReport {
        g,
        a,
        seed,
        constants: hatano_nelson_constants(g, a),
        case: verdict.case,
        plus_index: verdict.plus_index,
        consistent: verdict.consistent,
        target,
        shift_k: None,
        table: Vec::new(),
        horizon_stop: None,
    };
    if verdict.case == Case::NotFredholm || !verdict.consistent {
        return Ok(report);
    }
    let mut opts = SolveOptions { norm_cap, ..SolveOptions::with_n_max(n_max) };
    let solved = loop {
        match solve_adaptive_bi(&mut field, &Rhs::unit(0), target, opts) {
            Err(Error::HorizonExceeded { n, .. }) if n > 1 => {
                report.horizon_stop = Some(n);
                opts.n_max = n - 1;
            }
            other => break other?,
        }
    };
    report.shift_k = Some(solved.shift_k);
    report.table = solved
        .records
        .iter()
        .map(|r| TableRow { n: r.n, l: r.l, r: r.r, size: r.size, inverse_norm: r.inverse_norm, residual: r.residual_inf })
        .collect();
    Ok(report)
}

pub fn format_reproduce(rep: &ReproduceReport) -> String {
    let opt = |x: Option<f64>| x.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into());
    let mut out = format!(
        "c = {:.4}\ns = {:.4}\n(c-a)^-1 = {}\n(s-a)^-1 = {}\ncase {:?}, plus index {}, consistent {}\n",
        rep.constants.c,
        rep.constants.s,
        opt(rep.constants.toeplitz_floor),
        opt(rep.constants.cap),
        rep.case,
        rep.plus_index.map(|k| k.to_string()).unwrap_or_else(|| "-".into()),
        rep.consistent
    );
    if rep.table.is_empty() {
        out.push_str("no solve\n");
        return out;
    }
    out.push_str(&format!("{:>3} {:>10} {:>10} {:>10} {:>10}\n", "n", "l_n", "r_n", "size", "||A_n^-1||"));
    for row in &rep.table {
        out.push_str(&format!("{:>3} {:>10} {:>10} {:>10} {:>10}\n", row.n, row.l, row.r, row.size, opt(row.inverse_norm)));
    }
    if let Some(n) = rep.horizon_stop {
        out.push_str(&format!("n = {n}: no window within the search horizon\n"));
    }
    out
}

// ---- selftest ----

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelftestConfig {
    pub seed: u64,
    pub inject_fault: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Thomas elimination with a deliberately wrong pivot update.
fn thomas_faulty(sub: &[C], diag: &[C], sup: &[C], rhs: &[C]) -> Option<Vec<C>> {
    let n = diag.len();
    let mut c = vec![C::new(0.0, 0.0); n];
    let mut d = vec![C::new(0.0, 0.0); n];
    let mut piv = diag[0];
    if n > 1 {
        c[0] = sup[0] / piv;
    }
    d[0] = rhs[0] / piv;
    for i in 1..n {
        piv = diag[i] - sub[i - 1] * c[i - 1] * 1.01;
        if piv.norm() < THOMAS_PIVOT_TOL {
            return None;
        }
        if i < n - 1 {
            c[i] = sup[i] / piv;
        }
        d[i] = (rhs[i] - sub[i - 1] * d[i - 1]) / piv;
    }
    for i in (0..n - 1).rev() {
        let next = d[i + 1];
        d[i] -= c[i] * next;
    }
    Some(d)
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> CheckResult {
    match f() {
        Ok((passed, detail)) => CheckResult { name, passed, detail },
        Err(e) => CheckResult { name, passed: false, detail: e.to_string() },
    }
}

pub fn cmd_selftest(cfg: SelftestConfig) -> Vec<CheckResult> {
    let seed = cfg.seed;
    let hn_sets = || TriSymbolSet::hatano_nelson(1.0, 2.0);
    let mut out = Vec::new();

    out.push(check("thomas residual", || {
        let solver = if cfg.inject_fault { thomas_faulty } else { thomas };
        let sets = hn_sets()?;
        let field = DiagonalField::sample_iid(IidSampler::new(sets, seed), -60, 60, FieldOrientation::BiInfinite)?;
        let sys = materialize(&field, -50, 50, 0)?;
        // shift the diagonal so that the window is diagonally dominant
        let main: Vec<C> = sys.main.iter().map(|z| z + 6.0).collect();
        let sys = BandedSystem::from_bands(sys.l, sys.r, 0, sys.sub.clone(), main, sys.sup.clone())?;
        let b: Vec<C> = (0..sys.dim()).map(|i| C::new((i as f64).sin(), (i as f64).cos())).collect();
        let x = solver(&sys.sub, &sys.main, &sys.sup, &b).ok_or(Error::ExactlySingular(0))?;
        let res = sys.apply(&x)?.iter().zip(&b).map(|(y, b)| (y - b).norm()).fold(0.0, f64::max);
        Ok((res <= 1e-12, format!("residual {res:e}")))
    }));

    out.push(check("hatano-nelson case", || {
        let c = classify_sets_with_budget(&hn_sets()?, TOL_CASE, CLASSIFY_BUDGET);
        Ok((c.case == Case::B && c.plus_index == Some(-1) && c.consistent, format!("{:?}", c.case)))
    }));

    out.push(check("degenerate triple", || {
        let c = crate::fredholm::classify_triple(C::new(1.0, 0.0), C::new(2.0, 0.0), C::new(1.0, 0.0), TOL_CASE);
        Ok((c == Case::NotFredholm, format!("{c:?}")))
    }));

    out.push(check("circulant vs symbol curve", || {
        let target = laurent_spectrum(C::new(1.0, 0.0), C::new(0.5, 0.0), C::new(0.7, 0.0), 4096)?;
        let pts = circulant_spectrum(C::new(1.0, 0.0), C::new(0.5, 0.0), C::new(0.7, 0.0), 128)?;
        let d = hausdorff(&pts, &target)?;
        Ok((d <= 10.0 / 128.0, format!("d_H {d:e}")))
    }));

    out.push(check("word enumeration", || {
        let alphabet = vec![Triple::real(1.0, 0.0, 1.0), Triple::real(1.0, 2.0, 1.0)];
        let f = DiagonalField::word_enumeration(alphabet, 1, 100, FieldOrientation::SemiInfinite)?;
        let rep = verify_pseudoergodic(&f, 3, 1e-12)?;
        Ok((rep.all_found && rep.found == 14, format!("{} words", rep.found)))
    }));

    out.push(check("adaptive solve residual", || {
        let mut f = hatano_nelson_field(1.0, 2.0, seed)?;
        let target = default_target(&f)?;
        let rep = solve_adaptive_bi(&mut f, &Rhs::unit(0), target, SolveOptions::with_n_max(3))?;
        let worst = rep.records.iter().map(|r| r.residual_inf).fold(0.0, f64::max);
        Ok((worst <= 1e-9 && rep.shift_k == -1, format!("max residual {worst:e}")))
    }));

    out.push(check("singular values vs inverse norm", || {
        let f = hatano_nelson_field(1.0, 2.0, seed)?;
        let sys = materialize(&f, -30, 30, -1)?;
        let smin = singular_values(&sys)?.points.last().unwrap().re;
        let prod = smin * inverse_norm(&sys);
        Ok(((prod - 1.0).abs() <= 1e-6, format!("product {prod}")))
    }));

    out.push(check("field round trip", || {
        let f = hatano_nelson_field(1.0, 2.0, seed)?;
        let text = io::field_to_jsonl(&f)?;
        let back = io::parse_field(&text, "selftest")?;
        Ok((back.triples() == f.triples(), format!("{} records", f.len())))
    }));

    out
}

// ---- dispatch ----

fn read_sets_built(path: &Path) -> Result<(io::SetsDoc, TriSymbolSet)> {
    let doc = io::read_sets(path)?;
    let sets = doc.build()?;
    Ok((doc, sets))
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Bounds(a) => {
            let (_, sets) = read_sets_built(&a.sets)?;
            let (report, lower) = cmd_bounds(&sets, a.angles, a.hole_res)?;
            if let Some(p) = &a.csv {
                io::write_atomic(p, io::points_csv(&lower).as_bytes())?;
            }
            emit(&report, a.out.as_deref())
        }
        Command::Classify(a) => {
            let (doc, sets) = read_sets_built(&a.sets)?;
            emit(&cmd_classify(&sets, doc.laws(), a.tol, a.budget), a.out.as_deref())
        }
        Command::Generate(a) => {
            let doc = io::read_sets(&a.sets)?;
            let (lo, hi) = parse_range(&a.range)?;
            let orientation = if a.semi { FieldOrientation::SemiInfinite } else { FieldOrientation::BiInfinite };
            let field = cmd_generate(&doc, a.seed, lo, hi, orientation, a.generator)
                .map_err(|e| match e {
                    Error::InvalidInput(m) => Error::Config(m),
                    e => e,
                })?;
            io::write_field(&a.out, &field)
        }
        Command::Plan(a) => {
            let mut field = io::read_field(&a.field)?;
            let target = target_or_default(&field, a.target.as_deref())?;
            let plan = cmd_plan(&mut field, target, a.nmax, a.horizon)?;
            if let Some(p) = &a.field_out {
                io::write_field(p, &field)?;
            }
            emit(&plan, a.out.as_deref())
        }
        Command::Solve(a) => {
            let mut field = io::read_field(&a.field)?;
            let rhs = match &a.rhs {
                Some(p) => io::read_rhs(p)?,
                None => default_rhs(&field),
            };
            let target = a.target.as_deref().map(parse_triple).transpose()?;
            let opts = SolveOptions { n_max: a.nmax, horizon: a.horizon, norm_cap: a.norm_cap, tol: a.tol };
            let report = cmd_solve(&mut field, &rhs, a.mode, target, opts)?;
            if let Some(p) = &a.csv {
                io::write_atomic(p, io::report_csv(&report).as_bytes())?;
            }
            match &a.out {
                Some(p) => emit(&report, Some(p)),
                None => {
                    print!("{}", io::report_csv(&report));
                    Ok(())
                }
            }
        }
        Command::Spectrum(a) => {
            let sys = match (&a.field, &a.system) {
                (_, Some(p)) => io::read_system(p)?,
                (Some(p), None) => window_system(&mut io::read_field(p)?, a.n, a.shift)?,
                (None, None) => return Err(Error::Config("--field or --system is required".into())),
            };
            match a.mode {
                SpectrumMode::Eig => io::write_atomic(&a.out, io::cloud_csv(&eigenvalues(&sys)?).as_bytes()),
                SpectrumMode::Sv => io::write_atomic(&a.out, io::cloud_csv(&singular_values(&sys)?).as_bytes()),
                SpectrumMode::Pseudo => {
                    let grid = match &a.grid {
                        Some(g) => parse_grid(g)?,
                        None => pseudo_default_grid(&sys)?,
                    };
                    let ps = pseudospectrum_grid(&sys, grid, &a.eps)?;
                    let header = io::PseudospectrumHeader { grid, eps_levels: a.eps.clone(), l: sys.l, r: sys.r, shift_k: sys.shift_k };
                    io::write_atomic(&a.out.with_extension("json"), io::to_json(&header)?.as_bytes())?;
                    io::write_atomic(&a.out.with_extension("sigma.csv"), io::sigma_matrix_csv(&ps).as_bytes())?;
                    io::write_atomic(&a.out, io::levels_csv(&ps).as_bytes())
                }
            }
        }
        Command::Reproduce(a) => {
            let rep = cmd_reproduce_hatano_nelson(a.g, a.a, a.seed, a.nmax, a.norm_cap)?;
            print!("{}", format_reproduce(&rep));
            if let Some(p) = &a.out {
                emit(&rep, Some(p))?;
            }
            if let Some(p) = &a.csv {
                let mut csv = String::from("n,l_n,r_n,size,inv_norm,residual\n");
                for r in &rep.table {
                    csv.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        r.n,
                        r.l,
                        r.r,
                        r.size,
                        r.inverse_norm.map(io::fmt_f64).unwrap_or_default(),
                        io::fmt_f64(r.residual)
                    ));
                }
                io::write_atomic(p, csv.as_bytes())?;
            }
            if rep.case == Case::NotFredholm || !rep.consistent {
                return Err(Error::NotFredholm(format!("verdict {:?}, consistent = {}", rep.case, rep.consistent)));
            }
            Ok(())
        }
        Command::Selftest(a) => {
            let mut cfg = match &a.config {
                Some(p) => {
                    let text = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
                    if text.trim().is_empty() {
                        SelftestConfig::default()
                    } else {
                        serde_json::from_str(&text)
                            .map_err(|e| Error::Config(format!("{}:{}:{}: {e}", p.display(), e.line(), e.column())))?
                    }
                }
                None => SelftestConfig::default(),
            };
            if let Some(s) = a.seed {
                cfg.seed = s;
            }
            cfg.inject_fault |= a.inject_fault;
            let results = cmd_selftest(cfg);
            for r in &results {
                println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            if failed > 0 {
                return Err(Error::InvalidInput(format!("{failed} self-test check(s) failed")));
            }
            Ok(())
        }
    }
}

/// Box around the window's Gershgorin discs, inflated by 20%.
fn pseudo_default_grid(sys: &BandedSystem) -> Result<GridSpec> {
    let n = sys.dim();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let d = sys.get(sys.l + i as i64, sys.l + i as i64);
        let mut rad = 0.0;
        for j in [i.wrapping_sub(2), i.wrapping_sub(1), i + 1, i + 2] {
            if j < n {
                rad += sys.get(sys.l + i as i64, sys.l + j as i64).norm();
            }
        }
        x0 = x0.min(d.re - rad);
        x1 = x1.max(d.re + rad);
        y0 = y0.min(d.im - rad);
        y1 = y1.max(d.im + rad);
    }
    let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
    let (hx, hy) = (0.6 * (x1 - x0).max(1e-3), 0.6 * (y1 - y0).max(1e-3));
    GridSpec::new(cx - hx, cx + hx, cy - hy, cy + hy, DEFAULT_GRID_RES, DEFAULT_GRID_RES)
}
