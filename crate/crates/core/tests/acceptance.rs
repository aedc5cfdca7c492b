//! Acceptance suite. Each test prints one `criterion N [PASS|FAIL]` line.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use fsm_jacobi::cli::{cmd_classify, cmd_reproduce_hatano_nelson, format_reproduce, hatano_nelson_constants};
use fsm_jacobi::fredholm::{classify_triple, Case, CLASSIFY_BUDGET};
use fsm_jacobi::fsm::{inverse_norm, solve_adaptive_bi, solve_adaptive_semi, solve_window, Rhs, SolveOptions};
use fsm_jacobi::io;
use fsm_jacobi::operator::{circulant_spectrum, laurent_spectrum, materialize, BandedSystem};
use fsm_jacobi::pseudoergodic::{
    verify_pseudoergodic, DiagonalField, FieldOrientation, IidSampler, SamplingLaw, Triple,
};
use fsm_jacobi::spectra::{convergence_study, StudyMode};
use fsm_jacobi::symbol_sets::{selfadjoint_spectrum, ComplexPoint as C, SymbolSet, TriSymbolSet, TOL_CASE};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(id: u32, title: &str, pass: bool, elapsed: Duration, limit: Duration, detail: &str) {
    let ok = pass && elapsed <= limit;
    println!(
        "criterion {id} [{}] {title}: {detail} ({:.2}s, limit {:.0}s)",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs_f64()
    );
    assert!(pass, "criterion {id} failed: {detail}");
    assert!(elapsed <= limit, "criterion {id} exceeded its time limit");
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn point(x: f64) -> SymbolSet {
    SymbolSet::point(C::new(x, 0.0))
}

#[test]
fn criterion_01_hatano_nelson_classification() {
    let t = Instant::now();
    let sets = TriSymbolSet::hatano_nelson(1.0, 2.0).unwrap();
    let laws = [SamplingLaw::Uniform, SamplingLaw::Arcsine, SamplingLaw::Uniform];
    let rep = cmd_classify(&sets, laws, TOL_CASE, CLASSIFY_BUDGET);
    let pass = rep.case == Case::B && rep.plus_index == Some(-1) && rep.consistent;
    let detail = format!("case {:?}, plus_index {:?}, consistent {}", rep.case, rep.plus_index, rep.consistent);
    verdict(1, "Hatano-Nelson classification", pass, t.elapsed(), secs(1), &detail);
}

#[test]
fn criterion_02_hatano_nelson_constants() {
    let t = Instant::now();
    let rep = cmd_reproduce_hatano_nelson(1.0, 2.0, 1, 2, 5000).unwrap();
    let text = format_reproduce(&rep);
    let k = hatano_nelson_constants(1.0, 2.0);
    let expected = [(k.c, 3.0862), (k.s, 2.3504), (k.toeplitz_floor.unwrap(), 0.9207), (k.cap.unwrap(), 2.8539)];
    let close = expected.iter().all(|(got, want)| (got - want).abs() <= 1e-4);
    let printed = ["c = 3.0862", "s = 2.3504", "(c-a)^-1 = 0.9207", "(s-a)^-1 = 2.8539"].iter().all(|s| text.contains(s));
    let detail = format!("c {:.6}, s {:.6}, (c-2)^-1 {:.6}, (s-2)^-1 {:.6}", expected[0].0, expected[1].0, expected[2].0, expected[3].0);
    verdict(2, "Hatano-Nelson constants", close && printed, t.elapsed(), secs(1), &detail);
}

#[test]
fn criterion_03_stability_cap_compliance() {
    let t = Instant::now();
    let cap = 2.8539 + 0.01;
    let mut norms = Vec::new();
    for seed in 1..=5 {
        let rep = cmd_reproduce_hatano_nelson(1.0, 2.0, seed, 6, 5000).unwrap();
        assert_eq!(rep.case, Case::B);
        norms.extend(rep.table.iter().filter_map(|r| r.inverse_norm));
    }
    let lo = norms.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = norms.iter().copied().fold(0.0, f64::max);
    let pass = !norms.is_empty() && lo >= 0.5 && hi <= cap;
    let detail = format!("{} inverse norms in [{lo:.4}, {hi:.4}], envelope [0.5, {cap:.4}]", norms.len());
    verdict(3, "stability-cap compliance", pass, t.elapsed(), secs(300), &detail);
}

/// Random compact set of the given kind with all moduli inside `[lo, hi]`.
fn random_set(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> SymbolSet {
    match rng.gen_range(0..3) {
        0 => {
            let pts = (0..rng.gen_range(1..4))
                .map(|_| C::from_polar(rng.gen_range(lo..=hi), rng.gen_range(0.0..std::f64::consts::TAU)))
                .collect();
            SymbolSet::points(pts).unwrap()
        }
        1 => {
            let a = rng.gen_range(lo..=hi);
            let b = rng.gen_range(a..=hi);
            if rng.gen_bool(0.5) {
                SymbolSet::interval(a, b).unwrap()
            } else {
                SymbolSet::interval(-b, -a).unwrap()
            }
        }
        _ => {
            let a0 = rng.gen_range(0.0..std::f64::consts::TAU);
            SymbolSet::circle_arc(rng.gen_range(lo..=hi), a0, a0 + rng.gen_range(0.1..3.0)).unwrap()
        }
    }
}

#[test]
fn criterion_04_delta_certificate() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut checked = 0;
    for config in 0..10 {
        let u = random_set(&mut rng, 0.1, 1.5);
        let w = random_set(&mut rng, 0.1, 1.5);
        let reach = u.modulus_range().1 + w.modulus_range().1;
        let vmin = reach + rng.gen_range(0.05..1.0);
        let v = random_set(&mut rng, vmin, vmin + 2.0);
        let sets = TriSymbolSet::new(u, v, w);
        let delta = sets.delta();
        assert!(delta > 0.0);
        let field = DiagonalField::sample_iid(IidSampler::new(sets, config), -600, 600, FieldOrientation::BiInfinite).unwrap();
        for _ in 0..20 {
            let size = rng.gen_range(10..=500) as i64;
            let l = rng.gen_range(-550..=550 - size);
            let sys = materialize(&field, l, l + size - 1, 0).unwrap();
            let norm = inverse_norm(&sys);
            worst = worst.max(norm - (1.0 / delta + 1e-8));
            checked += 1;
        }
    }
    let detail = format!("{checked} truncations, max(||A_n^-1|| - 1/delta) = {worst:.3e}");
    verdict(4, "delta certificate", checked == 200 && worst <= 0.0, t.elapsed(), secs(120), &detail);
}

#[test]
fn criterion_05_selfadjoint_hausdorff_convergence() {
    let t = Instant::now();
    let sets = TriSymbolSet::anderson(SymbolSet::real_points(&[0.0, 2.0]).unwrap());
    let intervals = selfadjoint_spectrum(sets.u(), sets.v()).unwrap();
    assert_eq!(intervals, vec![(-2.0, 4.0)]);
    let target: Vec<C> = (0..=6000).map(|k| C::new(-2.0 + k as f64 * 1e-3, 0.0)).collect();
    let mut field = DiagonalField::sample_iid(IidSampler::new(sets, 0), -8, 8, FieldOrientation::BiInfinite).unwrap();
    let rep = convergence_study(&mut field, &[250, 500, 1000, 2000], StudyMode::Eigenvalues, &target, 0.25).unwrap();
    let detail = format!("d_H = {:.4?}", rep.distances);
    verdict(5, "selfadjoint Hausdorff convergence", rep.decreasing && rep.within_tolerance, t.elapsed(), secs(180), &detail);
}

#[test]
fn criterion_06_circulant_oracle() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..20 {
        let mut c = |r: f64| C::from_polar(rng.gen_range(0.0..r), rng.gen_range(0.0..std::f64::consts::TAU));
        let (u, v, w) = (c(1.5), c(2.0), c(1.5));
        let curve = laurent_spectrum(u, v, w, 8192).unwrap();
        for n in [64usize, 256, 1024] {
            let d = fsm_jacobi::spectra::hausdorff(&circulant_spectrum(u, v, w, n).unwrap(), &curve).unwrap();
            worst_ratio = worst_ratio.max(d * n as f64 / 10.0);
        }
    }
    let detail = format!("max d_H / (10/n) = {worst_ratio:.4}");
    verdict(6, "Laurent/circulant oracle", worst_ratio <= 1.0, t.elapsed(), secs(60), &detail);
}

/// `b = A x` for finitely supported `x`, from the field entries.
fn manufacture(field: &DiagonalField, x: &BTreeMap<i64, C>) -> Rhs {
    let mut b: BTreeMap<i64, C> = BTreeMap::new();
    for (&j, &xj) in x {
        *b.entry(j).or_default() += field.at(j).v * xj;
        if let Some(t) = field.get(j + 1) {
            *b.entry(j + 1).or_default() += t.u * xj;
        }
        if let Some(t) = field.get(j - 1) {
            *b.entry(j - 1).or_default() += t.w * xj;
        }
    }
    Rhs::new(b)
}

#[test]
fn criterion_07_adaptive_fsm_convergence() {
    let t = Instant::now();
    let a = || TriSymbolSet::new(point(1.0), SymbolSet::real_points(&[3.0, 4.0]).unwrap(), point(0.5));
    let b = TriSymbolSet::new(point(2.0), SymbolSet::real_points(&[0.0, 0.5]).unwrap(), point(0.5));
    let c = TriSymbolSet::new(point(0.5), SymbolSet::real_points(&[0.0, 0.5]).unwrap(), point(2.0));
    let runs = [
        ("A", a(), Triple::real(1.0, 3.0, 0.5), false, Case::A),
        ("A semi", a(), Triple::real(1.0, 3.0, 0.5), true, Case::A),
        ("B", b, Triple::real(2.0, 0.0, 0.5), false, Case::B),
        ("C", c, Triple::real(0.5, 0.0, 2.0), false, Case::C),
    ];
    let mut all = true;
    let mut parts = Vec::new();
    for (name, sets, target, semi, case) in runs {
        let (orientation, lo, hi, support) = if semi {
            (FieldOrientation::SemiInfinite, 1, 64, (1..=5).collect::<Vec<i64>>())
        } else {
            (FieldOrientation::BiInfinite, -64, 64, (-2..=2).collect())
        };
        let mut field = DiagonalField::sample_iid(IidSampler::new(sets, 17), lo, hi, orientation).unwrap();
        let x: BTreeMap<i64, C> = support.iter().map(|&i| (i, C::new(1.0 - 0.3 * i as f64, 0.25 * i as f64))).collect();
        let rhs = manufacture(&field, &x);
        let opts = SolveOptions::with_n_max(12);
        let rep = if semi {
            solve_adaptive_semi(&mut field, &rhs, target, opts).unwrap()
        } else {
            solve_adaptive_bi(&mut field, &rhs, target, opts).unwrap()
        };
        let bound = 1e-9 * (1.0 + rhs.norm_inf());
        let residual_ok = rep.records.iter().all(|r| !r.singular && r.residual_inf <= bound);
        let first = rep.records.iter().position(|r| {
            support.iter().all(|i| r.value(*i).is_some_and(|z| (z - x[i]).norm() < 1e-6))
        });
        let ok = rep.case == case && residual_ok && first.is_some();
        all &= ok;
        parts.push(format!("{name}: error < 1e-6 from n = {:?}, residuals ok {residual_ok}", first.map(|k| rep.records[k].n)));
    }
    verdict(7, "adaptive FSM convergence", all, t.elapsed(), secs(300), &parts.join("; "));
}

/// Dense Gaussian elimination with partial pivoting.
fn dense_solve(a: &mut [Vec<C>], b: &mut [C]) -> Vec<C> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm())).unwrap();
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            if f == C::new(0.0, 0.0) {
                continue;
            }
            for j in k..n {
                let akj = a[k][j];
                a[i][j] -= f * akj;
            }
            let bk = b[k];
            b[i] -= f * bk;
        }
    }
    let mut x = vec![C::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let s: C = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

#[test]
fn criterion_08_solver_cross_validation() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let k = [-1, 0, 1][trial % 3];
        let size = rng.gen_range(1..=500) as i64;
        let mut c = |lo: f64, hi: f64| C::from_polar(rng.gen_range(lo..hi), rng.gen_range(0.0..std::f64::consts::TAU));
        // the band that becomes the diagonal of the shifted window dominates
        let (ur, vr, wr) = match k {
            0 => ((0.1, 1.0), (2.5, 4.0), (0.1, 1.0)),
            -1 => ((2.5, 4.0), (0.1, 1.0), (0.1, 1.0)),
            _ => ((0.1, 1.0), (0.1, 1.0), (2.5, 4.0)),
        };
        let triples: Vec<Triple> = (0..size + 4).map(|_| Triple::new(c(ur.0, ur.1), c(vr.0, vr.1), c(wr.0, wr.1))).collect();
        let field = DiagonalField::explicit(-2, triples, FieldOrientation::BiInfinite).unwrap();
        let sys: BandedSystem = materialize(&field, 0, size - 1, k).unwrap();
        let rhs: Vec<C> = (0..size).map(|_| c(0.0, 1.0)).collect();
        let x = solve_window(&sys, &rhs).unwrap();
        let mut dense: Vec<Vec<C>> = (0..size).map(|i| (0..size).map(|j| sys.get(i, j)).collect()).collect();
        let y = dense_solve(&mut dense, &mut rhs.clone());
        let num = x.iter().zip(&y).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        let den = y.iter().map(|z| z.norm()).fold(0.0, f64::max);
        worst = worst.max(num / den);
    }
    let detail = format!("100 windows, max relative error {worst:.3e}");
    verdict(8, "solver cross-validation", worst <= 1e-10, t.elapsed(), secs(60), &detail);
}

#[test]
fn criterion_09_degeneracy_handling() {
    let t = Instant::now();
    let mut triples = vec![(C::new(1.0, 0.0), C::new(2.0, 0.0), C::new(1.0, 0.0))];
    for k in 0..16 {
        let theta = k as f64 * std::f64::consts::TAU / 16.0;
        triples.push((C::new(1.0, 0.0), C::new(2.0 * theta.cos(), 0.0), C::new(1.0, 0.0)));
        for g in [0.5f64, 1.0] {
            let v = C::new(2.0 * g.cosh() * theta.cos(), 2.0 * g.sinh() * theta.sin());
            triples.push((C::new(g.exp(), 0.0), v, C::new((-g).exp(), 0.0)));
        }
    }
    let classified = triples.iter().all(|&(u, v, w)| classify_triple(u, v, w, TOL_CASE) == Case::NotFredholm);

    let dir = tempfile::tempdir().unwrap();
    let field = DiagonalField::constant(Triple::real(1.0, 2.0, 1.0), -50, 50, FieldOrientation::BiInfinite).unwrap();
    let fpath = dir.path().join("field.jsonl");
    io::write_field(&fpath, &field).unwrap();
    let spath = dir.path().join("sets.json");
    let sets = r#"{"u": {"kind": "points", "points": [[1, 0]]}, "v": {"kind": "points", "points": [[2, 0]]}, "w": {"kind": "points", "points": [[1, 0]]}}"#;
    std::fs::write(&spath, sets).unwrap();

    let bin = env!("CARGO_BIN_EXE_fsm-jacobi");
    let solve = Command::new(bin)
        .args(["solve", "--field"])
        .arg(&fpath)
        .args(["--target", "1,2,1", "--nmax", "3"])
        .output()
        .unwrap();
    let classify = Command::new(bin).args(["classify", "--sets"]).arg(&spath).output().unwrap();
    let verdict_json: serde_json::Value = serde_json::from_slice(&classify.stdout).unwrap();
    let code = solve.status.code();
    let pass = classified && code == Some(4) && verdict_json["case"] == "NotFredholm";
    let detail = format!("{} triples NotFredholm: {classified}; solve exit code {code:?}; classify case {}", triples.len(), verdict_json["case"]);
    verdict(9, "degeneracy handling", pass, t.elapsed(), secs(1), &detail);
}

#[test]
fn criterion_10_enumeration_pseudoergodic() {
    let t = Instant::now();
    let alphabet = vec![Triple::real(1.0, 0.0, 1.0), Triple::real(1.0, 2.0, 1.0)];
    let field = DiagonalField::word_enumeration(alphabet, 1, 100, FieldOrientation::SemiInfinite).unwrap();
    let rep = verify_pseudoergodic(&field, 3, 1e-12).unwrap();
    let pass = rep.all_found && rep.found == 14 && rep.words.len() == 14;
    let detail = format!("{} of {} words of length <= 3 found in a prefix of 100", rep.found, rep.words.len());
    verdict(10, "pseudoergodic enumeration", pass, t.elapsed(), secs(1), &detail);
}
