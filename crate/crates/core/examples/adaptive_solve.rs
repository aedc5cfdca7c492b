//! Adaptive finite sections for a manufactured solution in each Fredholm case.

use std::collections::BTreeMap;

use fsm_jacobi::fsm::{solve_adaptive_bi, solve_adaptive_semi, Rhs, SolveOptions};
use fsm_jacobi::pseudoergodic::{DiagonalField, FieldOrientation, IidSampler, Triple};
use fsm_jacobi::symbol_sets::{ComplexPoint as C, SymbolSet, TriSymbolSet};

/// `b = A x` for a finitely supported `x`.
fn manufacture(field: &DiagonalField, x: &BTreeMap<i64, C>) -> Rhs {
    let mut b = BTreeMap::new();
    for (&j, &xj) in x {
        let t = field.at(j);
        *b.entry(j).or_insert(C::new(0.0, 0.0)) += t.v * xj;
        if field.get(j + 1).is_some() {
            *b.entry(j + 1).or_insert(C::new(0.0, 0.0)) += field.at(j + 1).u * xj;
        }
        if field.get(j - 1).is_some() {
            *b.entry(j - 1).or_insert(C::new(0.0, 0.0)) += field.at(j - 1).w * xj;
        }
    }
    Rhs::new(b)
}

fn run(name: &str, sets: TriSymbolSet, target: Triple, semi: bool) -> fsm_jacobi::Result<()> {
    let orientation = if semi { FieldOrientation::SemiInfinite } else { FieldOrientation::BiInfinite };
    let (lo, hi) = if semi { (1, 200) } else { (-200, 200) };
    let mut field = DiagonalField::sample_iid(IidSampler::new(sets, 7), lo, hi, orientation)?;
    let support: Vec<i64> = if semi { (1..=5).collect() } else { (-2..=2).collect() };
    let x: BTreeMap<i64, C> = support.iter().map(|&i| (i, C::new(1.0 + i as f64 * 0.25, 0.5))).collect();
    let b = manufacture(&field, &x);
    let opts = SolveOptions::with_n_max(10);
    let rep = if semi {
        solve_adaptive_semi(&mut field, &b, target, opts)?
    } else {
        solve_adaptive_bi(&mut field, &b, target, opts)?
    };
    println!("{name}: case {:?}, shift {}", rep.case, rep.shift_k);
    for r in &rep.records {
        let err = support.iter().map(|i| (r.value(*i).unwrap_or_default() - x[i]).norm()).fold(0.0, f64::max);
        println!("  n={:>2} [{:>5}, {:>5}] residual {:.1e} error {:.1e}", r.n, r.l, r.r, r.residual_inf, err);
    }
    Ok(())
}

fn point(x: f64) -> SymbolSet {
    SymbolSet::point(C::new(x, 0.0))
}

fn main() -> fsm_jacobi::Result<()> {
    let a = || TriSymbolSet::new(point(1.0), SymbolSet::real_points(&[3.0, 4.0]).unwrap(), point(0.5));
    run("case A", a(), Triple::real(1.0, 3.0, 0.5), false)?;
    run("case A, semi-infinite", a(), Triple::real(1.0, 3.0, 0.5), true)?;
    let b = TriSymbolSet::new(point(2.0), SymbolSet::real_points(&[0.0, 0.5])?, point(0.5));
    run("case B", b, Triple::real(2.0, 0.0, 0.5), false)?;
    let c = TriSymbolSet::new(point(0.5), SymbolSet::real_points(&[0.0, 0.5])?, point(2.0));
    run("case C", c, Triple::real(0.5, 0.0, 2.0), false)
}
