//! Hausdorff convergence of finite-section spectra: a selfadjoint Anderson
//! field converges to V + [-2, 2]; a non-normal constant field does not
//! approach its symbol curve.

use fsm_jacobi::operator::laurent_spectrum;
use fsm_jacobi::pseudoergodic::{DiagonalField, FieldOrientation, IidSampler, Triple};
use fsm_jacobi::spectra::{convergence_study, StudyMode};
use fsm_jacobi::symbol_sets::{selfadjoint_spectrum, ComplexPoint as C, SymbolSet, TriSymbolSet};

fn main() -> fsm_jacobi::Result<()> {
    let sets = TriSymbolSet::anderson(SymbolSet::real_points(&[0.0, 2.0])?);
    let intervals = selfadjoint_spectrum(sets.u(), sets.v())?;
    let target: Vec<C> = intervals
        .iter()
        .flat_map(|&(a, b)| (0..=6000).map(move |k| C::new(a + (b - a) * k as f64 / 6000.0, 0.0)))
        .collect();
    let mut field = DiagonalField::sample_iid(IidSampler::new(sets, 11), -8, 8, FieldOrientation::BiInfinite)?;
    let rep = convergence_study(&mut field, &[250, 500, 1000, 2000], StudyMode::Eigenvalues, &target, 0.25)?;
    println!("anderson vs {intervals:?}");
    for (n, d) in rep.sizes.iter().zip(&rep.distances) {
        println!("  n = {n:>5}  d_H = {d:.4}");
    }
    println!("  decreasing {}, converged {}", rep.decreasing, rep.converged);

    let e = 1f64.exp();
    let t = Triple::real(e, 0.0, 1.0 / e);
    let mut constant = DiagonalField::constant(t, -600, 600, FieldOrientation::BiInfinite)?;
    let curve = laurent_spectrum(t.u, t.v, t.w, 4096)?;
    let rep = convergence_study(&mut constant, &[50, 200, 800], StudyMode::Eigenvalues, &curve, 0.25)?;
    println!("constant (e, 0, 1/e) vs symbol curve");
    for (n, d) in rep.sizes.iter().zip(&rep.distances) {
        println!("  n = {n:>5}  d_H = {d:.4}");
    }
    println!("  converged {}", rep.converged);
    Ok(())
}
