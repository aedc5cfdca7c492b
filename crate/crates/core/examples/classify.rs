//! Fredholm case of a few coefficient triples, with certificates.

use fsm_jacobi::cli::cmd_classify;
use fsm_jacobi::pseudoergodic::SamplingLaw;
use fsm_jacobi::symbol_sets::{ComplexPoint, SymbolSet, TriSymbolSet, TOL_CASE};
use fsm_jacobi::fredholm::CLASSIFY_BUDGET;

fn point(x: f64) -> SymbolSet {
    SymbolSet::point(ComplexPoint::new(x, 0.0))
}

fn main() -> fsm_jacobi::Result<()> {
    let cases = [
        ("diagonally dominant", TriSymbolSet::new(point(1.0), SymbolSet::interval(3.0, 4.0)?, point(0.5))),
        ("hatano-nelson g=1 a=2", TriSymbolSet::hatano_nelson(1.0, 2.0)?),
        ("mirrored hatano-nelson", TriSymbolSet::new(point((-1f64).exp()), SymbolSet::interval(-2.0, 2.0)?, point(1f64.exp()))),
        ("free laplacian at 2", TriSymbolSet::new(point(1.0), point(2.0), point(1.0))),
    ];
    for (name, sets) in cases {
        let rep = cmd_classify(&sets, [SamplingLaw::Uniform; 3], TOL_CASE, CLASSIFY_BUDGET);
        println!(
            "{name:<24} case {:?}  ind A+ = {:?}  consistent = {}  1/delta = {:?}  cap = {:?}",
            rep.case, rep.plus_index, rep.consistent, rep.certificates.delta_bound, rep.certificates.stability_cap
        );
    }
    Ok(())
}
