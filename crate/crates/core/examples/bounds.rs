//! Spectral inclusion sets for the three classical coefficient triples.

use fsm_jacobi::cli::cmd_bounds;
use fsm_jacobi::symbol_sets::{SymbolSet, TriSymbolSet};

fn main() -> fsm_jacobi::Result<()> {
    let cases = [
        ("anderson V={0,2}", TriSymbolSet::anderson(SymbolSet::real_points(&[0.0, 2.0])?)),
        ("hatano-nelson g=1 a=2", TriSymbolSet::hatano_nelson(1.0, 2.0)?),
        ("feinberg-zee", TriSymbolSet::feinberg_zee()),
    ];
    for (name, sets) in cases {
        let (rep, lower) = cmd_bounds(&sets, 128, 81)?;
        let rmax = lower.iter().map(|z| z.norm()).fold(0.0, f64::max);
        println!("{name}");
        println!("  upper bound: V + {:.4} D", rep.upper.radius);
        println!("  lower bound: {} points, max |z| = {rmax:.4}", rep.lower_points);
        match rep.hole.bbox {
            Some(b) => println!("  hole: {} grid nodes in [{:.3}, {:.3}] x [{:.3}, {:.3}]", rep.hole.nodes_in_hole, b[0], b[1], b[2], b[3]),
            None => println!("  hole: none"),
        }
        if let Some(iv) = rep.selfadjoint {
            println!("  selfadjoint spectrum: {iv:?}");
        }
    }
    Ok(())
}
