//! Eigenvalues and pseudospectra of a Hatano-Nelson window.

use fsm_jacobi::cli::hatano_nelson_field;
use fsm_jacobi::operator::materialize;
use fsm_jacobi::spectra::{eigenvalues, pseudospectrum_grid, singular_values, GridSpec};

fn main() -> fsm_jacobi::Result<()> {
    let field = hatano_nelson_field(1.0, 2.0, 3)?;
    let sys = materialize(&field, -40, 40, 0)?;
    let ev = eigenvalues(&sys)?.points;
    let im = ev.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    println!("{} eigenvalues, max |Im| = {im:.3e}", ev.len());
    let sv = singular_values(&sys)?.points;
    println!("sigma_max = {:.4}, sigma_min = {:.4e}", sv[0].re, sv.last().unwrap().re);

    let grid = GridSpec::new(-5.5, 5.5, -3.5, 3.5, 45, 29)?;
    let ps = pseudospectrum_grid(&sys, grid, &[1e-1, 1e-3, 1e-6])?;
    for level in &ps.levels {
        println!("{:?}: {} of {} nodes", level.kind, level.points.len(), grid.nx * grid.ny);
    }
    // coarse picture of log10 sigma_min
    for row in ps.sigma_min.chunks(grid.nx).rev().step_by(2) {
        let line: String = row
            .iter()
            .map(|s| match s.log10() {
                x if x < -6.0 => '#',
                x if x < -3.0 => '+',
                x if x < -1.0 => '.',
                _ => ' ',
            })
            .collect();
        println!("|{line}|");
    }
    Ok(())
}
