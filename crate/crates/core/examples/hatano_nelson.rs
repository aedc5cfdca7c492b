//! The Hatano-Nelson experiment: case (b), shift by one row, inverse norms
//! against the theoretical constants.
//!
//! `cargo run --release --example hatano_nelson -- 5` for a different seed.

use fsm_jacobi::cli::{cmd_reproduce_hatano_nelson, format_reproduce};

fn main() -> fsm_jacobi::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let rep = cmd_reproduce_hatano_nelson(1.0, 2.0, seed, 6, 5000)?;
    print!("{}", format_reproduce(&rep));
    Ok(())
}
