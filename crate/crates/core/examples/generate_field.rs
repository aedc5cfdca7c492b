//! Sample a field, write it as JSON lines, read it back and grow it.

use fsm_jacobi::io;
use fsm_jacobi::pseudoergodic::{verify_pseudoergodic, DiagonalField, FieldOrientation, IidSampler, Triple};
use fsm_jacobi::symbol_sets::{SymbolSet, TriSymbolSet};

fn main() -> fsm_jacobi::Result<()> {
    let sets = TriSymbolSet::anderson(SymbolSet::real_points(&[0.0, 2.0])?);
    let field = DiagonalField::sample_iid(IidSampler::new(sets, 42), -10, 10, FieldOrientation::BiInfinite)?;
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("field.jsonl");
    io::write_field(&path, &field)?;
    let text = std::fs::read_to_string(&path)?;
    println!("{}", text.lines().next().unwrap());
    println!("{} records", text.lines().count() - 1);

    let mut back = io::read_field(&path)?;
    back.ensure(-1000, 1000)?;
    assert_eq!(back.at(7), field.at(7));
    println!("grown to [{}, {}], entry 7 unchanged", back.lo(), back.hi());

    let alphabet = vec![Triple::real(1.0, 0.0, 1.0), Triple::real(1.0, 2.0, 1.0)];
    let words = DiagonalField::word_enumeration(alphabet, 1, 100, FieldOrientation::SemiInfinite)?;
    let rep = verify_pseudoergodic(&words, 3, 1e-12)?;
    println!("enumeration prefix of 100: {} of 14 words found", rep.found);
    Ok(())
}
