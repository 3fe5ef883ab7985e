//! Bracketing delta_A, the memory-free advantage of a Pauli set, and
//! comparing it with the closed forms for structured sets.

use pauliest::analysis::{closed_form_delta, delta_a_bracket, BracketOptions, DeltaKind};
use pauliest::pauli::PauliSet;
use pauliest::rng::stream;

fn main() -> pauliest::Result<()> {
    let triangle = PauliSet::parse_text("X\nY\nZ\n")?;
    let b = delta_a_bracket(&triangle, &BracketOptions::default(), &mut stream(51, 0))?;
    println!("{{X,Y,Z}}: [{:.4}, {:.4}], relaxation {:?}", b.lower, b.upper, b.upper_relaxation);
    println!("closed form {:?}", closed_form_delta(DeltaKind::Noncommuting { m: 3 })?);

    let two_families = PauliSet::parse_text("XI\nIX\nXX\nZI\nIZ\nZZ\n")?;
    let b = delta_a_bracket(&two_families, &BracketOptions::default(), &mut stream(52, 0))?;
    println!("two families: [{:.4}, {:.4}], {} witness states", b.lower, b.upper, b.witness_count);
    println!("closed form {:?}", closed_form_delta(DeltaKind::Families { m: 2 })?);
    Ok(())
}
