//! Stabilizer coverings: 2^m + 1 maximal commuting groups that partition the
//! nontrivial m-qubit strings, and the eigenbasis readout of one group.

use pauliest::stabilizer::{stabilizer_covering, StabilizerBasis};

fn main() -> pauliest::Result<()> {
    let m: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let covering = stabilizer_covering(m)?;
    println!("{} groups on {m} qubits", covering.len());
    for g in covering.groups() {
        let gens: Vec<String> = g.generators().iter().map(|p| p.to_string()).collect();
        println!("  <{}>", gens.join(", "));
    }
    let basis = StabilizerBasis::new(covering.groups()[0].clone());
    println!("first group: {} outcomes; readout of element 1 on outcome 0 is {}", basis.outcomes(), basis.readout(1, 0));
    println!("{}", covering.to_json()?);
    Ok(())
}
