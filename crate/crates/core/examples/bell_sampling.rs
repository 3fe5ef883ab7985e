//! Two-copy Bell sampling for |tr(P rho)|, then sign recovery against a
//! reference state.

use pauliest::pauli::PauliSet;
use pauliest::protocols::{bell_abs_protocol, budget, two_copy_full, SigmaMode};
use pauliest::quantum::StateSpec;
use pauliest::rng::stream;

fn main() -> pauliest::Result<()> {
    let n = 3;
    let set = PauliSet::nontrivial(n);
    let rho = StateSpec::Haar.build(n, &mut stream(11, 0))?;
    let eps = 0.25;
    let abs = bell_abs_protocol(&set, &rho, budget::bell(eps, set.len()), &mut stream(12, 0))?;
    println!("|tr(P rho)| for all {} strings: max error {:.4}, {} copies", set.len(), abs.max_error(), abs.copies);

    let full = two_copy_full(&set, &rho, 0.6, SigmaMode::Oracle, None, &mut stream(13, 0))?;
    println!("signed estimates at eps 0.6: max error {:.4}, {} copies", full.max_error(), full.copies);
    for s in &full.stages {
        println!("  stage {:<24} {} rounds x {} copies", s.name, s.rounds, s.copies_per_round);
    }
    Ok(())
}
