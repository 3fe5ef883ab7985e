//! Memory-free estimation with Pauli-conjugated measurements of an ensemble
//! of pure states; the ensemble's worst per-string advantage sets the budget.

use pauliest::pauli::PauliSet;
use pauliest::protocols::{budget, family_ensemble, no_memory_protocol};
use pauliest::quantum::StateSpec;
use pauliest::rng::stream;
use pauliest::stabilizer::stabilizer_covering;

fn main() -> pauliest::Result<()> {
    let n = 2;
    let set = PauliSet::nontrivial(n);
    let ensemble = family_ensemble(stabilizer_covering(n)?.groups())?;
    let delta = set.iter().map(|p| ensemble.game_value(p)).collect::<pauliest::Result<Vec<_>>>()?;
    let delta = delta.into_iter().fold(f64::INFINITY, f64::min);
    let eps = 0.15;
    let rounds = budget::no_memory(eps, delta, set.len());
    let rho = StateSpec::Haar.build(n, &mut stream(3, 0))?;
    let report = no_memory_protocol(&set, &ensemble, &rho, rounds, &mut stream(4, 0))?;
    println!("advantage {delta:.4}, {rounds} copies, max error {:.4}", report.max_error());
    Ok(())
}
