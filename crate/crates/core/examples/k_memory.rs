//! All Pauli strings with k qubits of quantum memory: Bell measurement on the
//! first k qubits of two copies, stabilizer-basis measurements on the rest.

use pauliest::protocols::{k_memory_protocol, KMemoryOptions};
use pauliest::quantum::StateSpec;
use pauliest::rng::stream;

fn main() -> pauliest::Result<()> {
    let (n, k, eps) = (3, 1, 0.4);
    let rho = StateSpec::Haar.build(n, &mut stream(21, 0))?;
    let report = k_memory_protocol(&rho, k, eps, &KMemoryOptions::default(), &mut stream(22, 0))?;
    println!("n={n} k={k}: max error {:.4} over {} strings", report.max_error(), report.estimates.len());
    for s in &report.stages {
        println!("  {:<22} {} rounds x {} copies", s.name, s.rounds, s.copies_per_round);
    }
    let abs_only = KMemoryOptions { sign: None, ..KMemoryOptions::default() };
    let report = k_memory_protocol(&rho, k, eps, &abs_only, &mut stream(23, 0))?;
    println!("absolute values only: max error {:.4}, {} copies", report.max_error(), report.copies);
    Ok(())
}
