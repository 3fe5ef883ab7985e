//! Purity testing with k qubits of memory: partial computational-basis
//! measurement plus a swap test on the remaining qubits.

use pauliest::protocols::{purity_test_k, PurityMode, Verdict};
use pauliest::quantum::{maximally_mixed, purity_event_probability, StateSpec};
use pauliest::rng::stream;

fn main() -> pauliest::Result<()> {
    let n = 4;
    let mixed = maximally_mixed(n)?;
    let pure = StateSpec::Haar.build(n, &mut stream(41, 0))?;
    for k in 0..=n {
        let p = purity_event_probability(&mixed, k)?;
        let trials = 500;
        let wrong = (0..trials)
            .filter(|&t| {
                let r = purity_test_k(&mixed, k, PurityMode::Bernoulli, &mut stream(42, t)).unwrap();
                r.verdict == Verdict::Pure
            })
            .count();
        let pure_ok = purity_test_k(&pure, k, PurityMode::Trajectory, &mut stream(43, k as u64))?.verdict == Verdict::Pure;
        println!(
            "k={k}: event prob {p:.5}, wrong verdict on I/2^n {:.3}, pure state passes: {pure_ok}",
            wrong as f64 / trials as f64
        );
    }
    Ok(())
}
