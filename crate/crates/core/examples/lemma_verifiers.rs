//! Randomised numerical checks of the structural inequalities: Pauli sums,
//! MPS Pauli moments, permutation operators and the SWAP bound.

use pauliest::analysis::{run_suite, VerifySuite};
use pauliest::rng::stream;

fn main() -> pauliest::Result<()> {
    let trials = 100;
    for suite in [
        VerifySuite::PauliIdentities,
        VerifySuite::MpsBound,
        VerifySuite::Permutation,
        VerifySuite::SwapBound,
        VerifySuite::Chi2Clifford,
    ] {
        println!("{suite:?}");
        for case in run_suite(suite, trials, &mut stream(61, 0))? {
            println!("  {:<32} {:.4e} (bound {:.4e})", case.case, case.statistic, case.bound);
        }
    }
    Ok(())
}
