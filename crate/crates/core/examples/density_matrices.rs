//! Named state generators, POVM outcome laws, sampling and chi^2 between two
//! hypotheses.

use pauliest::quantum::{chi2_divergence, maximally_mixed, outcome_distribution, rho_p, sample, StateSpec};
use pauliest::rng::stream;
use pauliest::stabilizer::{clifford_povm, stabilizer_covering};

fn main() -> pauliest::Result<()> {
    let mut rng = stream(7, 0);
    for name in ["mixed", "ghz", "haar", "rho_p:XY:0.1", "product:01"] {
        let rho = name.parse::<StateSpec>()?.build(2, &mut rng)?;
        println!("{name:<14} purity {:.4}", rho.purity());
    }

    let covering = stabilizer_covering(2)?;
    let povm = clifford_povm(&covering.groups()[0])?;
    let perturbed = rho_p(&"ZI".parse()?, 0.1)?.state;
    let dist = outcome_distribution(&povm, &perturbed)?;
    println!("outcome law {:?}", dist.probs());
    println!("10 shots {:?}", sample(&povm, &perturbed, &mut rng, 10)?);
    let chi2 = chi2_divergence(&povm, &perturbed, &maximally_mixed(2)?)?;
    println!("chi^2(rho_P || I/4) = {chi2:.6}");
    Ok(())
}
