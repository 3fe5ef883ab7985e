//! The generic (c, M) estimator: per string, pick the copy subset with the
//! largest weighted moment, then reweight outcomes of the conjugated POVM.

use pauliest::pauli::PauliSet;
use pauliest::protocols::{generic_cm_estimator, GenericCmModel, PovmEnsemble};
use pauliest::quantum::{bell_povm, StateSpec};
use pauliest::rng::stream;

fn main() -> pauliest::Result<()> {
    let n = 1;
    let eps = 0.3;
    let model = GenericCmModel::new(&PovmEnsemble::single(bell_povm(n)?), 2)?;
    let set = PauliSet::nontrivial(n);
    for p in set.iter() {
        println!("{p}: best subset {:?}, mu = {:.4}", model.best_subset(p, eps)?, model.mu(p, &[0, 1])?);
    }
    let rho = StateSpec::Haar.build(n, &mut stream(31, 0))?;
    let report = generic_cm_estimator(&set, &model, &rho, eps, 20_000, &mut stream(32, 0))?;
    for e in &report.estimates {
        println!("{}: est {:.4} target {:.4} {}", e.pauli, e.estimate, e.target, e.note.as_deref().unwrap_or(""));
    }

    let covering = GenericCmModel::new(&PovmEnsemble::clifford_covering(2)?, 1)?;
    println!("single-copy covering model: {} outcomes", covering.outcomes());
    Ok(())
}
