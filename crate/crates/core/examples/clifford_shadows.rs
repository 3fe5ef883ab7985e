//! Single-copy estimation by sampling stabilizer families from a fractional
//! colouring, with the budget 4 zeta ln(20|A|) / eps^2.

use pauliest::coloring::{build_graph, fractional_coloring, schedule};
use pauliest::pauli::PauliSet;
use pauliest::protocols::{budget, clifford_protocol};
use pauliest::quantum::StateSpec;
use pauliest::rng::stream;

fn main() -> pauliest::Result<()> {
    let set = PauliSet::parse_text("XXI\nZZI\nIXX\nIZZ\nYIY\nXYZ\n")?;
    let rho = StateSpec::Haar.build(3, &mut stream(1, 0))?;
    let g = build_graph(&set);
    let plan = schedule(&fractional_coloring(&g)?, &g)?;
    let eps = 0.1;
    let rounds = budget::clifford(eps, plan.zeta, set.len());
    let report = clifford_protocol(&set, &plan, &rho, rounds, &mut stream(2, 0))?;
    println!("zeta = {:.3}, {} rounds", plan.zeta, rounds);
    for e in &report.estimates {
        println!("{:>4}  est {:+.4}  true {:+.4}", e.pauli.to_string(), e.estimate, e.target);
    }
    println!("max error {:.4} (eps {eps})", report.max_error());
    Ok(())
}
