//! Fractional colouring of the anti-commutation graph, and the Clifford
//! measurement plan it induces.

use pauliest::coloring::{build_graph, fractional_coloring, schedule, xyz_coloring};
use pauliest::pauli::PauliSet;

fn main() -> pauliest::Result<()> {
    let triangle = PauliSet::parse_text("X\nY\nZ\n")?;
    let g = build_graph(&triangle);
    let col = fractional_coloring(&g)?;
    println!("zeta_f(XYZ) = {} (exact {:?})", col.value, col.exact_value.as_ref().map(|v| v.to_string()));

    let pairs = PauliSet::parse_text("XX\nZZ\nYY\nXZ\nZX\nYI\n")?;
    let g = build_graph(&pairs);
    let col = fractional_coloring(&g)?;
    let plan = schedule(&col, &g)?;
    println!("zeta_f = {:.4}, duality gap {:.1e}", col.value, col.gap);
    println!("{}", plan.document(&pairs, &col)?);

    for n in 1..=3 {
        let (_, c) = xyz_coloring(n)?;
        println!("{{X,Y,Z}}^{n}: total weight {:.4}", c.value);
    }
    Ok(())
}
