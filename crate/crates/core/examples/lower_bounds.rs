//! Copy lower bounds for c-copy protocols with k qubits of memory, and the
//! moment chain bounding delta_{c,M}.

use pauliest::analysis::{delta_cm_upper_from_moments, lower_bound_card, MomentBounds};

fn main() -> pauliest::Result<()> {
    let (n, c, eps) = (8, 2, 0.05);
    println!("{:>3} {:>14} {:>14} {:>8}", "k", "single-copy", "memory", "binding");
    for k in 0..=n {
        let card = lower_bound_card(n, k, c, eps)?;
        println!("{k:>3} {:>14.1} {:>14.1} {:?}", card.single_copy_term, card.memory_term, card.binding);
    }
    let bounded = delta_cm_upper_from_moments(c, eps, &MomentBounds::memory(n, 2, c))?;
    let unbounded = delta_cm_upper_from_moments(c, eps, &MomentBounds::unbounded(n, c))?;
    println!("delta upper: k=2 {bounded:.3e}, unrestricted {unbounded:.3e}");
    Ok(())
}
