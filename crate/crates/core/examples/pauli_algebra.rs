//! Pauli strings as bit masks: products, commutation, and the symplectic
//! Fourier transform that turns Pauli spectra into Bell statistics.

use pauliest::pauli::{symplectic_fourier, PauliSet, PauliString};

fn main() -> pauliest::Result<()> {
    let xz: PauliString = "XZ".parse()?;
    let zx: PauliString = "ZX".parse()?;
    let (phase, prod) = xz.mul(&zx)?;
    println!("XZ * ZX = i^{} {}", phase.power(), prod);
    println!("XZ and ZX commute: {}", xz.commutes(&zx)? == 1);
    println!("weight(XZ) = {}, index = {}", xz.weight(), xz.index().value());

    let set = PauliSet::parse_text("# a small set\nXX\nYY\nZZ\n")?;
    println!("set of {} strings:\n{}", set.len(), set.to_text());

    // the transform of a delta at I is flat
    let mut f = vec![0.0; 16];
    f[0] = 1.0;
    println!("SF(delta_I) = {:?}", symplectic_fourier(&f, 2));
    Ok(())
}
