//! Von Neumann, Umegaki and Shannon entropies.

use qentropy::entropy::{shannon, umegaki_relative, von_neumann};
use qentropy::states::{random_density, DensityMatrix};

fn main() -> qentropy::Result<()> {
    let rho = random_density(3, 3, 42)?;
    let mixed = DensityMatrix::maximally_mixed(3);
    println!("S(rho)          = {:.9} nats", von_neumann(&rho).nats());
    println!("S(rho, I/3)     = {:.9} nats", umegaki_relative(&rho, &mixed, 1e-10)?.nats());
    println!("ln 3 - S(rho)   = {:.9} nats", 3f64.ln() - von_neumann(&rho).nats());

    // orthogonal pure states: the support condition fails
    let zero = DensityMatrix::basis(2, 0);
    let one = DensityMatrix::basis(2, 1);
    println!("S(|0>, |1>)     = {}", umegaki_relative(&zero, &one, 1e-10)?);
    println!("H(1/2, 1/4, 1/4) = {:.6} bits", shannon(&[0.5, 0.25, 0.25])?.bits());
    Ok(())
}
