//! Holevo bound against the mutual information of a measured ensemble.

use qentropy::capacity::{cqc_mutual, holevo_bound};
use qentropy::channels::{channel_zoo, qubit_vector, MeasurementDecoding, QuantumCoding};
use qentropy::cqc::build_pipeline;
use qentropy::linalg::ComplexMatrix;

fn main() -> qentropy::Result<()> {
    // trine states on the equator of the Bloch sphere
    let tau = std::f64::consts::TAU;
    let codes = QuantumCoding::from_vectors(
        &(0..3).map(|k| qubit_vector(std::f64::consts::FRAC_PI_2, tau * k as f64 / 3.0)).collect::<Vec<_>>(),
    )?;
    let lambda = [1.0 / 3.0; 3];
    let ch = channel_zoo("depolarizing", &[0.1])?;
    let h = holevo_bound(&lambda, &codes, &ch)?;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let x_basis = MeasurementDecoding::projective(&ComplexMatrix::from_real_rows(&[vec![r, r], vec![r, -r]])?)?;
    for (label, dec) in [("Z", MeasurementDecoding::basis(2)), ("X", x_basis)] {
        let pipe = build_pipeline(codes.clone(), ch.clone(), dec)?;
        println!("measured ({label} basis) {:.9}", cqc_mutual(&pipe, &lambda)?.nats());
    }
    println!("Holevo bound       {:.9}", h.nats());
    Ok(())
}
