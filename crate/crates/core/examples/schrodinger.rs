//! Unitary Schrödinger dynamics as a classical evolution on Hermitian
//! matrices: Born probabilities and measurement laws through time.

use markovian::markov::{chain_distributions, limit_distribution};
use markovian::quantum::{measurement_expectation, schrodinger_evolution, Measurement, WaveFunction};
use markovian::spectral::{real_matrix, ComplexMatrix, ComplexVector};
use num_complex::Complex64;

fn main() -> markovian::Result<()> {
    let theta: f64 = 0.3;
    let u = ComplexMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(theta.cos(), 0.0),
            Complex64::new(0.0, -theta.sin()),
            Complex64::new(0.0, -theta.sin()),
            Complex64::new(theta.cos(), 0.0),
        ],
    );
    let wave = WaveFunction::new(ComplexVector::from_column_slice(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]))?;
    let se = schrodinger_evolution(&u, &wave)?;
    println!("decode deviation over 50 steps: {:.2e}", se.verify(50)?);

    let spin = Measurement::new(real_matrix(2, 2, &[1.0, 0.0, 0.0, -1.0]))?;
    println!("E[spin] at t = 0: {:.4}", measurement_expectation(&spin, &wave)?.value);
    let obs = se.measurement_observable(&spin)?;
    let series = chain_distributions(&obs, se.evolution(), 6)?;
    for (t, row) in series.rows.iter().enumerate() {
        println!("t = {t}  Pr(-1, +1) = {row:.4?}");
    }
    let limit = limit_distribution(&obs, se.evolution(), 1e-8)?;
    println!("limit law of the spin: {:.4?}", limit.probs);
    Ok(())
}
