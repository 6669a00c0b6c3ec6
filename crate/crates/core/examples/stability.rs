//! The dual stability test on three small evolutions: a rotation, a
//! Jordan block on the unit circle and a contraction.

use markovian::evolution::{stability_check, Evolution};
use markovian::spectral::{real_matrix, real_vector};

fn main() -> markovian::Result<()> {
    let cases = [
        ("rotation", real_matrix(2, 2, &[0.0, -1.0, 1.0, 0.0]), real_vector(&[1.0, 0.0])),
        ("jordan block", real_matrix(2, 2, &[1.0, 1.0, 0.0, 1.0]), real_vector(&[0.0, 1.0])),
        ("jordan, eigenvector start", real_matrix(2, 2, &[1.0, 1.0, 0.0, 1.0]), real_vector(&[1.0, 0.0])),
        ("contraction", real_matrix(2, 2, &[0.5, 0.2, 0.0, 0.9]), real_vector(&[1.0, 1.0])),
    ];
    for (name, op, start) in cases {
        let report = stability_check(&Evolution::new(op, start)?, 64, 1e-8)?;
        println!(
            "{name:<26} {:?}  sup ~ {:.3e}  spectral radius {:.3}  dim {}",
            report.verdict,
            report.sup_norm_estimate,
            report.spectral_evidence.max_modulus,
            report.spectral_evidence.evolution_dim,
        );
    }
    Ok(())
}
