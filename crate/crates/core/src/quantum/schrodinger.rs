use nalgebra::DVector;

use super::hermitian::HermitianBasis;
use super::state::{Measurement, WaveFunction, QUANTUM_TOL};
use crate::error::{Error, Result};
use crate::evolution::Evolution;
use crate::markov::{Observable, DISTRIBUTION_TOL};
use crate::spectral::{
    c, ensure_dim, ensure_square, unitary_defect, ComplexMatrix, ComplexVector,
};

/// Evolution of vectorised projectors under `T ↦ U T U*`, started at `P_s`.
#[derive(Debug, Clone)]
pub struct SchrodingerEvolution {
    unitary: ComplexMatrix,
    wave: WaveFunction,
    basis: HermitianBasis,
    evolution: Evolution,
}

/// Builds the projector evolution of `s` under `u`; checks the first step
/// against `P_{us}`.
pub fn schrodinger_evolution(u: &ComplexMatrix, s: &WaveFunction) -> Result<SchrodingerEvolution> {
    let d = ensure_square(u)?;
    ensure_dim(d, s.dim())?;
    let deviation = unitary_defect(u);
    if deviation > QUANTUM_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    let basis = HermitianBasis::new(d);
    let sup = basis.superoperator(|t| u * t * u.adjoint());
    let op = sup.map(|x| c(x, 0.0));
    let start = to_complex(&basis.coordinates(&s.projector()));
    let out = SchrodingerEvolution {
        unitary: u.clone(),
        wave: s.clone(),
        basis,
        evolution: Evolution::new(op, start)?,
    };
    out.verify(1)?;
    Ok(out)
}

fn to_complex(v: &DVector<f64>) -> ComplexVector {
    v.map(|x| c(x, 0.0))
}

impl SchrodingerEvolution {
    pub fn evolution(&self) -> &Evolution {
        &self.evolution
    }

    pub fn basis(&self) -> &HermitianBasis {
        &self.basis
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn wave(&self) -> &WaveFunction {
        &self.wave
    }

    /// Decodes a state of the vectorised evolution into a Hermitian matrix.
    pub fn decode(&self, state: &ComplexVector) -> ComplexMatrix {
        self.basis.matrix(&state.map(|z| z.re))
    }

    /// Steps the vectorised projector and the wave function side by side
    /// for `steps` steps; returns the largest `‖ψ^t vec(P_s) - P_{U^t s}‖`.
    /// Errors when a step drifts by more than `QUANTUM_TOL`.
    pub fn verify(&self, steps: usize) -> Result<f64> {
        let mut worst: f64 = 0.0;
        let mut wave = self.wave.vec().clone();
        let mut prev = 0.0;
        for (t, state) in self.evolution.states().enumerate().take(steps + 1) {
            if t > 0 {
                wave = &self.unitary * wave;
            }
            let dev = (self.decode(&state) - &wave * wave.adjoint()).norm();
            if dev - prev > QUANTUM_TOL {
                return Err(Error::Numerical(format!(
                    "projector evolution drifted by {dev:e} at step {t}"
                )));
            }
            prev = dev;
            worst = worst.max(dev);
        }
        Ok(worst)
    }

    /// Observable `{λ ↦ tr(P_λ ·)}` over the distinct values of `m`, labelled
    /// by the value.
    pub fn measurement_observable(&self, m: &Measurement) -> Result<Observable> {
        ensure_dim(self.basis.d(), m.dim())?;
        let n = self.basis.dim();
        let k = m.values().len();
        let mut functionals = ComplexMatrix::zeros(k, n);
        for i in 0..k {
            let row = self.basis.functional(&m.value_projector(i));
            for j in 0..n {
                functionals[(i, j)] = c(row[j], 0.0);
            }
        }
        let labels = m.values().iter().map(|v| format!("{v}")).collect();
        Observable::new(labels, functionals, DISTRIBUTION_TOL)
    }

    /// Born observable `{i ↦ tr(P_{e_i} ·)}` of an orthonormal basis,
    /// labelled `1..=d`.
    pub fn born_observable(&self, basis: &[ComplexVector]) -> Result<Observable> {
        let d = self.basis.d();
        ensure_dim(d, basis.len())?;
        crate::spectral::SubspaceBasis::new(d, basis.to_vec(), QUANTUM_TOL)?;
        let n = self.basis.dim();
        let mut functionals = ComplexMatrix::zeros(d, n);
        for (i, e) in basis.iter().enumerate() {
            let row = self.basis.functional(&(e * e.adjoint()));
            for j in 0..n {
                functionals[(i, j)] = c(row[j], 0.0);
            }
        }
        let labels = (1..=d).map(|i| i.to_string()).collect();
        Observable::new(labels, functionals, DISTRIBUTION_TOL)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{stability_check, Verdict};
    use crate::markov::chain_distributions;
    use crate::spectral::{diag, real_vector, SubspaceBasis};

    fn phase() -> ComplexMatrix {
        diag(&[c(1.0, 0.0), num_complex::Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)])
    }

    #[test]
    fn identity_gives_constant_projectors() {
        let s = WaveFunction::normalized(real_vector(&[0.6, 0.8])).unwrap();
        let ev = schrodinger_evolution(&ComplexMatrix::identity(2, 2), &s).unwrap();
        for state in ev.evolution().states().take(5) {
            assert!((ev.decode(&state) - s.projector()).norm() < 1e-15);
        }
    }

    #[test]
    fn eigenvector_projector_is_constant() {
        let s = WaveFunction::new(real_vector(&[0.0, 1.0])).unwrap();
        let ev = schrodinger_evolution(&phase(), &s).unwrap();
        for state in ev.evolution().states().take(10) {
            assert!((ev.decode(&state) - s.projector()).norm() < 1e-14);
        }
        assert!(ev.verify(50).unwrap() < 1e-12);
    }

    #[test]
    fn diagonal_unitary_keeps_born_probabilities() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = WaveFunction::new(real_vector(&[h, h])).unwrap();
        let ev = schrodinger_evolution(&phase(), &s).unwrap();
        let obs = ev
            .born_observable(SubspaceBasis::standard(2).vectors())
            .unwrap();
        let series = chain_distributions(&obs, ev.evolution(), 20).unwrap();
        for row in &series.rows {
            assert!((row[0] - 0.5).abs() < 1e-14 && (row[1] - 0.5).abs() < 1e-14);
        }
        let report = stability_check(ev.evolution(), 64, 1e-8).unwrap();
        assert_eq!(report.verdict, Verdict::Stable);
    }

    #[test]
    fn rejects_non_unitary() {
        let s = WaveFunction::new(real_vector(&[1.0, 0.0])).unwrap();
        let m = ComplexMatrix::identity(2, 2) * c(1.1, 0.0);
        assert!(matches!(
            schrodinger_evolution(&m, &s),
            Err(Error::NotUnitary { .. })
        ));
    }
}
