use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{
    c, ensure_dim, ensure_finite_matrix, ensure_finite_vector, ensure_square, hermitian_defect,
    hermitian_eigen, rank_one_projector, ComplexMatrix, ComplexVector, SubspaceBasis,
};

/// Tolerance for unit norms, unit traces, Hermiticity and orthonormality.
pub const QUANTUM_TOL: f64 = 1e-10;
/// Largest accepted error of the spectral reconstruction `Σ λ_i P_{e_i}`.
const RECONSTRUCTION_TOL: f64 = 1e-8;

/// Unit vector `s` of a finite-dimensional Hilbert space.
#[derive(Debug, Clone)]
pub struct WaveFunction {
    vec: ComplexVector,
}

impl WaveFunction {
    pub fn new(vec: ComplexVector) -> Result<Self> {
        ensure_finite_vector(&vec, "wave function")?;
        let norm = vec.norm();
        if (norm - 1.0).abs() > QUANTUM_TOL {
            return Err(Error::InvalidState(format!(
                "wave function has norm {norm}, expected 1"
            )));
        }
        Ok(Self { vec })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(vec: ComplexVector) -> Result<Self> {
        ensure_finite_vector(&vec, "wave function")?;
        let norm = vec.norm();
        if norm == 0.0 {
            return Err(Error::ZeroStart);
        }
        Ok(Self {
            vec: vec.unscale(norm),
        })
    }

    pub fn vec(&self) -> &ComplexVector {
        &self.vec
    }

    pub fn dim(&self) -> usize {
        self.vec.len()
    }

    /// The rank-one projector `P_s = |s><s|`.
    pub fn projector(&self) -> ComplexMatrix {
        &self.vec * self.vec.adjoint()
    }
}

/// Hermitian operator with its spectral resolution `M = Σ λ_i P_{e_i}`.
#[derive(Debug, Clone)]
pub struct Measurement {
    matrix: ComplexMatrix,
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<ComplexVector>,
    values: Vec<f64>,
    groups: Vec<Vec<usize>>,
}

impl Measurement {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        ensure_square(&matrix)?;
        ensure_finite_matrix(&matrix, "measurement")?;
        let deviation = hermitian_defect(&matrix);
        if deviation > QUANTUM_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let (eigenvalues, eigenvectors) = hermitian_eigen(&matrix);
        let scale = eigenvalues.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (i, &v) in eigenvalues.iter().enumerate() {
            match groups.last_mut() {
                Some(g) if v - eigenvalues[*g.last().unwrap()] <= 1e-8 * scale => g.push(i),
                _ => groups.push(vec![i]),
            }
        }
        let values = groups
            .iter()
            .map(|g| g.iter().map(|&i| eigenvalues[i]).sum::<f64>() / g.len() as f64)
            .collect();
        let m = Self {
            matrix,
            eigenvalues,
            eigenvectors,
            values,
            groups,
        };
        let err = (m.reconstruct() - &m.matrix).norm();
        if err > RECONSTRUCTION_TOL * scale {
            return Err(Error::Numerical(format!(
                "spectral reconstruction error {err:e}"
            )));
        }
        Ok(m)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Eigenvalues `λ_i`, ascending, with multiplicity.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors `e_i`, aligned with [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &[ComplexVector] {
        &self.eigenvectors
    }

    /// Distinct values `Λ`, ascending.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Eigen-indices `i` with `λ_i = values()[k]`.
    pub fn group(&self, k: usize) -> &[usize] {
        &self.groups[k]
    }

    /// Spectral projector onto the eigenspace of `values()[k]`.
    pub fn value_projector(&self, k: usize) -> ComplexMatrix {
        let n = self.dim();
        self.groups[k]
            .iter()
            .fold(ComplexMatrix::zeros(n, n), |acc, &i| {
                acc + rank_one_projector(&self.eigenvectors[i])
            })
    }

    fn reconstruct(&self) -> ComplexMatrix {
        let n = self.dim();
        self.eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .fold(ComplexMatrix::zeros(n, n), |acc, (&l, e)| {
                acc + e * e.adjoint() * c(l, 0.0)
            })
    }
}

/// Hermitian unit-trace operator; negative eigenvalues are allowed and flagged.
#[derive(Debug, Clone)]
pub struct GeneralizedDensity {
    matrix: ComplexMatrix,
    psd: bool,
    min_eigenvalue: f64,
}

impl GeneralizedDensity {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        ensure_square(&matrix)?;
        ensure_finite_matrix(&matrix, "density")?;
        let deviation = hermitian_defect(&matrix);
        if deviation > QUANTUM_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > QUANTUM_TOL {
            return Err(Error::InvalidState(format!(
                "density has trace {trace}, expected 1"
            )));
        }
        let (values, _) = hermitian_eigen(&matrix);
        let min_eigenvalue = values.first().copied().unwrap_or(0.0);
        Ok(Self {
            matrix,
            psd: min_eigenvalue >= -QUANTUM_TOL,
            min_eigenvalue,
        })
    }

    pub fn from_wave(s: &WaveFunction) -> Self {
        Self {
            matrix: s.projector(),
            psd: true,
            min_eigenvalue: 0.0,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// True when every eigenvalue is at least `-QUANTUM_TOL`.
    pub fn is_psd(&self) -> bool {
        self.psd
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }
}

/// Born probabilities `p_i = |<s|e_i>|²` in a complete orthonormal basis.
pub fn born_probabilities(s: &WaveFunction, basis: &[ComplexVector]) -> Result<Vec<f64>> {
    ensure_dim(s.dim(), basis.len())?;
    let basis = SubspaceBasis::new(s.dim(), basis.to_vec(), QUANTUM_TOL)?;
    Ok(basis
        .vectors()
        .iter()
        .map(|e| e.dotc(s.vec()).norm_sqr())
        .collect())
}

/// `τ_s(T) = <Ts|s>`.
pub fn trace_functional(s: &WaveFunction, t: &ComplexMatrix) -> Result<Complex64> {
    ensure_dim(s.dim(), ensure_square(t)?)?;
    Ok(s.vec().dotc(&(t * s.vec())))
}

/// Pure or generalized mixed state.
#[derive(Debug, Clone, Copy)]
pub enum QuantumState<'a> {
    Wave(&'a WaveFunction),
    Density(&'a GeneralizedDensity),
}

impl<'a> From<&'a WaveFunction> for QuantumState<'a> {
    fn from(s: &'a WaveFunction) -> Self {
        QuantumState::Wave(s)
    }
}

impl<'a> From<&'a GeneralizedDensity> for QuantumState<'a> {
    fn from(d: &'a GeneralizedDensity) -> Self {
        QuantumState::Density(d)
    }
}

/// Expected value of a measurement with the induced law over `Λ`.
#[derive(Debug, Clone, Serialize)]
pub struct Expectation {
    pub value: f64,
    /// Distinct values `Λ`, ascending.
    pub values: Vec<f64>,
    /// `Pr{X = λ}` aligned with `values`; may be negative for a non-PSD density.
    pub probabilities: Vec<f64>,
}

/// `E_M` of a wave function via `Σ λ_i τ_s P_{e_i}` or of a density via `tr(MD)`.
pub fn measurement_expectation<'a>(
    m: &Measurement,
    state: impl Into<QuantumState<'a>>,
) -> Result<Expectation> {
    let state = state.into();
    let weights: Vec<f64> = match state {
        QuantumState::Wave(s) => {
            ensure_dim(m.dim(), s.dim())?;
            m.eigenvectors
                .iter()
                .map(|e| e.dotc(s.vec()).norm_sqr())
                .collect()
        }
        QuantumState::Density(d) => {
            ensure_dim(m.dim(), d.dim())?;
            m.eigenvectors
                .iter()
                .map(|e| e.dotc(&(d.matrix() * e)).re)
                .collect()
        }
    };
    let value = match state {
        QuantumState::Wave(_) => m.eigenvalues.iter().zip(&weights).map(|(l, w)| l * w).sum(),
        QuantumState::Density(d) => (m.matrix() * d.matrix()).trace().re,
    };
    let probabilities = m
        .groups
        .iter()
        .map(|g| g.iter().map(|&i| weights[i]).sum())
        .collect();
    Ok(Expectation {
        value,
        values: m.values.clone(),
        probabilities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{real_diag, real_vector};

    fn h() -> f64 {
        std::f64::consts::FRAC_1_SQRT_2
    }

    #[test]
    fn born_examples() {
        let std2 = SubspaceBasis::standard(2).vectors().to_vec();
        let e1 = WaveFunction::new(real_vector(&[1.0, 0.0])).unwrap();
        assert_eq!(born_probabilities(&e1, &std2).unwrap(), vec![1.0, 0.0]);
        let plus = WaveFunction::new(real_vector(&[h(), h()])).unwrap();
        let p = born_probabilities(&plus, &std2).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
        let skew = vec![
            real_vector(&[1.0, 0.0]),
            real_vector(&[0.1, (1.0f64 - 0.01).sqrt()]),
        ];
        assert!(matches!(
            born_probabilities(&plus, &skew),
            Err(Error::NotOrthonormal { .. })
        ));
    }

    #[test]
    fn trace_functional_examples() {
        let s = WaveFunction::new(real_vector(&[h(), h()])).unwrap();
        assert!((trace_functional(&s, &s.projector()).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let id = ComplexMatrix::identity(2, 2);
        assert!((trace_functional(&s, &id).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let e1 = WaveFunction::new(real_vector(&[1.0, 0.0])).unwrap();
        assert_eq!(trace_functional(&e1, &real_diag(&[3.0, 7.0])).unwrap(), c(3.0, 0.0));
        assert!(matches!(
            trace_functional(&e1, &ComplexMatrix::identity(3, 3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn expectation_examples() {
        let z = Measurement::new(real_diag(&[1.0, -1.0])).unwrap();
        let plus = WaveFunction::new(real_vector(&[h(), h()])).unwrap();
        let e = measurement_expectation(&z, &plus).unwrap();
        assert!(e.value.abs() < 1e-15);
        assert_eq!(e.values, vec![-1.0, 1.0]);

        let ax = Measurement::new(real_diag(&[-1.0, 1.0, -1.0, -1.0, -1.0])).unwrap();
        let third = 1.0 / 3.0;
        let d = GeneralizedDensity::new(real_diag(&[-third, third, third, third, third])).unwrap();
        assert!(!d.is_psd());
        let e = measurement_expectation(&ax, &d).unwrap();
        assert!((e.value + third).abs() < 1e-15);
        assert!((e.probabilities[0] - 2.0 * third).abs() < 1e-15);
        assert!((e.probabilities[1] - third).abs() < 1e-15);

        let id = Measurement::new(ComplexMatrix::identity(2, 2)).unwrap();
        assert!((measurement_expectation(&id, &plus).unwrap().value - 1.0).abs() < 1e-15);
        assert_eq!(id.values().len(), 1);
    }

    #[test]
    fn wave_and_density_paths_agree() {
        let m = Measurement::new(ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(0.3, 0.0), c(0.2, -0.7), c(0.2, 0.7), c(-1.1, 0.0)],
        ))
        .unwrap();
        let s = WaveFunction::normalized(ComplexVector::from_vec(vec![c(0.4, 0.1), c(-0.3, 0.8)]))
            .unwrap();
        let a = measurement_expectation(&m, &s).unwrap();
        let b = measurement_expectation(&m, &GeneralizedDensity::from_wave(&s)).unwrap();
        assert!((a.value - b.value).abs() < 1e-12);
    }

    #[test]
    fn rejects_invalid_inputs() {
        assert!(WaveFunction::new(real_vector(&[1.0, 1.0])).is_err());
        let skew = ComplexMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(Measurement::new(skew), Err(Error::NotHermitian { .. })));
        assert!(GeneralizedDensity::new(real_diag(&[0.5, 0.6])).is_err());
    }
}
