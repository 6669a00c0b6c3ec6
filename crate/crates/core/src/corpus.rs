//! Seeded random instances for property suites, demos and randomized scenarios.
//!
//! Every generator draws from a [`ChaCha8Rng`] built by [`rng`], so a `u64`
//! seed reproduces an instance exactly across platforms.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::markov::ProcessModel;
use crate::quantum::{conjugation_channel, GudderWalk, HermitianBasis};
use crate::spectral::{c, diag, ComplexMatrix, ComplexVector, SubspaceBasis};

pub type CorpusRng = ChaCha8Rng;

pub fn rng(seed: u64) -> CorpusRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut CorpusRng) -> f64 {
    rng.sample(StandardNormal)
}

fn complex_gaussian(rng: &mut CorpusRng) -> Complex64 {
    c(gaussian(rng), gaussian(rng))
}

pub fn gaussian_matrix(rng: &mut CorpusRng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn gaussian_vector(rng: &mut CorpusRng, n: usize) -> ComplexVector {
    ComplexVector::from_fn(n, |_, _| complex_gaussian(rng))
}

/// Random probability vector; each entry is zeroed with probability
/// `sparsity` (at least one entry survives).
pub fn random_distribution(rng: &mut CorpusRng, n: usize, sparsity: f64) -> Vec<f64> {
    let keep = rng.random_range(0..n);
    let mut v: Vec<f64> = (0..n)
        .map(|i| {
            if i != keep && rng.random::<f64>() < sparsity {
                0.0
            } else {
                rng.random::<f64>() + 1e-3
            }
        })
        .collect();
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
    v
}

/// Column-stochastic matrix with independently drawn sparse columns.
pub fn random_stochastic(rng: &mut CorpusRng, n: usize, sparsity: f64) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        let col = random_distribution(rng, n, sparsity);
        for i in 0..n {
            m[(i, j)] = col[i];
        }
    }
    m
}

/// Haar-distributed unitary from the QR factorisation of a Gaussian matrix.
pub fn random_unitary(rng: &mut CorpusRng, n: usize) -> ComplexMatrix {
    let qr = gaussian_matrix(rng, n, n).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        let col = q.column(j) * phase;
        q.set_column(j, &col);
    }
    q
}

/// Unitary `Q diag(1, ..., 1, e^{iθ_j}) Q*` whose fixed space is spanned by
/// the first `fixed` columns of `Q`; every other phase keeps `|θ| ≥ 0.05`.
pub fn unitary_with_fixed_subspace(
    rng: &mut CorpusRng,
    n: usize,
    fixed: usize,
) -> (ComplexMatrix, SubspaceBasis) {
    let q = random_unitary(rng, n);
    let tau = std::f64::consts::TAU;
    let phases: Vec<Complex64> = (0..n)
        .map(|j| {
            if j < fixed {
                c(1.0, 0.0)
            } else {
                Complex64::from_polar(1.0, rng.random_range(0.05..tau - 0.05))
            }
        })
        .collect();
    let u = &q * diag(&phases) * q.adjoint();
    let vectors = (0..fixed).map(|j| q.column(j).into_owned()).collect();
    let basis = SubspaceBasis::new(n, vectors, 1e-10).expect("columns of a unitary");
    (u, basis)
}

/// Well-conditioned eigenvector matrix `Q (I + 0.25 G/‖G‖)`, condition
/// number at most 5/3.
fn eigenvector_matrix(rng: &mut CorpusRng, n: usize) -> ComplexMatrix {
    let q = random_unitary(rng, n);
    let g = gaussian_matrix(rng, n, n);
    let g = &g / c(g.norm() / 0.25, 0.0);
    q * (ComplexMatrix::identity(n, n) + g)
}

/// Diagonalisable operator with `big` unimodular eigenvalues and `n - big`
/// eigenvalues of modulus at most `w_max`.
pub fn split_spectrum_operator(
    rng: &mut CorpusRng,
    n: usize,
    big: usize,
    w_max: f64,
) -> ComplexMatrix {
    let tau = std::f64::consts::TAU;
    let eigs: Vec<Complex64> = (0..n)
        .map(|j| {
            let theta = rng.random_range(0.0..tau);
            let r = if j < big { 1.0 } else { rng.random_range(0.0..w_max) };
            Complex64::from_polar(r, theta)
        })
        .collect();
    let v = eigenvector_matrix(rng, n);
    let v_inv = v.clone().try_inverse().expect("well-conditioned");
    v * diag(&eigs) * v_inv
}

/// Where a sampling-corpus eigenvalue lies relative to the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    Inside,
    On,
    Outside,
}

/// Operator for the sampling corpus plus the eigenvalue layout it was built
/// from. Moduli are in `[0, 0.95]`, exactly 1, or in `[1.05, 1.4]`; with
/// probability 0.2 a unimodular eigenvalue carries a 2x2 Jordan block.
#[derive(Debug, Clone)]
pub struct SamplingInstance {
    pub op: ComplexMatrix,
    pub start: ComplexVector,
    pub sampler: ComplexMatrix,
    pub bands: Vec<Band>,
    pub jordan_on_circle: bool,
}

pub fn sampling_instance(rng: &mut CorpusRng, max_dim: usize) -> SamplingInstance {
    let n = rng.random_range(2..=max_dim);
    let tau = std::f64::consts::TAU;
    let mut j = ComplexMatrix::zeros(n, n);
    let mut bands = Vec::with_capacity(n);
    for i in 0..n {
        let band = match rng.random_range(0..3) {
            0 => Band::Inside,
            1 => Band::On,
            _ => Band::Outside,
        };
        let r = match band {
            Band::Inside => rng.random_range(0.0..0.95),
            Band::On => 1.0,
            Band::Outside => rng.random_range(1.05..1.4),
        };
        // occasionally pin a unit eigenvalue at 1 so limits can be nonzero
        let theta = if band == Band::On && rng.random::<f64>() < 0.3 {
            0.0
        } else {
            rng.random_range(0.0..tau)
        };
        j[(i, i)] = Complex64::from_polar(r, theta);
        bands.push(band);
    }
    let mut jordan_on_circle = false;
    if n >= 2 && rng.random::<f64>() < 0.2 {
        j[(1, 1)] = j[(0, 0)] / j[(0, 0)].norm().max(1e-300);
        j[(0, 0)] = j[(1, 1)];
        j[(0, 1)] = c(1.0, 0.0);
        bands[0] = Band::On;
        bands[1] = Band::On;
        jordan_on_circle = true;
    }
    let v = eigenvector_matrix(rng, n);
    let v_inv = v.clone().try_inverse().expect("well-conditioned");
    let op = &v * j * v_inv;
    let k = rng.random_range(1..=2);
    SamplingInstance {
        op,
        start: gaussian_vector(rng, n),
        sampler: gaussian_matrix(rng, k, n),
        bands,
        jordan_on_circle,
    }
}

/// Binary hidden-Markov process of dimension `n`, optionally presented in a
/// random non-positive basis `T_a ↦ S T_a S^{-1}`.
pub fn random_process_model(rng: &mut CorpusRng, n: usize, scramble: bool) -> ProcessModel {
    let m = random_stochastic(rng, n, 0.3);
    let emit: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let t0 = &m * DMatrix::from_diagonal(&DVector::from_vec(emit.clone()));
    let t1 = &m * DMatrix::from_diagonal(&DVector::from_iterator(n, emit.iter().map(|e| 1.0 - e)));
    let mut x = DVector::from_vec(random_distribution(rng, n, 0.0));
    let mut sigma = DVector::from_element(n, 1.0);
    let mut ops = vec![t0, t1];
    if scramble {
        let s = DMatrix::identity(n, n) + DMatrix::from_fn(n, n, |_, _| 0.2 * gaussian(rng) / n as f64);
        if let Some(s_inv) = s.clone().try_inverse() {
            ops = ops.iter().map(|t| &s * t * &s_inv).collect();
            x = &s * x;
            sigma = s_inv.transpose() * sigma;
        }
    }
    ProcessModel::new(vec!["0".into(), "1".into()], ops, x, sigma)
        .expect("hidden-Markov models are valid")
}

/// Random PSD `d x d` matrix with trace `weight`.
pub fn random_density(rng: &mut CorpusRng, d: usize, weight: f64) -> ComplexMatrix {
    let g = gaussian_matrix(rng, d, d);
    let p = &g * g.adjoint();
    let tr = p.trace().re;
    p * c(weight / tr, 0.0)
}

/// Walk with channels `ε_ij(ρ) = M_ij U_ij ρ U_ij*` for a random
/// column-stochastic `M` and random unitaries, started from random site
/// states with total trace 1.
pub fn random_gudder_walk(rng: &mut CorpusRng, n: usize, d: usize) -> GudderWalk {
    let basis = HermitianBasis::new(d);
    let m = random_stochastic(rng, n, 0.3);
    let channels = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let u = random_unitary(rng, d);
                    conjugation_channel(&basis, &u, m[(i, j)])
                })
                .collect()
        })
        .collect();
    let weights = random_distribution(rng, n, 0.3);
    let state = weights
        .iter()
        .map(|&w| random_density(rng, d, w))
        .collect();
    GudderWalk::new(d, channels, state).expect("conjugation channels are valid")
}

/// Two Hermitian matrices diagonal in one random unitary basis, with small
/// integer eigenvalues so that degeneracies occur.
pub fn commuting_pair(rng: &mut CorpusRng, n: usize) -> (ComplexMatrix, ComplexMatrix) {
    let q = random_unitary(rng, n);
    let mut draw = || -> Vec<Complex64> {
        (0..n)
            .map(|_| c(rng.random_range(-2..=2) as f64, 0.0))
            .collect()
    };
    let a = diag(&draw());
    let b = diag(&draw());
    let a = &q * a * q.adjoint();
    let b = &q * b * q.adjoint();
    // exact Hermitian symmetry after rounding
    let half = c(0.5, 0.0);
    ((&a + a.adjoint()) * half, (&b + b.adjoint()) * half)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::unitary_defect;

    #[test]
    fn generators_are_reproducible() {
        let a = random_stochastic(&mut rng(7), 5, 0.5);
        let b = random_stochastic(&mut rng(7), 5, 0.5);
        assert_eq!(a, b);
        for j in 0..5 {
            assert!((a.column(j).sum() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn unitary_generators_are_unitary() {
        let mut r = rng(1);
        assert!(unitary_defect(&random_unitary(&mut r, 6)) < 1e-12);
        let (u, fixed) = unitary_with_fixed_subspace(&mut r, 6, 2);
        assert!(unitary_defect(&u) < 1e-12);
        for v in fixed.vectors() {
            assert!((&u * v - v).norm() < 1e-12);
        }
    }

    #[test]
    fn split_operator_has_requested_spectrum() {
        let op = split_spectrum_operator(&mut rng(3), 8, 3, 0.9);
        let schur = crate::spectral::OrderedSchur::new(&op).unwrap();
        let mut moduli: Vec<f64> = schur.eigenvalues().iter().map(|z| z.norm()).collect();
        moduli.sort_by(f64::total_cmp);
        assert!(moduli[4] <= 0.9 + 1e-9);
        assert!(moduli[5..].iter().all(|m| (m - 1.0).abs() < 1e-9));
    }
}
