use nalgebra::SVD;
use num_complex::Complex64;

use super::{
    ensure_dim, ensure_square, ComplexMatrix, ComplexVector, OrderedSchur, SubspaceBasis,
    CLUSTER_TOL, DEFECT_RADIUS, DEFECT_RANK_TOL,
};
use crate::error::{Error, Result};

/// A group of numerically coincident eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenCluster {
    /// Mean of the member eigenvalues.
    pub value: Complex64,
    /// Algebraic multiplicity (number of members).
    pub multiplicity: usize,
}

/// Single-linkage clustering: two eigenvalues closer than `tol` share a
/// cluster. Clusters are returned in order of their first member.
pub fn cluster_eigenvalues(eigs: &[Complex64], tol: f64) -> Vec<(EigenCluster, Vec<usize>)> {
    let n = eigs.len();
    let mut label: Vec<Option<usize>> = vec![None; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for seed in 0..n {
        if label[seed].is_some() {
            continue;
        }
        let id = groups.len();
        label[seed] = Some(id);
        let mut members = vec![seed];
        let mut cursor = 0;
        while cursor < members.len() {
            let z = eigs[members[cursor]];
            for other in 0..n {
                if label[other].is_none() && (eigs[other] - z).norm() <= tol {
                    label[other] = Some(id);
                    members.push(other);
                }
            }
            cursor += 1;
        }
        members.sort_unstable();
        groups.push(members);
    }
    groups
        .into_iter()
        .map(|members| {
            let sum: Complex64 = members.iter().map(|&i| eigs[i]).sum();
            let cluster = EigenCluster {
                value: sum / members.len() as f64,
                multiplicity: members.len(),
            };
            (cluster, members)
        })
        .collect()
}

fn numerical_rank(m: &ComplexMatrix, threshold: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    SVD::new(m.clone(), false, false)
        .singular_values
        .iter()
        .filter(|&&s| s > threshold)
        .count()
}

/// Whether the eigenvalues of `schur` near `center` carry Jordan structure.
///
/// All eigenvalues within `DEFECT_RADIUS * max(1, ‖op‖)` of `center` are
/// moved into a leading block `T11`; with `N = T11 - center I` the cluster is
/// defective when `rank(N) != rank(N^2)`.
pub fn is_defective_near(schur: &OrderedSchur, center: Complex64) -> bool {
    let scale = schur.t().norm().max(1.0);
    let radius = DEFECT_RADIUS * scale;
    let mut work = schur.clone();
    let k = work.reorder(|z| (z - center).norm() <= radius);
    if k < 2 {
        return false;
    }
    let shift = ComplexMatrix::identity(k, k) * center;
    let nil = work.leading_block(k) - shift;
    let threshold = DEFECT_RANK_TOL * scale;
    numerical_rank(&nil, threshold) != numerical_rank(&(&nil * &nil), threshold)
}

/// Spectral projector onto the eigenspace of the eigenvalue cluster at
/// `lambda`, along the complementary invariant subspace.
///
/// Returns the zero matrix when no eigenvalue lies within `cluster_tol` of
/// `lambda`.
pub fn spectral_projector(
    op: &ComplexMatrix,
    lambda: Complex64,
    cluster_tol: f64,
) -> Result<ComplexMatrix> {
    let n = ensure_square(op)?;
    let schur = OrderedSchur::new(op)?;
    let eigs = schur.eigenvalues();
    let Some((cluster, members)) = cluster_eigenvalues(&eigs, cluster_tol)
        .into_iter()
        .find(|(_, members)| members.iter().any(|&i| (eigs[i] - lambda).norm() <= cluster_tol))
    else {
        return Ok(ComplexMatrix::zeros(n, n));
    };
    if is_defective_near(&schur, cluster.value) {
        return Err(Error::DefectiveEigenvalue {
            re: cluster.value.re,
            im: cluster.value.im,
        });
    }
    let mut work = schur;
    let in_cluster: Vec<Complex64> = members.iter().map(|&i| eigs[i]).collect();
    let k = work.reorder(|z| in_cluster.contains(&z));
    Ok(work.leading_projector(k))
}

/// Splitting `C^n = N ⊕ W` into the invariant subspace of eigenvalues with
/// modulus at least `1 - band_tol` (generalised eigenvectors included) and
/// the invariant complement carrying the strictly smaller ones.
#[derive(Debug, Clone)]
pub struct RieszSplit {
    pub big_eigenvalues: Vec<EigenCluster>,
    pub n_basis: SubspaceBasis,
    /// Projector onto `N` along `W`.
    pub n_projector: ComplexMatrix,
    /// Projector onto `W` along `N`.
    pub w_projector: ComplexMatrix,
    pub s_n: ComplexVector,
    pub s_w: ComplexVector,
    /// Spectral radius of the operator restricted to `W` (0 when `W = {0}`).
    pub w_spectral_radius: f64,
    pub band_tol: f64,
}

impl RieszSplit {
    pub fn cut(&self) -> f64 {
        1.0 - self.band_tol
    }
}

pub fn spectral_split(op: &ComplexMatrix, s: &ComplexVector, band_tol: f64) -> Result<RieszSplit> {
    let n = ensure_square(op)?;
    ensure_dim(n, s.len())?;
    if band_tol.is_nan() || band_tol <= 0.0 {
        return Err(Error::Numerical(format!("band_tol must be positive, got {band_tol}")));
    }
    let cut = 1.0 - band_tol;
    let mut schur = OrderedSchur::new(op)?;
    let eigs = schur.eigenvalues();
    let clusters = cluster_eigenvalues(&eigs, CLUSTER_TOL);
    for (_, members) in &clusters {
        let moduli: Vec<f64> = members.iter().map(|&i| eigs[i].norm()).collect();
        let low = moduli.iter().copied().fold(f64::INFINITY, f64::min);
        let high = moduli.iter().copied().fold(0.0, f64::max);
        if low < cut && high >= cut {
            return Err(Error::BandAmbiguity { cut, low, high });
        }
    }
    let big_eigenvalues = clusters
        .iter()
        .filter(|(cl, _)| cl.value.norm() >= cut)
        .map(|(cl, _)| cl.clone())
        .collect();
    let w_spectral_radius = eigs
        .iter()
        .map(|z| z.norm())
        .filter(|&m| m < cut)
        .fold(0.0, f64::max);

    let k = schur.reorder(|z| z.norm() >= cut);
    let n_projector = schur.leading_projector(k);
    let w_projector = ComplexMatrix::identity(n, n) - &n_projector;
    let n_basis = SubspaceBasis::new_unchecked(n, schur.leading_vectors(k), CLUSTER_TOL);
    let s_n = &n_projector * s;
    let s_w = s - &s_n;
    Ok(RieszSplit {
        big_eigenvalues,
        n_basis,
        n_projector,
        w_projector,
        s_n,
        s_w,
        w_spectral_radius,
        band_tol,
    })
}
