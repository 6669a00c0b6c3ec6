use nalgebra::SymmetricEigen;

use super::{
    commutator_norm, ensure_dim, ensure_square, hermitian_defect, ComplexMatrix, ComplexVector,
    SubspaceBasis,
};
use crate::error::{Error, Result};

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(a: &ComplexMatrix) -> (Vec<f64>, Vec<ComplexVector>) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    // symmetrise so rounding-level asymmetry does not leak into the solver
    let sym = (a + a.adjoint()) * num_complex::Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).into_owned())
        .collect();
    (values, vectors)
}

/// Groups ascending eigenvalues into runs whose neighbours differ by at most `tol`.
fn runs(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > tol {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// Orthonormal basis diagonalising both Hermitian matrices, if they commute.
///
/// Diagonalises `a`, then diagonalises the compression of `b` to each
/// eigenspace of `a`. Returns `Ok(None)` when `‖ab - ba‖ > tol`.
pub fn common_eigenbasis(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    tol: f64,
) -> Result<Option<SubspaceBasis>> {
    let n = ensure_square(a)?;
    ensure_dim(n, ensure_square(b)?)?;
    for m in [a, b] {
        let deviation = hermitian_defect(m);
        if deviation > tol {
            return Err(Error::NotHermitian { deviation });
        }
    }
    if commutator_norm(a, b) > tol {
        return Ok(None);
    }
    let (values, vectors) = hermitian_eigen(a);
    let scale = a.norm().max(1.0);
    let mut basis = Vec::with_capacity(n);
    for run in runs(&values, 1e-8 * scale) {
        let block = ComplexMatrix::from_columns(&vectors[run.clone()]);
        if run.len() == 1 {
            basis.push(vectors[run.start].clone());
            continue;
        }
        let compressed = block.adjoint() * b * &block;
        let (_, inner) = hermitian_eigen(&compressed);
        for w in inner {
            let mut g = &block * w;
            let len = g.norm();
            g.unscale_mut(len);
            basis.push(g);
        }
    }
    Ok(Some(SubspaceBasis::new_unchecked(n, basis, tol)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{c, real_diag, real_matrix};

    fn diagonal_in(basis: &SubspaceBasis, m: &ComplexMatrix) -> f64 {
        let q = basis.matrix();
        let d = q.adjoint() * m * &q;
        let mut off: f64 = 0.0;
        for i in 0..d.nrows() {
            for j in 0..d.ncols() {
                if i != j {
                    off = off.max(d[(i, j)].norm());
                }
            }
        }
        off
    }

    #[test]
    fn anticommuting_paulis_have_no_common_basis() {
        let x = real_matrix(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let z = real_diag(&[1.0, -1.0]);
        assert!(common_eigenbasis(&x, &z, 1e-10).unwrap().is_none());
    }

    #[test]
    fn identity_defers_to_second_matrix() {
        let id = ComplexMatrix::identity(2, 2);
        let x = real_matrix(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let g = common_eigenbasis(&id, &x, 1e-10).unwrap().unwrap();
        assert_eq!(g.dim(), 2);
        assert!(diagonal_in(&g, &x) < 1e-12);
        assert!(g.orthonormality_defect() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let err = common_eigenbasis(&a, &a, 1e-10).unwrap_err();
        assert!(matches!(err, Error::NotHermitian { .. }));
    }

    #[test]
    fn degenerate_first_matrix_is_refined_by_second() {
        let a = real_diag(&[1.0, 1.0, 2.0]);
        let mut b = real_diag(&[0.0, 0.0, 5.0]);
        b[(0, 1)] = c(0.0, 1.0);
        b[(1, 0)] = c(0.0, -1.0);
        let g = common_eigenbasis(&a, &b, 1e-10).unwrap().unwrap();
        assert!(diagonal_in(&g, &a) < 1e-12);
        assert!(diagonal_in(&g, &b) < 1e-12);
    }
}
