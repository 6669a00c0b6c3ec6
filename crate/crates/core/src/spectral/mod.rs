//! Dense complex linear algebra: evolution (Krylov) spaces, ordered Schur
//! forms, spectral projectors, invariant splittings and common eigenbases.
//!
//! Eigenvalue computations go through nalgebra's complex Schur
//! decomposition. Everything above that (reordering, block
//! diagonalisation, clustering, defect detection) lives here.

mod eigenbasis;
mod krylov;
mod schur;
mod split;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub use eigenbasis::{common_eigenbasis, hermitian_eigen};
pub use krylov::{krylov_span, krylov_subspace};
pub use schur::OrderedSchur;
pub use split::{
    cluster_eigenvalues, is_defective_near, spectral_projector, spectral_split, EigenCluster,
    RieszSplit,
};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Eigenvalues within this absolute distance form one cluster.
pub const CLUSTER_TOL: f64 = 1e-8;
/// Default width of the band below modulus one used by [`spectral_split`].
pub const BAND_TOL: f64 = 1e-8;
/// Relative rank tolerance for Krylov saturation.
pub const RANK_TOL: f64 = 1e-10;
/// Eigenvalues this close to a cluster centre (relative to `max(1, ‖op‖)`)
/// are inspected together for Jordan structure, since a defective
/// eigenvalue splits into a small ring under rounding.
pub const DEFECT_RADIUS: f64 = 1e-4;
/// Singular value threshold (relative to `max(1, ‖op‖)`) for the numerical
/// ranks compared by the defect test.
pub const DEFECT_RANK_TOL: f64 = 1e-3;

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Complex vector from real entries.
pub fn real_vector(entries: &[f64]) -> ComplexVector {
    ComplexVector::from_iterator(entries.len(), entries.iter().map(|&x| c(x, 0.0)))
}

/// Complex matrix from real entries in row-major order.
pub fn real_matrix(rows: usize, cols: usize, entries: &[f64]) -> ComplexMatrix {
    assert_eq!(entries.len(), rows * cols, "entry count does not match shape");
    ComplexMatrix::from_row_iterator(rows, cols, entries.iter().map(|&x| c(x, 0.0)))
}

/// Diagonal matrix with the given complex diagonal.
pub fn diag(entries: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&ComplexVector::from_column_slice(entries))
}

pub fn real_diag(entries: &[f64]) -> ComplexMatrix {
    diag(&entries.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>())
}

pub(crate) fn ensure_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub(crate) fn ensure_finite_matrix(m: &ComplexMatrix, what: &'static str) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { what })
    }
}

pub(crate) fn ensure_finite_vector(v: &ComplexVector, what: &'static str) -> Result<()> {
    if v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { what })
    }
}

pub(crate) fn ensure_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Frobenius distance between `m` and its conjugate transpose.
pub fn hermitian_defect(m: &ComplexMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

/// Frobenius norm of `ab - ba`.
pub fn commutator_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a * b - b * a).norm()
}

/// Frobenius distance of `u u*` from the identity.
pub fn unitary_defect(u: &ComplexMatrix) -> f64 {
    let n = u.nrows();
    (u * u.adjoint() - ComplexMatrix::identity(n, n)).norm()
}

/// Rank-one orthogonal projector `|v><v| / <v|v>`.
pub fn rank_one_projector(v: &ComplexVector) -> ComplexMatrix {
    let nsq = v.norm_squared();
    v * v.adjoint() / c(nsq, 0.0)
}

/// Orthonormal list of vectors spanning a subspace of `C^n`.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    ambient_dim: usize,
    vectors: Vec<ComplexVector>,
    tol: f64,
}

impl SubspaceBasis {
    /// Wraps `vectors`, rejecting lists that are not orthonormal within `tol`.
    pub fn new(ambient_dim: usize, vectors: Vec<ComplexVector>, tol: f64) -> Result<Self> {
        for v in &vectors {
            ensure_dim(ambient_dim, v.len())?;
        }
        let basis = Self {
            ambient_dim,
            vectors,
            tol,
        };
        let deviation = basis.orthonormality_defect();
        if deviation > tol {
            return Err(Error::NotOrthonormal { deviation });
        }
        Ok(basis)
    }

    pub(crate) fn new_unchecked(ambient_dim: usize, vectors: Vec<ComplexVector>, tol: f64) -> Self {
        Self {
            ambient_dim,
            vectors,
            tol,
        }
    }

    pub fn standard(n: usize) -> Self {
        let vectors = (0..n)
            .map(|i| {
                let mut e = ComplexVector::zeros(n);
                e[i] = c(1.0, 0.0);
                e
            })
            .collect();
        Self::new_unchecked(n, vectors, 0.0)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[ComplexVector] {
        &self.vectors
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// The basis vectors as the columns of an `n x k` matrix.
    pub fn matrix(&self) -> ComplexMatrix {
        if self.vectors.is_empty() {
            return ComplexMatrix::zeros(self.ambient_dim, 0);
        }
        ComplexMatrix::from_columns(&self.vectors)
    }

    /// Coordinates of `v` with respect to the basis (`Q* v`).
    pub fn coordinates(&self, v: &ComplexVector) -> ComplexVector {
        ComplexVector::from_iterator(self.dim(), self.vectors.iter().map(|q| q.dotc(v)))
    }

    /// Orthogonal projection of `v` onto the span.
    pub fn project(&self, v: &ComplexVector) -> ComplexVector {
        let mut out = ComplexVector::zeros(self.ambient_dim);
        for q in &self.vectors {
            out += q * q.dotc(v);
        }
        out
    }

    /// Compression `Q* op Q` of `op` to the span.
    pub fn restrict(&self, op: &ComplexMatrix) -> ComplexMatrix {
        let q = self.matrix();
        q.adjoint() * op * &q
    }

    /// Frobenius norm of `(I - QQ*) op Q`; zero iff the span is `op`-invariant.
    pub fn invariance_residual(&self, op: &ComplexMatrix) -> f64 {
        let q = self.matrix();
        let image = op * &q;
        (&image - &q * (q.adjoint() * &image)).norm()
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.dotc(b) - c(target, 0.0)).norm());
            }
        }
        worst
    }
}
