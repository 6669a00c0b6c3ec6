use nalgebra::{DMatrix, DVector};

use crate::spectral::{c, ComplexMatrix};

/// Orthonormal basis of the real space of Hermitian `d x d` matrices under
/// `<A, B> = tr(AB)`.
///
/// Order: `E_jj` for `j = 0..d`, then `(E_jk + E_kj)/√2` for `j < k`, then
/// `i(E_jk - E_kj)/√2` for `j < k`, pairs in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermitianBasis {
    d: usize,
    pairs: Vec<(usize, usize)>,
}

impl HermitianBasis {
    pub fn new(d: usize) -> Self {
        let pairs = (0..d)
            .flat_map(|j| (j + 1..d).map(move |k| (j, k)))
            .collect();
        Self { d, pairs }
    }

    /// Side length of the matrices.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Real dimension `d²` of the vectorised space.
    pub fn dim(&self) -> usize {
        self.d * self.d
    }

    /// Coordinates `c_k = Re tr(B_k T)`; exact for Hermitian `T`, the
    /// Hermitian part otherwise.
    pub fn coordinates(&self, t: &ComplexMatrix) -> DVector<f64> {
        let d = self.d;
        let m = self.pairs.len();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut out = DVector::zeros(self.dim());
        for j in 0..d {
            out[j] = t[(j, j)].re;
        }
        for (p, &(j, k)) in self.pairs.iter().enumerate() {
            out[d + p] = r * (t[(j, k)].re + t[(k, j)].re);
            out[d + m + p] = r * (t[(j, k)].im - t[(k, j)].im);
        }
        out
    }

    /// `Σ_k c_k B_k`.
    pub fn matrix(&self, coords: &DVector<f64>) -> ComplexMatrix {
        let d = self.d;
        let m = self.pairs.len();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut out = ComplexMatrix::zeros(d, d);
        for j in 0..d {
            out[(j, j)] = c(coords[j], 0.0);
        }
        for (p, &(j, k)) in self.pairs.iter().enumerate() {
            let z = c(r * coords[d + p], r * coords[d + m + p]);
            out[(j, k)] = z;
            out[(k, j)] = z.conj();
        }
        out
    }

    /// The `k`-th basis element.
    pub fn element(&self, k: usize) -> ComplexMatrix {
        let mut e = DVector::zeros(self.dim());
        e[k] = 1.0;
        self.matrix(&e)
    }

    /// Row `r` with `tr(P T) = r · coordinates(T)` for Hermitian `P` and `T`.
    pub fn functional(&self, p: &ComplexMatrix) -> DVector<f64> {
        // tr(P B_k) = <P, B_k> = c_k(P)
        self.coordinates(p)
    }

    /// Row `r` with `tr(T) = r · coordinates(T)`.
    pub fn trace_row(&self) -> DVector<f64> {
        let mut r = DVector::zeros(self.dim());
        for j in 0..self.d {
            r[j] = 1.0;
        }
        r
    }

    /// Real matrix of the real-linear map `f` restricted to Hermitian inputs.
    pub fn superoperator<F>(&self, f: F) -> DMatrix<f64>
    where
        F: Fn(&ComplexMatrix) -> ComplexMatrix,
    {
        let n = self.dim();
        let mut out = DMatrix::zeros(n, n);
        for k in 0..n {
            let image = self.coordinates(&f(&self.element(k)));
            out.set_column(k, &image);
        }
        out
    }
}
