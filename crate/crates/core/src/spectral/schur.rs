use nalgebra::Schur;
use num_complex::Complex64;

use super::{c, ensure_finite_matrix, ensure_square, ComplexMatrix, ComplexVector};
use crate::error::{Error, Result};

/// Complex Schur form `op = Q T Q*` whose diagonal can be reordered.
#[derive(Debug, Clone)]
pub struct OrderedSchur {
    q: ComplexMatrix,
    t: ComplexMatrix,
}

impl OrderedSchur {
    pub fn new(op: &ComplexMatrix) -> Result<Self> {
        let n = ensure_square(op)?;
        ensure_finite_matrix(op, "operator")?;
        if n == 0 {
            return Ok(Self {
                q: ComplexMatrix::zeros(0, 0),
                t: ComplexMatrix::zeros(0, 0),
            });
        }
        let schur = Schur::try_new(op.clone(), f64::EPSILON, 1000 * n.max(10))
            .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
        let (q, mut t) = schur.unpack();
        for j in 0..n {
            for i in (j + 1)..n {
                t[(i, j)] = c(0.0, 0.0);
            }
        }
        Ok(Self { q, t })
    }

    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    pub fn q(&self) -> &ComplexMatrix {
        &self.q
    }

    pub fn t(&self) -> &ComplexMatrix {
        &self.t
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.t[(i, i)]).collect()
    }

    /// Exchanges the diagonal entries at `k` and `k + 1` by a unitary
    /// rotation, keeping `T` upper triangular.
    fn swap_adjacent(&mut self, k: usize) {
        let n = self.dim();
        let t11 = self.t[(k, k)];
        let t12 = self.t[(k, k + 1)];
        let t22 = self.t[(k + 1, k + 1)];
        // eigenvector of the 2x2 block for t22
        let v1 = t12;
        let v2 = t22 - t11;
        let len = (v1.norm_sqr() + v2.norm_sqr()).sqrt();
        if len == 0.0 {
            return;
        }
        let (g11, g21) = (v1 / len, v2 / len);
        let (g12, g22) = (-g21.conj(), g11.conj());

        // rows k, k+1 <- G* rows
        for j in 0..n {
            let a = self.t[(k, j)];
            let b = self.t[(k + 1, j)];
            self.t[(k, j)] = g11.conj() * a + g21.conj() * b;
            self.t[(k + 1, j)] = g12.conj() * a + g22.conj() * b;
        }
        // columns k, k+1 <- columns G, in both T and Q
        for m in [&mut self.t, &mut self.q] {
            for i in 0..n {
                let a = m[(i, k)];
                let b = m[(i, k + 1)];
                m[(i, k)] = a * g11 + b * g21;
                m[(i, k + 1)] = a * g12 + b * g22;
            }
        }
        self.t[(k + 1, k)] = c(0.0, 0.0);
        self.t[(k, k)] = t22;
        self.t[(k + 1, k + 1)] = t11;
    }

    /// Moves every eigenvalue accepted by `select` to the leading block,
    /// keeping the relative order within both groups. Returns the size of the
    /// leading block.
    pub fn reorder<F: Fn(Complex64) -> bool>(&mut self, select: F) -> usize {
        let n = self.dim();
        let mut flags: Vec<bool> = (0..n).map(|i| select(self.t[(i, i)])).collect();
        let mut placed = 0;
        for i in 0..n {
            if !flags[i] {
                continue;
            }
            let mut j = i;
            while j > placed {
                self.swap_adjacent(j - 1);
                flags.swap(j - 1, j);
                j -= 1;
            }
            placed += 1;
        }
        placed
    }

    /// Leading `k x k` block of `T`.
    pub fn leading_block(&self, k: usize) -> ComplexMatrix {
        self.t.view((0, 0), (k, k)).into_owned()
    }

    /// The first `k` Schur vectors: an orthonormal basis of the invariant
    /// subspace belonging to the leading block.
    pub fn leading_vectors(&self, k: usize) -> Vec<ComplexVector> {
        (0..k).map(|j| self.q.column(j).into_owned()).collect()
    }

    /// Projector onto the leading invariant subspace along the invariant
    /// complement belonging to the trailing block.
    ///
    /// The leading and trailing blocks must have disjoint spectra.
    pub fn leading_projector(&self, k: usize) -> ComplexMatrix {
        let n = self.dim();
        if k == 0 {
            return ComplexMatrix::zeros(n, n);
        }
        if k == n {
            return ComplexMatrix::identity(n, n);
        }
        let t11 = self.t.view((0, 0), (k, k)).into_owned();
        let t22 = self.t.view((k, k), (n - k, n - k)).into_owned();
        let t12 = self.t.view((0, k), (k, n - k)).into_owned();
        let y = solve_triangular_sylvester(&t11, &t22, &(-t12));
        let q1 = self.q.columns(0, k).into_owned();
        let q2 = self.q.columns(k, n - k).into_owned();
        &q1 * (q1.adjoint() - y * q2.adjoint())
    }
}

/// Solves `A Y - Y B = C` for upper triangular `A` and `B` with disjoint
/// spectra, column by column.
fn solve_triangular_sylvester(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    rhs: &ComplexMatrix,
) -> ComplexMatrix {
    let k = a.nrows();
    let m = b.nrows();
    let mut y = ComplexMatrix::zeros(k, m);
    for j in 0..m {
        let mut col: ComplexVector = rhs.column(j).into_owned();
        for l in 0..j {
            let coef = b[(l, j)];
            for i in 0..k {
                col[i] += y[(i, l)] * coef;
            }
        }
        let shift = b[(j, j)];
        for i in (0..k).rev() {
            let mut acc = col[i];
            for p in (i + 1)..k {
                acc -= a[(i, p)] * y[(p, j)];
            }
            y[(i, j)] = acc / (a[(i, i)] - shift);
        }
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::real_matrix;

    fn sample() -> ComplexMatrix {
        real_matrix(
            4,
            4,
            &[
                0.2, 1.0, -0.5, 0.3, 0.0, 0.9, 0.4, -1.2, 1.1, 0.0, -0.7, 0.5, 0.3, 0.8, 0.0, 0.1,
            ],
        )
    }

    #[test]
    fn reorder_preserves_factorisation() {
        let op = sample();
        let mut s = OrderedSchur::new(&op).unwrap();
        let k = s.reorder(|z| z.re < 0.0);
        let recon = s.q() * s.t() * s.q().adjoint();
        assert!((recon - &op).norm() < 1e-12);
        for (i, z) in s.eigenvalues().into_iter().enumerate() {
            assert_eq!(z.re < 0.0, i < k);
        }
        for j in 0..4 {
            for i in (j + 1)..4 {
                assert!(s.t()[(i, j)].norm() < 1e-14);
            }
        }
    }

    #[test]
    fn leading_projector_is_idempotent_and_commutes() {
        let op = sample();
        let mut s = OrderedSchur::new(&op).unwrap();
        let k = s.reorder(|z| z.norm() > 0.8);
        assert!(k > 0 && k < 4);
        let p = s.leading_projector(k);
        assert!((&p * &p - &p).norm() < 1e-10);
        assert!((&op * &p - &p * &op).norm() < 1e-10);
        let trace: Complex64 = p.trace();
        assert!((trace.re - k as f64).abs() < 1e-10);
    }

    #[test]
    fn sylvester_residual_vanishes() {
        let a = real_matrix(2, 2, &[1.0, 2.0, 0.0, 3.0]);
        let b = real_matrix(2, 2, &[-1.0, 0.5, 0.0, 0.25]);
        let rhs = real_matrix(2, 2, &[1.0, -2.0, 0.5, 4.0]);
        let y = solve_triangular_sylvester(&a, &b, &rhs);
        assert!((&a * &y - &y * &b - rhs).norm() < 1e-12);
    }
}
