use super::{ensure_dim, ensure_finite_matrix, ensure_finite_vector, ensure_square};
use super::{ComplexMatrix, ComplexVector, SubspaceBasis};
use crate::error::{Error, Result};

/// Orthonormal basis of the evolution space `span{s, op s, op^2 s, ...}`.
///
/// Arnoldi with two Gram-Schmidt passes. The space is saturated once the
/// orthogonal remainder of `op q_k` falls below `tol` times `‖op q_k‖`; at
/// that point the span is `op`-invariant up to rounding, so its dimension is
/// the dimension of the evolution.
pub fn krylov_subspace(
    op: &ComplexMatrix,
    s: &ComplexVector,
    tol: f64,
) -> Result<SubspaceBasis> {
    let n = ensure_square(op)?;
    ensure_dim(n, s.len())?;
    ensure_finite_matrix(op, "operator")?;
    ensure_finite_vector(s, "start vector")?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Numerical(format!("rank tolerance must be positive, got {tol}")));
    }
    let start_norm = s.norm();
    if start_norm == 0.0 {
        return Err(Error::ZeroStart);
    }

    let mut basis: Vec<ComplexVector> = vec![s.unscale(start_norm)];
    while basis.len() < n {
        let last = basis.last().expect("basis is never empty");
        let mut w = op * last;
        let scale = w.norm();
        if scale == 0.0 {
            break;
        }
        for _pass in 0..2 {
            for q in &basis {
                let h = q.dotc(&w);
                w.axpy(-h, q, num_complex::Complex64::new(1.0, 0.0));
            }
        }
        let rest = w.norm();
        if rest <= tol * scale {
            break;
        }
        basis.push(w.unscale(rest));
    }
    Ok(SubspaceBasis::new_unchecked(n, basis, tol))
}

/// Orthonormal basis of the smallest `op`-invariant subspace containing
/// every vector in `starts` (block Krylov space).
///
/// Zero starts are skipped; the result may be empty.
pub fn krylov_span(
    op: &ComplexMatrix,
    starts: &[ComplexVector],
    tol: f64,
) -> Result<SubspaceBasis> {
    let n = ensure_square(op)?;
    let one = num_complex::Complex64::new(1.0, 0.0);
    let mut basis: Vec<ComplexVector> = Vec::new();
    let push = |basis: &mut Vec<ComplexVector>, mut w: ComplexVector, scale: f64| -> bool {
        if scale == 0.0 || basis.len() == n {
            return false;
        }
        for _pass in 0..2 {
            for q in basis.iter() {
                let h = q.dotc(&w);
                w.axpy(-h, q, one);
            }
        }
        let rest = w.norm();
        if rest <= tol * scale {
            return false;
        }
        basis.push(w.unscale(rest));
        true
    };
    for s in starts {
        ensure_dim(n, s.len())?;
        push(&mut basis, s.clone(), s.norm());
    }
    let mut cursor = 0;
    while cursor < basis.len() {
        let w = op * &basis[cursor];
        let scale = w.norm();
        push(&mut basis, w, scale);
        cursor += 1;
    }
    Ok(SubspaceBasis::new_unchecked(n, basis, tol))
}
