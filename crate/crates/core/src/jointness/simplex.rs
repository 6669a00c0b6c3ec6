//! Dense phase-one simplex for `A x = b, x ≥ 0` over exact or floating scalars.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Ordered field the simplex can pivot in. Floating scalars treat values
/// within `1e-12` of zero as zero.
pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
{
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn to_f64(&self) -> f64;

    fn is_zero_approx(&self) -> bool {
        !self.is_pos() && !self.is_neg()
    }
}

const FLOAT_PIVOT_TOL: f64 = 1e-12;

impl Scalar for f64 {
    fn is_pos(&self) -> bool {
        *self > FLOAT_PIVOT_TOL
    }
    fn is_neg(&self) -> bool {
        *self < -FLOAT_PIVOT_TOL
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    fn is_pos(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_neg(&self) -> bool {
        Signed::is_negative(self)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// `p/q` as an exact rational.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Outcome of the phase-one problem `min Σ a` over `A x + a = b, x, a ≥ 0`.
#[derive(Debug, Clone)]
pub enum Phase1<T> {
    /// Basic solution with `A x = b` up to the acceptance threshold.
    Feasible(Vec<T>),
    /// Row weights `y` with `y^T A ≤ 0` and `y^T b > 0`.
    Infeasible { y: Vec<T>, gap: T },
}

/// Runs phase one with Bland's rule; the system counts as feasible when the
/// optimal artificial mass is at most `accept`.
pub fn phase_one<T: Scalar>(a: &[Vec<T>], b: &[T], accept: &T) -> Result<Phase1<T>> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    if b.len() != m || a.iter().any(|r| r.len() != n) {
        return Err(Error::Numerical("ragged constraint matrix".into()));
    }
    let width = n + m;
    let mut sign = vec![T::one(); m];
    let mut rows: Vec<Vec<T>> = Vec::with_capacity(m);
    let mut rhs: Vec<T> = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i].is_neg();
        if flip {
            sign[i] = -T::one();
        }
        let mut row = Vec::with_capacity(width);
        for v in &a[i] {
            row.push(if flip { -v.clone() } else { v.clone() });
        }
        for k in 0..m {
            row.push(if k == i { T::one() } else { T::zero() });
        }
        rows.push(row);
        rhs.push(if flip { -b[i].clone() } else { b[i].clone() });
    }
    let mut basis: Vec<usize> = (n..width).collect();
    // reduced costs of the phase-one objective and its current value
    let mut cost = vec![T::zero(); width];
    let mut value = T::zero();
    for i in 0..m {
        for j in 0..n {
            cost[j] = cost[j].clone() - rows[i][j].clone();
        }
        value = value + rhs[i].clone();
    }
    let max_pivots = 50 * (width + 1);
    for _ in 0..max_pivots {
        let Some(enter) = (0..width).find(|&j| cost[j].is_neg()) else {
            return Ok(finish(n, m, &basis, &rhs, &cost, &sign, value, accept));
        };
        let mut leave: Option<(usize, T)> = None;
        for i in 0..m {
            if !rows[i][enter].is_pos() {
                continue;
            }
            let r = rhs[i].clone() / rows[i][enter].clone();
            let better = match &leave {
                None => true,
                Some((li, lr)) => r < *lr || (r == *lr && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, r));
            }
        }
        let Some((p, _)) = leave else {
            return Err(Error::Numerical("phase-one objective unbounded".into()));
        };
        let piv = rows[p][enter].clone();
        for v in rows[p].iter_mut() {
            *v = v.clone() / piv.clone();
        }
        rhs[p] = rhs[p].clone() / piv;
        let pivot_row = rows[p].clone();
        let pivot_rhs = rhs[p].clone();
        for i in 0..m {
            // only exact zeros skip elimination; tiny floats are still cleared
            if i == p || rows[i][enter] == T::zero() {
                continue;
            }
            let f = rows[i][enter].clone();
            for (v, pv) in rows[i].iter_mut().zip(&pivot_row) {
                *v = v.clone() - f.clone() * pv.clone();
            }
            rhs[i] = rhs[i].clone() - f * pivot_rhs.clone();
        }
        let f = cost[enter].clone();
        for (v, pv) in cost.iter_mut().zip(&pivot_row) {
            *v = v.clone() - f.clone() * pv.clone();
        }
        value = value + f * pivot_rhs;
        basis[p] = enter;
    }
    Err(Error::Numerical("simplex pivot limit reached".into()))
}

#[allow(clippy::too_many_arguments)]
fn finish<T: Scalar>(
    n: usize,
    m: usize,
    basis: &[usize],
    rhs: &[T],
    cost: &[T],
    sign: &[T],
    value: T,
    accept: &T,
) -> Phase1<T> {
    if value > *accept {
        // reduced cost of artificial k is 1 - y_k
        let y = (0..m)
            .map(|k| sign[k].clone() * (T::one() - cost[n + k].clone()))
            .collect();
        return Phase1::Infeasible { y, gap: value };
    }
    let mut x = vec![T::zero(); n];
    for (i, &j) in basis.iter().enumerate() {
        if j < n {
            x[j] = rhs[i].clone();
        }
    }
    Phase1::Feasible(x)
}

/// Brute-force basic-solution search: feasible iff some set of `rank(A)`
/// columns yields a nonnegative solution. Returns `None` when more than
/// `limit` column sets would be visited.
pub fn vertex_search<T: Scalar>(a: &[Vec<T>], b: &[T], limit: u128) -> Option<bool> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    // reduced row echelon form of [A | b]
    let mut aug: Vec<Vec<T>> = a
        .iter()
        .zip(b)
        .map(|(r, v)| {
            let mut r = r.clone();
            r.push(v.clone());
            r
        })
        .collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..m).max_by(|&i, &j| {
            abs(&aug[i][col])
                .partial_cmp(&abs(&aug[j][col]))
                .unwrap_or(std::cmp::Ordering::Equal)
        }) else {
            break;
        };
        if aug[p][col].is_zero_approx() {
            continue;
        }
        aug.swap(rank, p);
        let piv = aug[rank][col].clone();
        for v in aug[rank].iter_mut() {
            *v = v.clone() / piv.clone();
        }
        let prow = aug[rank].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i != rank {
                let f = row[col].clone();
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
        }
        rank += 1;
        if rank == m {
            break;
        }
    }
    if aug[rank..].iter().any(|r| !r[n].is_zero_approx()) {
        return Some(false);
    }
    if binomial(n as u128, rank as u128) > limit {
        return None;
    }
    let rows = &aug[..rank];
    let mut cols: Vec<usize> = (0..rank).collect();
    loop {
        if let Some(x) = solve_square(rows, &cols, n) {
            if x.iter().all(|v| !v.is_neg()) {
                return Some(true);
            }
        }
        // next combination in lexicographic order
        let mut i = rank;
        loop {
            if i == 0 {
                return Some(false);
            }
            i -= 1;
            if cols[i] < n - rank + i {
                cols[i] += 1;
                for k in i + 1..rank {
                    cols[k] = cols[k - 1] + 1;
                }
                break;
            }
        }
    }
}

fn abs<T: Scalar>(v: &T) -> T {
    if v.is_neg() || *v < T::zero() {
        -v.clone()
    } else {
        v.clone()
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n.saturating_sub(k));
    let mut out: u128 = 1;
    for i in 0..k {
        out = out.saturating_mul(n - i) / (i + 1);
    }
    out
}

/// Solves the square system formed by `cols` of the full-rank rows; `None`
/// when singular.
fn solve_square<T: Scalar>(rows: &[Vec<T>], cols: &[usize], rhs_col: usize) -> Option<Vec<T>> {
    let r = cols.len();
    let mut m: Vec<Vec<T>> = rows
        .iter()
        .map(|row| {
            let mut v: Vec<T> = cols.iter().map(|&c| row[c].clone()).collect();
            v.push(row[rhs_col].clone());
            v
        })
        .collect();
    for col in 0..r {
        let p = (col..r).max_by(|&i, &j| {
            abs(&m[i][col])
                .partial_cmp(&abs(&m[j][col]))
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if m[p][col].is_zero_approx() {
            return None;
        }
        m.swap(col, p);
        let piv = m[col][col].clone();
        for v in m[col].iter_mut() {
            *v = v.clone() / piv.clone();
        }
        let prow = m[col].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != col {
                let f = row[col].clone();
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[r].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64) -> BigRational {
        ratio(p, 1)
    }

    #[test]
    fn feasible_system_returns_witness() {
        // x + y = 1, x - y = 0
        let a = vec![vec![q(1), q(1)], vec![q(1), q(-1)]];
        let b = vec![q(1), q(0)];
        match phase_one(&a, &b, &q(0)).unwrap() {
            Phase1::Feasible(x) => assert_eq!(x, vec![ratio(1, 2), ratio(1, 2)]),
            other => panic!("{other:?}"),
        }
        assert_eq!(vertex_search(&a, &b, 100), Some(true));
    }

    #[test]
    fn infeasible_system_returns_farkas_certificate() {
        // x + y = 1, x + y = 2
        let a = vec![vec![q(1), q(1)], vec![q(1), q(1)]];
        let b = vec![q(1), q(2)];
        let Phase1::Infeasible { y, gap } = phase_one(&a, &b, &q(0)).unwrap() else {
            panic!("expected infeasible");
        };
        assert!(gap.is_pos());
        for (a0, a1) in a[0].iter().zip(&a[1]) {
            let s = y[0].clone() * a0.clone() + y[1].clone() * a1.clone();
            assert!(!s.is_pos());
        }
        let yb = y[0].clone() * b[0].clone() + y[1].clone() * b[1].clone();
        assert!(yb.is_pos());
        assert_eq!(vertex_search(&a, &b, 100), Some(false));
    }

    #[test]
    fn negative_right_hand_sides_are_flipped() {
        // -x = -2 forces x = 2; x = -1 is infeasible
        let a = vec![vec![-1.0]];
        assert!(matches!(
            phase_one(&a, &[-2.0], &1e-9).unwrap(),
            Phase1::Feasible(x) if (x[0] - 2.0).abs() < 1e-12
        ));
        let Phase1::Infeasible { y, .. } = phase_one(&[vec![1.0]], &[-1.0], &1e-9).unwrap() else {
            panic!("expected infeasible");
        };
        // y·a ≤ 0 and y·b > 0 with a = 1, b = -1
        assert!(y[0] < 0.0);
    }

    #[test]
    fn vertex_search_respects_limit() {
        let a = vec![vec![1.0; 40]];
        assert_eq!(vertex_search(&a, &[1.0], 10), None);
        assert_eq!(binomial(8, 7), 8);
        assert_eq!(binomial(64, 32), 1_832_624_140_942_590_534);
    }
}
