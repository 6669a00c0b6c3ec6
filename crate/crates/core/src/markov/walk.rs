use nalgebra::DMatrix;

use super::observable::{Observable, DISTRIBUTION_TOL};
use crate::error::{Error, Result};
use crate::evolution::Evolution;
use crate::spectral::{c, ComplexMatrix, ComplexVector};

/// Random walk with column-stochastic transition matrix `m` from `p0`,
/// observed through the coordinate projections.
pub fn random_walk_evolution(m: &DMatrix<f64>, p0: &[f64]) -> Result<(Evolution, Observable)> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::NotSquare {
            rows: n,
            cols: m.ncols(),
        });
    }
    crate::spectral::ensure_dim(n, p0.len())?;
    let tol = DISTRIBUTION_TOL;
    for j in 0..n {
        let col = m.column(j);
        let sum: f64 = col.iter().sum();
        if col.iter().any(|&x| !x.is_finite() || x < -tol) || (sum - 1.0).abs() > tol {
            return Err(Error::NotStochastic { column: j });
        }
    }
    let total: f64 = p0.iter().sum();
    if p0.iter().any(|&x| !x.is_finite() || x < -tol) || (total - 1.0).abs() > tol {
        return Err(Error::InvalidState("start vector is not a probability distribution".into()));
    }
    let op = ComplexMatrix::from_fn(n, n, |i, j| c(m[(i, j)], 0.0));
    let start = ComplexVector::from_iterator(n, p0.iter().map(|&x| c(x, 0.0)));
    Ok((Evolution::new(op, start)?, Observable::coordinates(n)))
}

/// Hidden-chain observable `χ_a(x) = Σ_{X(i) = a} x_i`; labels keep the
/// order of their first appearance in `labeling`.
pub fn hidden_observable<S: AsRef<str>>(labeling: &[S]) -> Result<Observable> {
    let mut labels: Vec<String> = Vec::new();
    for l in labeling {
        if !labels.iter().any(|x| x == l.as_ref()) {
            labels.push(l.as_ref().to_string());
        }
    }
    let mut f = ComplexMatrix::zeros(labels.len(), labeling.len());
    for (i, l) in labeling.iter().enumerate() {
        let row = labels.iter().position(|x| x == l.as_ref()).expect("label was collected");
        f[(row, i)] = c(1.0, 0.0);
    }
    Observable::new(labels, f, DISTRIBUTION_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::chain_distributions;
    use crate::spectral::real_vector;

    #[test]
    fn identity_walk_stays_put() {
        let (ev, obs) =
            random_walk_evolution(&DMatrix::identity(3, 3), &[1.0, 0.0, 0.0]).unwrap();
        let series = chain_distributions(&obs, &ev, 5).unwrap();
        assert!(series.rows.iter().all(|r| r == &vec![1.0, 0.0, 0.0]));
    }

    #[test]
    fn symmetric_walk_uniform_from_first_step() {
        let m = DMatrix::from_element(2, 2, 0.5);
        let (ev, obs) = random_walk_evolution(&m, &[1.0, 0.0]).unwrap();
        let series = chain_distributions(&obs, &ev, 4).unwrap();
        assert!(series.rows[1..].iter().all(|r| r == &vec![0.5, 0.5]));
    }

    #[test]
    fn heavy_column_is_not_stochastic() {
        let m = DMatrix::from_row_slice(2, 2, &[0.7, 0.5, 0.5, 0.5]);
        let err = random_walk_evolution(&m, &[1.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::NotStochastic { column: 0 }));
    }

    #[test]
    fn hidden_labels_aggregate() {
        let obs = hidden_observable(&["a", "a", "b"]).unwrap();
        let p = obs.evaluate(&real_vector(&[0.2, 0.3, 0.5]));
        assert!((p[0].re - 0.5).abs() < 1e-15);
        assert!((p[1].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn single_label_is_certain() {
        let obs = hidden_observable(&["x", "x", "x"]).unwrap();
        let p = obs.evaluate(&real_vector(&[0.2, 0.3, 0.5]));
        assert_eq!(p.len(), 1);
        assert!((p[0].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn injective_labels_are_coordinates() {
        let obs = hidden_observable(&["1", "2", "3"]).unwrap();
        assert_eq!(obs.functionals(), Observable::coordinates(3).functionals());
    }
}
