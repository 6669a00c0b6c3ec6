use nalgebra::{DMatrix, DVector};

use super::observable::{Observable, DISTRIBUTION_TOL};
use crate::error::{Error, Result};
use crate::evolution::Evolution;
use crate::spectral::{c, ComplexMatrix, ComplexVector};

/// Word length up to which model invariants are checked on construction,
/// shortened for large alphabets so at most 2^16 words are visited per level.
pub const VALIDATION_DEPTH: usize = 6;
/// Largest number of words the path enumeration will visit.
pub const ENUMERATION_LIMIT: u128 = 1 << 20;

/// Finite-dimensional operator model of a stochastic process: one matrix
/// `T_a` per symbol, an initial vector `x` and an evaluation functional `σ`
/// with `σ(x) = 1`. The word `v = v_1 ... v_n` has probability
/// `p(v) = σ(T_{v_n} ... T_{v_1} x)`.
#[derive(Debug, Clone)]
pub struct ProcessModel {
    alphabet: Vec<String>,
    ops: Vec<DMatrix<f64>>,
    init: DVector<f64>,
    eval: DVector<f64>,
    tol: f64,
}

impl ProcessModel {
    pub fn new(
        alphabet: Vec<String>,
        ops: Vec<DMatrix<f64>>,
        init: DVector<f64>,
        eval: DVector<f64>,
    ) -> Result<Self> {
        Self::with_tol(alphabet, ops, init, eval, DISTRIBUTION_TOL)
    }

    pub fn with_tol(
        alphabet: Vec<String>,
        ops: Vec<DMatrix<f64>>,
        init: DVector<f64>,
        eval: DVector<f64>,
        tol: f64,
    ) -> Result<Self> {
        let invalid = |reason: &str| Error::InvalidModel {
            word: Vec::new(),
            reason: reason.to_string(),
        };
        if alphabet.is_empty() || alphabet.len() != ops.len() {
            return Err(invalid("need exactly one operator per symbol"));
        }
        let n = init.len();
        if eval.len() != n || ops.iter().any(|t| t.nrows() != n || t.ncols() != n) {
            return Err(invalid("operator, initial vector and evaluation dimensions differ"));
        }
        let model = Self {
            alphabet,
            ops,
            init,
            eval,
            tol,
        };
        model.validate()?;
        Ok(model)
    }

    /// Fair coin: two symbols, each `T_a = 1/2` on a one-dimensional space.
    pub fn fair_coin() -> Self {
        Self {
            alphabet: vec!["0".into(), "1".into()],
            ops: vec![DMatrix::from_element(1, 1, 0.5), DMatrix::from_element(1, 1, 0.5)],
            init: DVector::from_element(1, 1.0),
            eval: DVector::from_element(1, 1.0),
            tol: DISTRIBUTION_TOL,
        }
    }

    /// Deterministic alternator `0101...`: state 1 emits `0` and moves to
    /// state 2, which emits `1` and moves back.
    pub fn alternator() -> Self {
        let t0 = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]);
        let t1 = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        Self {
            alphabet: vec!["0".into(), "1".into()],
            ops: vec![t0, t1],
            init: DVector::from_column_slice(&[1.0, 0.0]),
            eval: DVector::from_element(2, 1.0),
            tol: DISTRIBUTION_TOL,
        }
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn ops(&self) -> &[DMatrix<f64>] {
        &self.ops
    }

    pub fn init(&self) -> &DVector<f64> {
        &self.init
    }

    pub fn eval(&self) -> &DVector<f64> {
        &self.eval
    }

    pub fn dim(&self) -> usize {
        self.init.len()
    }

    /// `p(v)` by direct application of the word operators.
    pub fn word_probability(&self, word: &[usize]) -> f64 {
        let mut x = self.init.clone();
        for &a in word {
            x = &self.ops[a] * x;
        }
        self.eval.dot(&x)
    }

    fn validate(&self) -> Result<()> {
        let total = self.eval.dot(&self.init);
        if (total - 1.0).abs() > self.tol {
            return Err(Error::InvalidModel {
                word: Vec::new(),
                reason: format!("σ(x) = {total}, expected 1"),
            });
        }
        // level by level, so the shortest offending word is reported
        let mut level = vec![(Vec::new(), self.init.clone(), total)];
        let k = self.ops.len();
        let depth = (1..=VALIDATION_DEPTH)
            .take_while(|&d| k.checked_pow(d as u32).is_some_and(|w| w <= 1 << 16))
            .count();
        for _ in 0..depth {
            let mut next_level = Vec::with_capacity(level.len() * self.ops.len());
            for (word, state, p) in &level {
                let mut children = 0.0;
                for (a, t) in self.ops.iter().enumerate() {
                    let next = t * state;
                    let q = self.eval.dot(&next);
                    let mut child = word.clone();
                    child.push(a);
                    if !q.is_finite() || q < -self.tol {
                        return Err(Error::InvalidModel {
                            word: child,
                            reason: format!("negative word probability {q}"),
                        });
                    }
                    children += q;
                    next_level.push((child, next, q));
                }
                if (children - p).abs() > self.tol {
                    return Err(Error::InvalidModel {
                        word: word.clone(),
                        reason: format!(
                            "continuations sum to {children}, word has probability {p}"
                        ),
                    });
                }
            }
            level = next_level;
        }
        Ok(())
    }
}

fn to_complex(m: &DMatrix<f64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| c(m[(i, j)], 0.0))
}

/// Evolution `(Σ_a T_a, x)` with observable `χ_a = σ ∘ T_a`, so that the
/// chain distribution at time `t` is the law of the symbol emitted at
/// `t + 1`.
pub fn process_evolution(model: &ProcessModel) -> Result<(Evolution, Observable)> {
    let n = model.dim();
    let psi = model
        .ops
        .iter()
        .fold(DMatrix::<f64>::zeros(n, n), |acc, t| acc + t);
    let start = ComplexVector::from_iterator(n, model.init.iter().map(|&x| c(x, 0.0)));
    let mut functionals = ComplexMatrix::zeros(model.ops.len(), n);
    for (a, t) in model.ops.iter().enumerate() {
        let row = t.transpose() * &model.eval;
        for j in 0..n {
            functionals[(a, j)] = c(row[j], 0.0);
        }
    }
    let ev = Evolution::new(to_complex(&psi), start)?;
    let obs = Observable::new(model.alphabet.clone(), functionals, model.tol)?;
    Ok((ev, obs))
}

/// Law of the symbol emitted at time `t + 1`, through the evolution.
pub fn process_marginal(model: &ProcessModel, t: usize) -> Result<Vec<f64>> {
    let (ev, obs) = process_evolution(model)?;
    let state = ev.states().nth(t).expect("states never end");
    Ok(obs.evaluate(&state).iter().map(|z| z.re).collect())
}

/// The same law as [`process_marginal`] by summing `p(va)` over every word
/// `v` of length `t`. Test oracle; exponential in `t`.
pub fn enumerate_process_marginals(model: &ProcessModel, t: usize) -> Result<Vec<f64>> {
    let k = model.ops.len() as u128;
    let size = (0..t).try_fold(1u128, |acc, _| acc.checked_mul(k));
    match size {
        Some(size) if size <= ENUMERATION_LIMIT => {}
        Some(size) => {
            return Err(Error::TooLarge {
                size,
                limit: ENUMERATION_LIMIT,
            })
        }
        None => {
            return Err(Error::TooLarge {
                size: u128::MAX,
                limit: ENUMERATION_LIMIT,
            })
        }
    }
    let mut out = vec![0.0; model.ops.len()];
    let mut word = vec![0usize; t];
    loop {
        for (a, slot) in out.iter_mut().enumerate() {
            word.push(a);
            *slot += model.word_probability(&word);
            word.pop();
        }
        // next word in lexicographic order
        let mut pos = t;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            word[pos] += 1;
            if word[pos] < model.ops.len() {
                break;
            }
            word[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::chain_distributions;

    #[test]
    fn fair_coin_marginals() {
        let model = ProcessModel::fair_coin();
        let (ev, obs) = process_evolution(&model).unwrap();
        let series = chain_distributions(&obs, &ev, 10).unwrap();
        assert!(series.rows.iter().all(|r| r == &vec![0.5, 0.5]));
        assert_eq!(enumerate_process_marginals(&model, 3).unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn alternator_marginals_alternate() {
        let model = ProcessModel::alternator();
        for t in 0..6 {
            let expected = if t % 2 == 0 { vec![1.0, 0.0] } else { vec![0.0, 1.0] };
            assert_eq!(process_marginal(&model, t).unwrap(), expected);
            assert_eq!(enumerate_process_marginals(&model, t).unwrap(), expected);
        }
    }

    #[test]
    fn invalid_model_names_the_word() {
        let t0 = DMatrix::from_row_slice(1, 1, &[1.2]);
        let t1 = DMatrix::from_row_slice(1, 1, &[-0.2]);
        let err = ProcessModel::new(
            vec!["0".into(), "1".into()],
            vec![t0, t1],
            DVector::from_element(1, 1.0),
            DVector::from_element(1, 1.0),
        )
        .unwrap_err();
        match err {
            Error::InvalidModel { word, .. } => assert_eq!(word, vec![1]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn leaking_model_is_rejected() {
        let t = DMatrix::from_element(1, 1, 0.4);
        let err = ProcessModel::new(
            vec!["0".into(), "1".into()],
            vec![t.clone(), t],
            DVector::from_element(1, 1.0),
            DVector::from_element(1, 1.0),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidModel { .. }));
    }

    #[test]
    fn enumeration_refuses_huge_horizons() {
        let err = enumerate_process_marginals(&ProcessModel::fair_coin(), 21).unwrap_err();
        assert!(matches!(err, Error::TooLarge { .. }));
    }
}
