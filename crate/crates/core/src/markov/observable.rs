use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{cesaro_average_at, mean_ergodic_limit, ErgodicLimit, Evolution};
use crate::spectral::{ensure_dim, ensure_finite_matrix, ComplexMatrix, ComplexVector};

/// Default tolerance for negativity, imaginary parts and normalisation.
pub const DISTRIBUTION_TOL: f64 = 1e-9;

/// Horizon of the Cesàro cross-check in [`limit_distribution`].
const LIMIT_CHECK_HORIZON: usize = 10_000;

/// A labelled family of linear functionals `χ_a`, one row per label.
///
/// `χ_a(x) = Σ_i F[a, i] x_i` (bilinear, no conjugation).
#[derive(Debug, Clone)]
pub struct Observable {
    labels: Vec<String>,
    functionals: ComplexMatrix,
    tol: f64,
}

impl Observable {
    pub fn new(labels: Vec<String>, functionals: ComplexMatrix, tol: f64) -> Result<Self> {
        ensure_dim(labels.len(), functionals.nrows())?;
        ensure_finite_matrix(&functionals, "observable functionals")?;
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidState(format!("duplicate label {l}")));
            }
        }
        if labels.is_empty() {
            return Err(Error::InvalidState("observable needs at least one label".into()));
        }
        Ok(Self {
            labels,
            functionals,
            tol,
        })
    }

    /// Coordinate projections `χ_i(x) = x_i`, labelled `1..=n`.
    pub fn coordinates(n: usize) -> Self {
        Self {
            labels: (1..=n).map(|i| i.to_string()).collect(),
            functionals: ComplexMatrix::identity(n, n),
            tol: DISTRIBUTION_TOL,
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn functionals(&self) -> &ComplexMatrix {
        &self.functionals
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn ambient_dim(&self) -> usize {
        self.functionals.ncols()
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Raw functional values `χ_a(x)`.
    pub fn evaluate(&self, x: &ComplexVector) -> Vec<Complex64> {
        (&self.functionals * x).iter().copied().collect()
    }

    /// Validated distribution at state `x`; `t` only labels errors. Returns
    /// the probabilities plus the number and largest size of clamped
    /// negatives.
    pub fn distribution(&self, t: usize, x: &ComplexVector) -> Result<(Vec<f64>, usize, f64)> {
        ensure_dim(self.ambient_dim(), x.len())?;
        let values = self.evaluate(x);
        let mut probs = Vec::with_capacity(values.len());
        let mut clamps = 0;
        let mut max_clamp: f64 = 0.0;
        for (label, z) in self.labels.iter().zip(&values) {
            let bad = |value: f64| Error::NotADistribution {
                t,
                label: label.clone(),
                value,
            };
            if !(z.re.is_finite() && z.im.is_finite()) || z.im.abs() > self.tol {
                return Err(bad(z.re));
            }
            if z.re < -self.tol {
                return Err(bad(z.re));
            }
            if z.re < 0.0 {
                clamps += 1;
                max_clamp = max_clamp.max(-z.re);
                probs.push(0.0);
            } else {
                probs.push(z.re);
            }
        }
        let total: f64 = values.iter().map(|z| z.re).sum();
        if (total - 1.0).abs() > self.tol {
            return Err(Error::NotADistribution {
                t,
                label: "<sum>".into(),
                value: total,
            });
        }
        Ok((probs, clamps, max_clamp))
    }
}

/// Per-time distributions of a generalized Markov chain.
#[derive(Debug, Clone, Serialize)]
pub struct DistributionSeries {
    pub labels: Vec<String>,
    /// `rows[t]` is the distribution at time `t`, `t = 0..=t_max`.
    pub rows: Vec<Vec<f64>>,
    /// `cesaro[t - 1]` averages `rows[1..=t]`.
    pub cesaro: Vec<Vec<f64>>,
    /// Entries in `[-tol, 0)` that were reported as zero.
    pub clamp_count: usize,
    pub max_clamp: f64,
}

/// `p^(t)_a = χ_a(op^t s)` for `t = 0..=t_max`, validated at every step.
pub fn chain_distributions(
    x: &Observable,
    ev: &Evolution,
    t_max: usize,
) -> Result<DistributionSeries> {
    ensure_dim(ev.dim(), x.ambient_dim())?;
    let k = x.labels.len();
    let mut rows = Vec::with_capacity(t_max + 1);
    let mut cesaro = Vec::with_capacity(t_max);
    let mut sum = vec![0.0; k];
    let mut clamp_count = 0;
    let mut max_clamp: f64 = 0.0;
    for (t, state) in ev.states().take(t_max + 1).enumerate() {
        let (probs, clamps, clamp) = x.distribution(t, &state)?;
        clamp_count += clamps;
        max_clamp = max_clamp.max(clamp);
        if t >= 1 {
            for (acc, p) in sum.iter_mut().zip(&probs) {
                *acc += p;
            }
            cesaro.push(sum.iter().map(|s| s / t as f64).collect());
        }
        rows.push(probs);
    }
    Ok(DistributionSeries {
        labels: x.labels.clone(),
        rows,
        cesaro,
        clamp_count,
        max_clamp,
    })
}

/// Binary chain `Y^a` with label `"1"` for `χ_a` and `"0"` for the rest.
pub fn indicator_chain(x: &Observable, a: &str) -> Result<Observable> {
    let idx = x.index_of(a)?;
    let n = x.ambient_dim();
    let mut functionals = ComplexMatrix::zeros(2, n);
    for (row, _) in x.labels.iter().enumerate() {
        let target = if row == idx { 0 } else { 1 };
        for j in 0..n {
            functionals[(target, j)] += x.functionals[(row, j)];
        }
    }
    Observable::new(vec!["1".into(), "0".into()], functionals, x.tol)
}

#[derive(Debug, Clone)]
pub struct LimitDistribution {
    pub labels: Vec<String>,
    pub probs: Vec<f64>,
    /// Distribution of the Cesàro average at the check horizon.
    pub cesaro_check: Vec<f64>,
    /// Largest absolute gap between `probs` and `cesaro_check`.
    pub cesaro_gap: f64,
    pub limit: ErgodicLimit,
}

/// `p̄^(∞)_a = χ_a(lim s̄^(t))`, cross-checked against the Cesàro average of
/// the chain at `t = 10^4`.
pub fn limit_distribution(x: &Observable, ev: &Evolution, tol: f64) -> Result<LimitDistribution> {
    ensure_dim(ev.dim(), x.ambient_dim())?;
    let limit = mean_ergodic_limit(ev, tol)?;
    let validator = x.clone().with_tol(x.tol.max(tol));
    let (probs, _, _) = validator
        .distribution(0, &limit.limit)
        .map_err(|e| match e {
            Error::NotADistribution { label, value, .. } => {
                Error::LimitNotADistribution { label, value }
            }
            other => other,
        })?;
    let check = cesaro_average_at(ev, LIMIT_CHECK_HORIZON);
    let cesaro_check: Vec<f64> = x.evaluate(&check).iter().map(|z| z.re).collect();
    let cesaro_gap = probs
        .iter()
        .zip(&cesaro_check)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(LimitDistribution {
        labels: x.labels.clone(),
        probs,
        cesaro_check,
        cesaro_gap,
        limit,
    })
}
