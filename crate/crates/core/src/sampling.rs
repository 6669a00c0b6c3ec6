//! Sampling functions `f: C^n -> C^k` along an evolution, their Cesàro
//! averages, and the bounded-iff-convergent verdict for finite evolutions.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evolution::{Evolution, GrowthTest, LogNorms};
use crate::spectral::{
    self, ensure_finite_matrix, ComplexMatrix, ComplexVector, OrderedSchur, CLUSTER_TOL, RANK_TOL,
};

/// Tolerance on eigenvalue moduli used by the spectral prediction.
const SPECTRAL_TOL: f64 = 1e-8;

/// A linear map into a sample space, as a `k x n` matrix.
#[derive(Debug, Clone)]
pub struct SamplingFunction {
    matrix: ComplexMatrix,
}

impl SamplingFunction {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.nrows() == 0 {
            return Err(Error::InvalidState("sampling function needs at least one row".into()));
        }
        ensure_finite_matrix(&matrix, "sampling function")?;
        Ok(Self { matrix })
    }

    /// The identity sampling function on `C^n`.
    pub fn identity(n: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(n, n),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn sample_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, x: &ComplexVector) -> ComplexVector {
        &self.matrix * x
    }

    /// `alpha f + beta g`.
    pub fn combine(&self, alpha: Complex64, other: &Self, beta: Complex64) -> Result<Self> {
        spectral::ensure_dim(self.matrix.nrows(), other.matrix.nrows())?;
        spectral::ensure_dim(self.matrix.ncols(), other.matrix.ncols())?;
        Self::new(&self.matrix * alpha + &other.matrix * beta)
    }

    fn check(&self, ev: &Evolution) -> Result<()> {
        spectral::ensure_dim(ev.dim(), self.matrix.ncols())
    }
}

/// `f_1, ..., f_{t_max}` with `f_t = f(op^t s)`.
pub fn sample_values(f: &SamplingFunction, ev: &Evolution, t_max: usize) -> Result<Vec<ComplexVector>> {
    f.check(ev)?;
    Ok(ev.states().skip(1).take(t_max).map(|x| f.apply(&x)).collect())
}

/// Running averages `(1/t) Σ_{m=1}^t f_m` for `t = 1..=t_max`.
pub fn sample_averages(
    f: &SamplingFunction,
    ev: &Evolution,
    t_max: usize,
) -> Result<Vec<ComplexVector>> {
    f.check(ev)?;
    let mut sum = ComplexVector::zeros(f.sample_dim());
    Ok(ev
        .states()
        .skip(1)
        .take(t_max)
        .enumerate()
        .map(|(i, x)| {
            sum += f.apply(&x);
            sum.unscale((i + 1) as f64)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Tristate {
    Yes,
    No,
    Inconclusive,
}

impl Tristate {
    fn from_pair(a: bool, b: bool) -> Self {
        match (a, b) {
            (true, true) => Tristate::Yes,
            (false, false) => Tristate::No,
            _ => Tristate::Inconclusive,
        }
    }

    pub fn is_clean(self) -> bool {
        self != Tristate::Inconclusive
    }
}

/// Prediction from the modes of `op` that are visible through `f` from `s`.
#[derive(Debug, Clone)]
pub struct SpectralPrediction {
    /// Dimension of the minimal realisation of the sampled sequence.
    pub visible_dim: usize,
    pub max_visible_modulus: f64,
    pub bounded: bool,
    /// `f(P_1 s)` when bounded.
    pub limit: Option<ComplexVector>,
}

#[derive(Debug, Clone)]
pub struct SamplingVerdict {
    pub bounded: Tristate,
    pub converges: Tristate,
    pub limit: Option<ComplexVector>,
    /// Largest observed `‖f_t‖`.
    pub max_norm: f64,
    pub empirical_bounded: bool,
    pub empirical_converges: bool,
    /// `max ‖f̄_t - f̄_H‖` over the last quarter of the horizon.
    pub oscillation: f64,
    pub final_average: Option<ComplexVector>,
    pub spectral: SpectralPrediction,
    pub horizon_used: usize,
}

/// Reduces `(op, s, f)` to the modes that actually reach the samples: the
/// evolution space of `s`, then its quotient by the part `f` cannot see.
fn spectral_prediction(f: &SamplingFunction, ev: &Evolution) -> Result<SpectralPrediction> {
    let zero = SpectralPrediction {
        visible_dim: 0,
        max_visible_modulus: 0.0,
        bounded: true,
        limit: Some(ComplexVector::zeros(f.sample_dim())),
    };
    let reach = match spectral::krylov_subspace(ev.op(), ev.start(), RANK_TOL) {
        Ok(b) => b,
        Err(Error::ZeroStart) => return Ok(zero),
        Err(e) => return Err(e),
    };
    let a_k = reach.restrict(ev.op());
    let c_k = reach.coordinates(ev.start());
    let f_k = f.matrix() * reach.matrix();
    let f_k_adj = f_k.adjoint();
    let rows: Vec<ComplexVector> = (0..f_k_adj.ncols())
        .map(|j| f_k_adj.column(j).into_owned())
        .collect();
    let seen = spectral::krylov_span(&a_k.adjoint(), &rows, RANK_TOL)?;
    if seen.is_empty() {
        return Ok(zero);
    }
    let w = seen.matrix();
    let a_o = w.adjoint() * &a_k * &w;
    let c_o = w.adjoint() * c_k;
    let f_o = f_k * &w;

    let schur = OrderedSchur::new(&a_o)?;
    let eigs = schur.eigenvalues();
    let max_visible_modulus = eigs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let expanding = eigs.iter().any(|z| z.norm() > 1.0 + SPECTRAL_TOL);
    let defective = spectral::cluster_eigenvalues(&eigs, CLUSTER_TOL)
        .iter()
        .filter(|(cl, _)| (cl.value.norm() - 1.0).abs() <= SPECTRAL_TOL)
        .any(|(cl, _)| spectral::is_defective_near(&schur, cl.value));
    let bounded = !expanding && !defective;
    let limit = if bounded {
        let p = spectral::spectral_projector(&a_o, Complex64::new(1.0, 0.0), CLUSTER_TOL)?;
        Some(f_o * (p * c_o))
    } else {
        None
    };
    Ok(SpectralPrediction {
        visible_dim: seen.dim(),
        max_visible_modulus,
        bounded,
        limit,
    })
}

/// Empirical boundedness and convergence of the samples, each cross-checked
/// against the spectral prediction; disagreement yields `Inconclusive`.
///
/// Boundedness uses the shared doubling-window growth test on `‖f_t‖`.
/// Convergence requires the oscillation of `f̄_t` over the last quarter of
/// the horizon to stay below `tol (1 + ‖f̄_H‖)`, so `tol` must exceed the
/// `O(1/H)` Cesàro tail at horizon `H = 128 base_horizon`.
pub fn sampling_verdict(
    f: &SamplingFunction,
    ev: &Evolution,
    base_horizon: usize,
    tol: f64,
) -> Result<SamplingVerdict> {
    f.check(ev)?;
    if base_horizon < 8 {
        return Err(Error::Numerical(format!("base_horizon must be at least 8, got {base_horizon}")));
    }
    let growth_test = GrowthTest::new(base_horizon);
    let horizon = growth_test.horizon();
    let tail_start = horizon - horizon / 4;

    let mut states = LogNorms::new(ev.op(), ev.start());
    let mut log_norms = Vec::with_capacity(horizon + 1);
    let mut sum = ComplexVector::zeros(f.sample_dim());
    let mut tail: Vec<ComplexVector> = Vec::with_capacity(horizon - tail_start + 1);
    let mut finite = true;
    for t in 0..=horizon {
        let (log_scale, unit) = states.advance();
        let direction = f.apply(unit);
        let dn = direction.norm();
        log_norms.push(if dn == 0.0 { f64::NEG_INFINITY } else { log_scale + dn.ln() });
        if t == 0 || !finite {
            continue;
        }
        if log_scale > 700.0 {
            finite = false;
            continue;
        }
        sum += direction * Complex64::new(log_scale.exp(), 0.0);
        if t >= tail_start {
            tail.push(sum.unscale(t as f64));
        }
    }
    let growth = growth_test.run(log_norms.iter().copied());
    let max_log = log_norms.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let final_average = if finite { tail.last().cloned() } else { None };
    let (empirical_converges, oscillation) = match &final_average {
        Some(last) if last.iter().all(|z| z.re.is_finite() && z.im.is_finite()) => {
            let osc = tail.iter().map(|x| (x - last).norm()).fold(0.0, f64::max);
            (osc <= tol * (1.0 + last.norm()), osc)
        }
        _ => (false, f64::INFINITY),
    };
    let empirical_bounded = !growth.unbounded;

    let spectral = spectral_prediction(f, ev)?;
    let bounded = Tristate::from_pair(empirical_bounded, spectral.bounded);
    let mut converges = Tristate::from_pair(empirical_converges, spectral.bounded);
    if converges == Tristate::Yes {
        if let (Some(avg), Some(lim)) = (&final_average, &spectral.limit) {
            if (avg - lim).norm() > 10.0 * tol * (1.0 + lim.norm()) {
                converges = Tristate::Inconclusive;
            }
        }
    }
    let limit = if converges == Tristate::Yes {
        spectral.limit.clone()
    } else {
        None
    };
    Ok(SamplingVerdict {
        bounded,
        converges,
        limit,
        max_norm: max_log.exp(),
        empirical_bounded,
        empirical_converges,
        oscillation,
        final_average,
        spectral,
        horizon_used: horizon,
    })
}
