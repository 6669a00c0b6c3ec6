//! Evolutions `(op, s)`: trajectories, Cesàro averages, stability verdicts,
//! mean-ergodic limits and asymptotic equivalence.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{
    self, ensure_dim, ensure_finite_matrix, ensure_finite_vector, ensure_square, ComplexMatrix,
    ComplexVector, OrderedSchur, CLUSTER_TOL, RANK_TOL,
};

/// A linear operator together with a start state.
#[derive(Debug, Clone)]
pub struct Evolution {
    op: ComplexMatrix,
    start: ComplexVector,
}

impl Evolution {
    pub fn new(op: ComplexMatrix, start: ComplexVector) -> Result<Self> {
        let n = ensure_square(&op)?;
        ensure_dim(n, start.len())?;
        ensure_finite_matrix(&op, "evolution operator")?;
        ensure_finite_vector(&start, "start state")?;
        Ok(Self { op, start })
    }

    pub fn op(&self) -> &ComplexMatrix {
        &self.op
    }

    pub fn start(&self) -> &ComplexVector {
        &self.start
    }

    pub fn dim(&self) -> usize {
        self.start.len()
    }

    /// Same operator, different start state.
    pub fn with_start(&self, start: ComplexVector) -> Result<Self> {
        Self::new(self.op.clone(), start)
    }

    /// Zero-pads the ambient space to `dim`, extending the operator by zero.
    pub fn embed(&self, dim: usize) -> Result<Self> {
        let n = self.dim();
        if dim < n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: dim,
            });
        }
        let mut op = ComplexMatrix::zeros(dim, dim);
        op.view_mut((0, 0), (n, n)).copy_from(&self.op);
        let mut start = ComplexVector::zeros(dim);
        start.rows_mut(0, n).copy_from(&self.start);
        Self::new(op, start)
    }

    /// The states `s, op s, op^2 s, ...` as an unbounded iterator.
    pub fn states(&self) -> States<'_> {
        States {
            op: &self.op,
            next: Some(self.start.clone()),
        }
    }
}

pub struct States<'a> {
    op: &'a ComplexMatrix,
    next: Option<ComplexVector>,
}

impl Iterator for States<'_> {
    type Item = ComplexVector;

    fn next(&mut self) -> Option<ComplexVector> {
        let current = self.next.take()?;
        self.next = Some(self.op * &current);
        Some(current)
    }
}

/// `[s^(0), ..., s^(t_max)]`.
pub fn trajectory(ev: &Evolution, t_max: usize) -> Vec<ComplexVector> {
    ev.states().take(t_max + 1).collect()
}

/// Running averages `(1/t) Σ_{m=1}^t s^(m)` for `t = 1..=t_max`.
///
/// The sum starts at `m = 1`; the start state itself is not averaged.
pub fn cesaro_averages(ev: &Evolution, t_max: usize) -> Vec<ComplexVector> {
    let mut sum = ComplexVector::zeros(ev.dim());
    ev.states()
        .skip(1)
        .take(t_max)
        .enumerate()
        .map(|(i, state)| {
            sum += state;
            sum.unscale((i + 1) as f64)
        })
        .collect()
}

/// Cesàro average at a single horizon without materialising the series.
pub fn cesaro_average_at(ev: &Evolution, t: usize) -> ComplexVector {
    assert!(t >= 1, "Cesàro averages start at t = 1");
    let mut sum = ComplexVector::zeros(ev.dim());
    for state in ev.states().skip(1).take(t) {
        sum += state;
    }
    sum.unscale(t as f64)
}

/// Doubling-window growth test shared by the stability and sampling checks.
///
/// With reference `R = max_{t ≤ base} ‖x_t‖`, the windows `[base·2^k,
/// base·2^(k+1)]` for `k = 0..=6` are scanned; the sequence is declared
/// unbounded once two consecutive windows exceed `10 R`. All work is in
/// log-norms so exponential growth cannot overflow.
#[derive(Debug, Clone, Copy)]
pub struct GrowthTest {
    pub base_horizon: usize,
    pub escalation: f64,
    pub confirmations: usize,
    pub doublings: u32,
}

impl GrowthTest {
    pub const ESCALATION: f64 = 10.0;
    pub const CONFIRMATIONS: usize = 2;
    pub const DOUBLINGS: u32 = 6;

    pub fn new(base_horizon: usize) -> Self {
        Self {
            base_horizon,
            escalation: Self::ESCALATION,
            confirmations: Self::CONFIRMATIONS,
            doublings: Self::DOUBLINGS,
        }
    }

    /// Last time index the test looks at.
    pub fn horizon(&self) -> usize {
        self.base_horizon << (self.doublings + 1)
    }

    /// Runs the test on `log ‖x_t‖` supplied in order `t = 0, 1, ...`.
    pub fn run<I: IntoIterator<Item = f64>>(&self, log_norms: I) -> GrowthOutcome {
        let mut iter = log_norms.into_iter();
        let mut log_sup = f64::NEG_INFINITY;
        let mut reference = f64::NEG_INFINITY;
        let mut t = 0usize;
        let mut pull = |upto: usize, t: &mut usize, sup: &mut f64| -> Option<f64> {
            let mut window = f64::NEG_INFINITY;
            while *t <= upto {
                let v = iter.next()?;
                let v = if v.is_nan() { f64::INFINITY } else { v };
                window = window.max(v);
                *sup = sup.max(v);
                *t += 1;
            }
            Some(window)
        };
        match pull(self.base_horizon, &mut t, &mut log_sup) {
            Some(w) => reference = reference.max(w),
            None => {
                return GrowthOutcome {
                    unbounded: false,
                    log_sup,
                    horizon_used: t.saturating_sub(1),
                }
            }
        }
        // a sequence that vanishes on the reference window is compared against a tiny floor
        let reference = reference.max(-690.0);
        let threshold = reference + self.escalation.ln();
        let mut streak = 0;
        for k in 0..=self.doublings {
            let upto = self.base_horizon << (k + 1);
            let Some(window) = pull(upto, &mut t, &mut log_sup) else {
                break;
            };
            if window > threshold {
                streak += 1;
                if streak >= self.confirmations || window - reference > 230.0 {
                    return GrowthOutcome {
                        unbounded: true,
                        log_sup,
                        horizon_used: upto,
                    };
                }
            } else {
                streak = 0;
            }
        }
        GrowthOutcome {
            unbounded: false,
            log_sup,
            horizon_used: t.saturating_sub(1),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GrowthOutcome {
    pub unbounded: bool,
    /// `log max ‖x_t‖` over the inspected range.
    pub log_sup: f64,
    pub horizon_used: usize,
}

/// Log-norms `log ‖op^t s‖` computed on a renormalised trajectory.
pub(crate) struct LogNorms<'a> {
    op: &'a ComplexMatrix,
    unit: ComplexVector,
    log_scale: f64,
    first: bool,
}

impl<'a> LogNorms<'a> {
    pub(crate) fn new(op: &'a ComplexMatrix, s: &ComplexVector) -> Self {
        let norm = s.norm();
        Self {
            op,
            unit: if norm > 0.0 { s.unscale(norm) } else { s.clone() },
            log_scale: norm.ln(),
            first: true,
        }
    }

    /// Current state as `(log scale, unit direction)`.
    pub(crate) fn advance(&mut self) -> (f64, &ComplexVector) {
        if self.first {
            self.first = false;
        } else {
            let next = self.op * &self.unit;
            let norm = next.norm();
            if norm == 0.0 {
                self.log_scale = f64::NEG_INFINITY;
                self.unit = next;
            } else {
                self.log_scale += norm.ln();
                self.unit = next.unscale(norm);
            }
        }
        (self.log_scale, &self.unit)
    }
}

impl Iterator for LogNorms<'_> {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(self.advance().0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Stable,
    Unstable,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralEvidence {
    /// Largest eigenvalue modulus of the operator restricted to the evolution space.
    pub max_modulus: f64,
    /// An eigenvalue with modulus above `1 + tol` is active on the evolution space.
    pub expanding_eigenvalue: bool,
    /// A unit-modulus eigenvalue with Jordan structure is active.
    pub defective_unit_eigenvalue: bool,
    pub evolution_dim: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub verdict: Verdict,
    /// Largest observed `‖op^t s‖`.
    pub sup_norm_estimate: f64,
    pub empirical_unbounded: bool,
    pub spectral_evidence: SpectralEvidence,
    pub horizon_used: usize,
}

fn spectral_evidence(ev: &Evolution, tol: f64) -> Result<SpectralEvidence> {
    let basis = spectral::krylov_subspace(ev.op(), ev.start(), RANK_TOL)?;
    let restricted = basis.restrict(ev.op());
    let schur = OrderedSchur::new(&restricted)?;
    let eigs = schur.eigenvalues();
    let max_modulus = eigs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let expanding_eigenvalue = eigs.iter().any(|z| z.norm() > 1.0 + tol);
    let defective_unit_eigenvalue = spectral::cluster_eigenvalues(&eigs, CLUSTER_TOL)
        .iter()
        .filter(|(cl, _)| (cl.value.norm() - 1.0).abs() <= tol)
        .any(|(cl, _)| spectral::is_defective_near(&schur, cl.value));
    Ok(SpectralEvidence {
        max_modulus,
        expanding_eigenvalue,
        defective_unit_eigenvalue,
        evolution_dim: basis.dim(),
    })
}

pub(crate) fn combine(empirical_unbounded: bool, spectral_unbounded: bool) -> Verdict {
    match (empirical_unbounded, spectral_unbounded) {
        (false, false) => Verdict::Stable,
        (true, true) => Verdict::Unstable,
        _ => Verdict::Inconclusive,
    }
}

/// Dual stability test: doubling-window growth of `‖op^t s‖` against the
/// spectrum of the operator restricted to the evolution space. The verdict is
/// `Inconclusive` when the two disagree.
pub fn stability_check(ev: &Evolution, base_horizon: usize, tol: f64) -> Result<StabilityReport> {
    if base_horizon < 8 {
        return Err(Error::Numerical(format!("base_horizon must be at least 8, got {base_horizon}")));
    }
    if ev.start().norm() == 0.0 {
        return Ok(StabilityReport {
            verdict: Verdict::Stable,
            sup_norm_estimate: 0.0,
            empirical_unbounded: false,
            spectral_evidence: SpectralEvidence {
                max_modulus: 0.0,
                expanding_eigenvalue: false,
                defective_unit_eigenvalue: false,
                evolution_dim: 0,
            },
            horizon_used: 0,
        });
    }
    let growth = GrowthTest::new(base_horizon).run(LogNorms::new(ev.op(), ev.start()));
    let evidence = spectral_evidence(ev, tol)?;
    let spectral_unbounded = evidence.expanding_eigenvalue || evidence.defective_unit_eigenvalue;
    Ok(StabilityReport {
        verdict: combine(growth.unbounded, spectral_unbounded),
        sup_norm_estimate: growth.log_sup.exp(),
        empirical_unbounded: growth.unbounded,
        spectral_evidence: evidence,
        horizon_used: growth.horizon_used,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LimitMethod {
    SpectralProjector,
    CesaroExtrapolation,
}

#[derive(Debug, Clone)]
pub struct ErgodicLimit {
    pub limit: ComplexVector,
    pub method: LimitMethod,
    /// `‖s̄^(T) - limit‖` at the cross-check horizon `T`.
    pub residual: f64,
    /// `‖op·limit - limit‖`.
    pub stationarity: f64,
    pub stability: StabilityReport,
}

#[derive(Debug, Clone)]
pub struct ErgodicOptions {
    pub tol: f64,
    pub base_horizon: usize,
    /// Skip the stability precondition.
    pub force: bool,
    pub cesaro_horizon: usize,
    pub method: LimitMethod,
    pub cluster_tol: f64,
}

impl Default for ErgodicOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            base_horizon: 64,
            force: false,
            cesaro_horizon: 10_000,
            method: LimitMethod::SpectralProjector,
            cluster_tol: CLUSTER_TOL,
        }
    }
}

/// Limit of the Cesàro averages with default options and the given tolerance.
pub fn mean_ergodic_limit(ev: &Evolution, tol: f64) -> Result<ErgodicLimit> {
    mean_ergodic_limit_with(
        ev,
        &ErgodicOptions {
            tol,
            ..ErgodicOptions::default()
        },
    )
}

/// Limit of the Cesàro averages.
///
/// The spectral route restricts the operator to the evolution space and
/// applies the projector onto its eigenvalue-one eigenspace (zero when 1 is
/// not an eigenvalue there). The Cesàro average at `cesaro_horizon` is kept
/// as an independent cross-check in `residual`.
pub fn mean_ergodic_limit_with(ev: &Evolution, opts: &ErgodicOptions) -> Result<ErgodicLimit> {
    let stability = stability_check(ev, opts.base_horizon, opts.tol)?;
    if stability.verdict != Verdict::Stable && !opts.force {
        return Err(Error::NotStable {
            verdict: stability.verdict,
        });
    }
    let n = ev.dim();
    let limit = if ev.start().norm() == 0.0 {
        ComplexVector::zeros(n)
    } else {
        match opts.method {
            LimitMethod::SpectralProjector => {
                let basis = spectral::krylov_subspace(ev.op(), ev.start(), RANK_TOL)?;
                let restricted = basis.restrict(ev.op());
                let p = spectral::spectral_projector(
                    &restricted,
                    Complex64::new(1.0, 0.0),
                    opts.cluster_tol,
                )?;
                basis.matrix() * (p * basis.coordinates(ev.start()))
            }
            LimitMethod::CesaroExtrapolation => {
                // Richardson step removing the 1/t transient term
                let t = opts.cesaro_horizon.max(1);
                let short = cesaro_average_at(ev, t);
                let long = cesaro_average_at(ev, 2 * t);
                long * Complex64::new(2.0, 0.0) - short
            }
        }
    };
    let check = cesaro_average_at(ev, opts.cesaro_horizon.max(1));
    let residual = (&check - &limit).norm();
    let stationarity = (ev.op() * &limit - &limit).norm();
    Ok(ErgodicLimit {
        limit,
        method: opts.method,
        residual,
        stationarity,
        stability,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Equivalence {
    Equivalent,
    NotEquivalent,
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub verdict: Equivalence,
    /// `d_t = ‖op1^t s1 - op2^t s2‖` for `t = 0..=horizon`.
    pub decay: Vec<f64>,
    pub window_maxima: Vec<f64>,
}

const EQUIVALENCE_WINDOWS: usize = 8;

/// Finite-horizon verdict on `lim ‖op1^t s1 - op2^t s2‖ = 0`.
///
/// Equivalent when `d_t ≤ tol` on the final quarter and the windowed maxima
/// never increase; not equivalent when the final windowed maximum exceeds
/// `100 tol` and the windowed maxima never decrease.
pub fn equivalence_check(
    ev1: &Evolution,
    ev2: &Evolution,
    horizon: usize,
    tol: f64,
) -> Result<EquivalenceReport> {
    ensure_dim(ev1.dim(), ev2.dim())?;
    let decay: Vec<f64> = ev1
        .states()
        .zip(ev2.states())
        .take(horizon + 1)
        .map(|(a, b)| {
            let d = (a - b).norm();
            if d.is_nan() {
                f64::INFINITY
            } else {
                d
            }
        })
        .collect();
    let windows = EQUIVALENCE_WINDOWS.min(decay.len());
    let chunk = decay.len().div_ceil(windows);
    let window_maxima: Vec<f64> = decay
        .chunks(chunk)
        .map(|w| w.iter().copied().fold(0.0, f64::max))
        .collect();
    let tail_start = decay.len() - decay.len().div_ceil(4);
    let tail_small = decay[tail_start..].iter().all(|&d| d <= tol);
    let slack = |w: f64| tol + 1e-9 * w;
    let non_increasing = window_maxima
        .windows(2)
        .all(|p| p[1] <= p[0] + slack(p[0]));
    let non_decreasing = window_maxima
        .windows(2)
        .all(|p| p[1] >= p[0] - slack(p[0]));
    let last = *window_maxima.last().unwrap_or(&0.0);
    let verdict = if tail_small && non_increasing {
        Equivalence::Equivalent
    } else if last > 100.0 * tol && non_decreasing {
        Equivalence::NotEquivalent
    } else {
        Equivalence::Inconclusive
    };
    Ok(EquivalenceReport {
        verdict,
        decay,
        window_maxima,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{real_diag, real_matrix, real_vector};

    fn rotation() -> ComplexMatrix {
        real_matrix(2, 2, &[0.0, -1.0, 1.0, 0.0])
    }

    #[test]
    fn identity_trajectory_repeats_start() {
        let s = real_vector(&[1.0, 2.0]);
        let ev = Evolution::new(ComplexMatrix::identity(2, 2), s.clone()).unwrap();
        let traj = trajectory(&ev, 5);
        assert_eq!(traj.len(), 6);
        assert!(traj.iter().all(|x| x == &s));
    }

    #[test]
    fn halving_trajectory() {
        let ev = Evolution::new(real_diag(&[0.5]), real_vector(&[1.0])).unwrap();
        let values: Vec<f64> = trajectory(&ev, 3).iter().map(|x| x[0].re).collect();
        assert_eq!(values, vec![1.0, 0.5, 0.25, 0.125]);
    }

    #[test]
    fn rotation_has_period_four() {
        let ev = Evolution::new(rotation(), real_vector(&[1.0, 0.0])).unwrap();
        let traj = trajectory(&ev, 4);
        assert_eq!(traj[4], traj[0]);
        assert_ne!(traj[1], traj[0]);
    }

    #[test]
    fn cesaro_of_identity_is_start() {
        let s = real_vector(&[0.3, 0.7]);
        let ev = Evolution::new(ComplexMatrix::identity(2, 2), s.clone()).unwrap();
        for avg in cesaro_averages(&ev, 10) {
            assert!((avg - &s).norm() < 1e-15);
        }
    }

    #[test]
    fn cesaro_of_sign_flip() {
        let ev = Evolution::new(real_diag(&[1.0, -1.0]), real_vector(&[1.0, 1.0])).unwrap();
        let avgs = cesaro_averages(&ev, 20);
        for k in 1..=10 {
            assert_eq!(avgs[2 * k - 1], real_vector(&[1.0, 0.0]));
        }
    }

    #[test]
    fn cesaro_of_rotation_vanishes_every_fourth_step() {
        let ev = Evolution::new(rotation(), real_vector(&[1.0, 0.0])).unwrap();
        let avgs = cesaro_averages(&ev, 40);
        for k in 1..=10 {
            assert_eq!(avgs[4 * k - 1], ComplexVector::zeros(2));
        }
    }

    #[test]
    fn doubling_is_unstable() {
        let ev = Evolution::new(real_diag(&[2.0]), real_vector(&[1.0])).unwrap();
        let r = stability_check(&ev, 8, 1e-8).unwrap();
        assert_eq!(r.verdict, Verdict::Unstable);
    }

    #[test]
    fn unitary_is_stable_with_sup_norm_of_start() {
        let s = real_vector(&[3.0, 4.0]);
        let ev = Evolution::new(rotation(), s).unwrap();
        let r = stability_check(&ev, 8, 1e-8).unwrap();
        assert_eq!(r.verdict, Verdict::Stable);
        assert!((r.sup_norm_estimate - 5.0).abs() < 1e-12);
    }

    #[test]
    fn jordan_growth_is_unstable() {
        let ev = Evolution::new(
            real_matrix(2, 2, &[1.0, 1.0, 0.0, 1.0]),
            real_vector(&[0.0, 1.0]),
        )
        .unwrap();
        let r = stability_check(&ev, 8, 1e-8).unwrap();
        assert!(r.empirical_unbounded);
        assert!(r.spectral_evidence.defective_unit_eigenvalue);
        assert_eq!(r.verdict, Verdict::Unstable);
    }

    #[test]
    fn invisible_jordan_block_is_stable() {
        // start state is an eigenvector, so the Jordan chain never shows up
        let ev = Evolution::new(
            real_matrix(2, 2, &[1.0, 1.0, 0.0, 1.0]),
            real_vector(&[1.0, 0.0]),
        )
        .unwrap();
        assert_eq!(stability_check(&ev, 8, 1e-8).unwrap().verdict, Verdict::Stable);
    }

    #[test]
    fn zero_start_is_stable_with_zero_limit() {
        let ev = Evolution::new(real_diag(&[5.0, 1.0]), real_vector(&[0.0, 0.0])).unwrap();
        assert_eq!(stability_check(&ev, 8, 1e-8).unwrap().verdict, Verdict::Stable);
        let lim = mean_ergodic_limit(&ev, 1e-8).unwrap();
        assert_eq!(lim.limit.norm(), 0.0);
    }

    #[test]
    fn symmetric_walk_limit() {
        let ev = Evolution::new(
            real_matrix(2, 2, &[0.5, 0.5, 0.5, 0.5]),
            real_vector(&[1.0, 0.0]),
        )
        .unwrap();
        let lim = mean_ergodic_limit(&ev, 1e-8).unwrap();
        assert!((&lim.limit - real_vector(&[0.5, 0.5])).norm() < 1e-12);
        // this operator is already idempotent, so every average past t = 0 is exact
        assert!(lim.residual < 1e-12);
        assert!(lim.stationarity < 1e-12);
    }

    #[test]
    fn rotation_limit_is_zero() {
        let ev = Evolution::new(rotation(), real_vector(&[1.0, 0.0])).unwrap();
        let lim = mean_ergodic_limit(&ev, 1e-8).unwrap();
        assert!(lim.limit.norm() < 1e-12);
        assert!(lim.residual < 1e-3);
    }

    #[test]
    fn unstable_limit_is_refused() {
        let ev = Evolution::new(real_diag(&[2.0]), real_vector(&[1.0])).unwrap();
        let err = mean_ergodic_limit(&ev, 1e-8).unwrap_err();
        assert!(matches!(
            err,
            Error::NotStable {
                verdict: Verdict::Unstable
            }
        ));
    }

    #[test]
    fn cesaro_route_agrees_with_projector() {
        let ev = Evolution::new(real_diag(&[1.0, -1.0, 0.4]), real_vector(&[1.0, 2.0, 3.0])).unwrap();
        let spectral = mean_ergodic_limit(&ev, 1e-8).unwrap();
        let cesaro = mean_ergodic_limit_with(
            &ev,
            &ErgodicOptions {
                method: LimitMethod::CesaroExtrapolation,
                ..ErgodicOptions::default()
            },
        )
        .unwrap();
        assert!((spectral.limit - cesaro.limit).norm() < 1e-3);
    }

    #[test]
    fn decaying_difference_is_equivalent() {
        let op = real_diag(&[1.0, 0.5]);
        let a = Evolution::new(op.clone(), real_vector(&[1.0, 1.0])).unwrap();
        let b = Evolution::new(op, real_vector(&[1.0, 0.0])).unwrap();
        let r = equivalence_check(&a, &b, 200, 1e-10).unwrap();
        assert_eq!(r.verdict, Equivalence::Equivalent);
    }

    #[test]
    fn sign_flip_is_not_equivalent() {
        let a = Evolution::new(real_diag(&[1.0]), real_vector(&[1.0])).unwrap();
        let b = Evolution::new(real_diag(&[-1.0]), real_vector(&[1.0])).unwrap();
        let r = equivalence_check(&a, &b, 200, 1e-10).unwrap();
        assert_eq!(r.verdict, Equivalence::NotEquivalent);
        assert_eq!(r.decay[1], 2.0);
    }

    #[test]
    fn evolution_is_equivalent_to_itself() {
        let ev = Evolution::new(rotation(), real_vector(&[1.0, 0.0])).unwrap();
        let r = equivalence_check(&ev, &ev, 100, 1e-12).unwrap();
        assert_eq!(r.verdict, Equivalence::Equivalent);
        assert!(r.decay.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn dimension_mismatch_needs_embedding() {
        let a = Evolution::new(real_diag(&[1.0]), real_vector(&[1.0])).unwrap();
        let b = Evolution::new(real_diag(&[1.0, 0.0]), real_vector(&[1.0, 0.0])).unwrap();
        assert!(matches!(
            equivalence_check(&a, &b, 10, 1e-10),
            Err(Error::DimensionMismatch { .. })
        ));
        let r = equivalence_check(&a.embed(2).unwrap(), &b, 10, 1e-10).unwrap();
        assert_eq!(r.verdict, Equivalence::Equivalent);
    }

    #[test]
    fn growth_test_ignores_bounded_oscillation() {
        let g = GrowthTest::new(8);
        let seq = (0..=g.horizon()).map(|t| if t % 3 == 0 { 1.0f64.ln() } else { 0.5f64.ln() });
        assert!(!g.run(seq).unbounded);
    }
}
