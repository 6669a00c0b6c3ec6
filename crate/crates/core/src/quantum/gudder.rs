use nalgebra::{DMatrix, DVector};

use super::hermitian::HermitianBasis;
use super::state::QUANTUM_TOL;
use crate::error::{Error, Result};
use crate::evolution::Evolution;
use crate::markov::{Observable, DISTRIBUTION_TOL};
use crate::spectral::{c, ensure_dim, hermitian_eigen, ComplexMatrix, ComplexVector};

/// Largest accepted total-trace drift of one walk step.
const LEAK_TOL: f64 = 1e-8;

/// Quantum random walk on `n` sites with local dimension `d`.
///
/// `channels[i][j]` is the real `d² x d²` matrix of `ε_ij`, carrying mass from
/// site `j` to site `i`, in the coordinates of [`HermitianBasis`]. The state
/// is one Hermitian PSD matrix per site with total trace 1.
#[derive(Debug, Clone)]
pub struct GudderWalk {
    basis: HermitianBasis,
    channels: Vec<Vec<DMatrix<f64>>>,
    state: Vec<DVector<f64>>,
}

/// Densities on which channels are validated: `E_jj` and the projectors onto
/// `(e_j + e_k)/√2` and `(e_j + i e_k)/√2` for `j < k`. They span the
/// Hermitian matrices.
pub fn probe_densities(d: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(d * d);
    let unit = |j: usize| {
        let mut e = ComplexVector::zeros(d);
        e[j] = c(1.0, 0.0);
        e
    };
    for j in 0..d {
        let e = unit(j);
        out.push(&e * e.adjoint());
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        for k in j + 1..d {
            for phase in [c(1.0, 0.0), c(0.0, 1.0)] {
                let v = (unit(j) + unit(k) * phase) * c(h, 0.0);
                out.push(&v * v.adjoint());
            }
        }
    }
    out
}

/// Channel `ρ ↦ weight · U ρ U*` in the coordinates of `basis`.
pub fn conjugation_channel(basis: &HermitianBasis, u: &ComplexMatrix, weight: f64) -> DMatrix<f64> {
    basis.superoperator(|t| u * t * u.adjoint()) * weight
}

fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    hermitian_eigen(m).0.first().copied().unwrap_or(0.0)
}

impl GudderWalk {
    /// Validates the channel grid on [`probe_densities`]: every `ε_ij(ρ)` must
    /// be PSD and `Σ_i tr ε_ij(ρ) = 1` for each source site `j`.
    pub fn new(
        d: usize,
        channels: Vec<Vec<DMatrix<f64>>>,
        state: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        let n = channels.len();
        if n == 0 {
            return Err(Error::InvalidState("walk needs at least one site".into()));
        }
        let basis = HermitianBasis::new(d);
        for (i, row) in channels.iter().enumerate() {
            ensure_dim(n, row.len())?;
            for (j, e) in row.iter().enumerate() {
                if e.nrows() != basis.dim() || e.ncols() != basis.dim() {
                    return Err(Error::InvalidChannel {
                        from: j,
                        to: i,
                        reason: format!(
                            "matrix is {}x{}, expected {}x{}",
                            e.nrows(),
                            e.ncols(),
                            basis.dim(),
                            basis.dim()
                        ),
                    });
                }
                if e.iter().any(|x| !x.is_finite()) {
                    return Err(Error::NonFinite { what: "channel" });
                }
            }
        }
        let trace = basis.trace_row();
        for rho in probe_densities(d) {
            let x = basis.coordinates(&rho);
            for j in 0..n {
                let mut total = 0.0;
                for (i, row) in channels.iter().enumerate() {
                    let image = &row[j] * &x;
                    let m = min_eigenvalue(&basis.matrix(&image));
                    if m < -QUANTUM_TOL {
                        return Err(Error::InvalidChannel {
                            from: j,
                            to: i,
                            reason: format!("maps a probe density to eigenvalue {m}"),
                        });
                    }
                    total += trace.dot(&image);
                }
                if (total - 1.0).abs() > QUANTUM_TOL {
                    return Err(Error::ChannelTraceMismatch { from: j, total });
                }
            }
        }
        ensure_dim(n, state.len())?;
        let mut coords = Vec::with_capacity(n);
        let mut total = 0.0;
        for (i, s) in state.iter().enumerate() {
            ensure_dim(d, s.nrows())?;
            ensure_dim(d, s.ncols())?;
            let dev = (s - s.adjoint()).norm();
            if dev > QUANTUM_TOL {
                return Err(Error::NotHermitian { deviation: dev });
            }
            let m = min_eigenvalue(s);
            if m < -QUANTUM_TOL {
                return Err(Error::InvalidState(format!(
                    "site {i} state has eigenvalue {m}"
                )));
            }
            total += s.trace().re;
            coords.push(basis.coordinates(s));
        }
        if (total - 1.0).abs() > QUANTUM_TOL {
            return Err(Error::InvalidState(format!(
                "site traces sum to {total}, expected 1"
            )));
        }
        Ok(Self {
            basis,
            channels,
            state: coords,
        })
    }

    /// Starts with the whole mass at `site` in local state `rho`.
    pub fn localized(
        d: usize,
        channels: Vec<Vec<DMatrix<f64>>>,
        site: usize,
        rho: ComplexMatrix,
    ) -> Result<Self> {
        let n = channels.len();
        if site >= n {
            return Err(Error::InvalidState(format!("site {site} out of range")));
        }
        let mut state = vec![ComplexMatrix::zeros(d, d); n];
        state[site] = rho;
        Self::new(d, channels, state)
    }

    pub fn sites(&self) -> usize {
        self.channels.len()
    }

    pub fn d(&self) -> usize {
        self.basis.d()
    }

    pub fn basis(&self) -> &HermitianBasis {
        &self.basis
    }

    pub fn channel(&self, to: usize, from: usize) -> &DMatrix<f64> {
        &self.channels[to][from]
    }

    /// Site states `S_i` as matrices.
    pub fn state(&self) -> Vec<ComplexMatrix> {
        self.state.iter().map(|x| self.basis.matrix(x)).collect()
    }

    /// `q_i = tr(S_i)`.
    pub fn site_distribution(&self) -> Vec<f64> {
        let r = self.basis.trace_row();
        self.state.iter().map(|x| r.dot(x)).collect()
    }

    /// Block evolution on `(H_d)^n` with blocks `ε_ij`, started at the current
    /// state, plus the site observable `{i ↦ tr(S_i)}` labelled `1..=n`.
    pub fn evolution(&self) -> Result<(Evolution, Observable)> {
        let n = self.sites();
        let m = self.basis.dim();
        let mut op = ComplexMatrix::zeros(n * m, n * m);
        for i in 0..n {
            for j in 0..n {
                let e = &self.channels[i][j];
                for a in 0..m {
                    for b in 0..m {
                        op[(i * m + a, j * m + b)] = c(e[(a, b)], 0.0);
                    }
                }
            }
        }
        let start = ComplexVector::from_iterator(
            n * m,
            self.state.iter().flat_map(|x| x.iter().map(|&v| c(v, 0.0))),
        );
        let r = self.basis.trace_row();
        let functionals = ComplexMatrix::from_fn(n, n * m, |i, k| {
            if k / m == i {
                c(r[k % m], 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let labels = (1..=n).map(|i| i.to_string()).collect();
        Ok((
            Evolution::new(op, start)?,
            Observable::new(labels, functionals, DISTRIBUTION_TOL)?,
        ))
    }
}

/// One step `S_i ← Σ_j ε_ij(S_j)`.
pub fn gudder_step(w: &GudderWalk) -> Result<GudderWalk> {
    let n = w.sites();
    let state: Vec<DVector<f64>> = (0..n)
        .map(|i| {
            (0..n).fold(DVector::zeros(w.basis.dim()), |acc, j| {
                acc + &w.channels[i][j] * &w.state[j]
            })
        })
        .collect();
    let r = w.basis.trace_row();
    let total: f64 = state.iter().map(|x| r.dot(x)).sum();
    if !total.is_finite() || (total - 1.0).abs() > LEAK_TOL {
        return Err(Error::TraceLeak { total });
    }
    Ok(GudderWalk {
        basis: w.basis.clone(),
        channels: w.channels.clone(),
        state,
    })
}

/// `Pr{X_1 = i_1, ..., X_t = i_t}`: alternately step and keep only site `i_k`,
/// then take the trace.
pub fn walk_path_probability(w: &GudderWalk, path: &[usize]) -> Result<f64> {
    let n = w.sites();
    let Some((&first, rest)) = path.split_first() else {
        return Err(Error::InvalidState("path must visit at least one site".into()));
    };
    for &i in path {
        if i >= n {
            return Err(Error::InvalidState(format!("site {i} out of range")));
        }
    }
    let mut x = (0..n).fold(DVector::zeros(w.basis.dim()), |acc, j| {
        acc + &w.channels[first][j] * &w.state[j]
    });
    let mut at = first;
    for &i in rest {
        x = &w.channels[i][at] * x;
        at = i;
    }
    Ok(w.basis.trace_row().dot(&x))
}
