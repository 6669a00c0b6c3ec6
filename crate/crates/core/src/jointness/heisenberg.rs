use crate::error::{Error, Result};
use crate::quantum::{Measurement, QuantumState};
use crate::spectral::{
    common_eigenbasis, commutator_norm, ensure_dim, ComplexMatrix, ComplexVector, SubspaceBasis,
};

/// Default commutator threshold, scaled by `max(1, ‖A‖ ‖B‖)`.
pub const COMMUTE_TOL: f64 = 1e-10;

/// Observable on `Λ x Λ'` induced by a common eigenbasis `{g_k}` of two
/// commuting measurements: atom `(λ, μ)` collects the `g_k` with
/// `A g_k = λ g_k` and `B g_k = μ g_k`, in basis order.
#[derive(Debug, Clone)]
pub struct JointObservable {
    a_values: Vec<f64>,
    b_values: Vec<f64>,
    /// `(index into a_values, index into b_values)` per atom.
    atoms: Vec<(usize, usize)>,
    /// Atom of each basis vector.
    zeta: Vec<usize>,
    basis: SubspaceBasis,
}

impl JointObservable {
    pub fn a_values(&self) -> &[f64] {
        &self.a_values
    }

    pub fn b_values(&self) -> &[f64] {
        &self.b_values
    }

    pub fn atoms(&self) -> &[(usize, usize)] {
        &self.atoms
    }

    /// Atom index of every common eigenvector.
    pub fn zeta(&self) -> &[usize] {
        &self.zeta
    }

    pub fn basis(&self) -> &SubspaceBasis {
        &self.basis
    }

    /// Atom pair `(λ, μ)`.
    pub fn atom_values(&self, k: usize) -> (f64, f64) {
        let (i, j) = self.atoms[k];
        (self.a_values[i], self.b_values[j])
    }

    /// `Pr{(X, Y) = atom}` in the given state.
    pub fn distribution<'a>(&self, state: impl Into<QuantumState<'a>>) -> Result<Vec<f64>> {
        let state = state.into();
        let n = self.basis.ambient_dim();
        let weight = |g: &ComplexVector| -> Result<f64> {
            Ok(match state {
                QuantumState::Wave(s) => {
                    ensure_dim(n, s.dim())?;
                    g.dotc(s.vec()).norm_sqr()
                }
                QuantumState::Density(d) => {
                    ensure_dim(n, d.dim())?;
                    g.dotc(&(d.matrix() * g)).re
                }
            })
        };
        let mut out = vec![0.0; self.atoms.len()];
        for (g, &k) in self.basis.vectors().iter().zip(&self.zeta) {
            out[k] += weight(g)?;
        }
        Ok(out)
    }

    /// Full `|Λ| x |Λ'|` table, row-major, zero on pairs that never occur.
    pub fn table<'a>(&self, state: impl Into<QuantumState<'a>>) -> Result<Vec<f64>> {
        let dist = self.distribution(state)?;
        let mut table = vec![0.0; self.a_values.len() * self.b_values.len()];
        for (&(i, j), p) in self.atoms.iter().zip(dist) {
            table[i * self.b_values.len() + j] += p;
        }
        Ok(table)
    }

    /// Marginals of [`Self::table`] over `Λ` and over `Λ'`.
    pub fn marginals<'a>(&self, state: impl Into<QuantumState<'a>>) -> Result<(Vec<f64>, Vec<f64>)> {
        let table = self.table(state)?;
        let nb = self.b_values.len();
        let mut pa = vec![0.0; self.a_values.len()];
        let mut pb = vec![0.0; nb];
        for (k, p) in table.iter().enumerate() {
            pa[k / nb] += p;
            pb[k % nb] += p;
        }
        Ok((pa, pb))
    }
}

#[derive(Debug, Clone)]
pub enum Heisenberg {
    Commute(JointObservable),
    NotCommute { commutator_norm: f64 },
}

impl Heisenberg {
    pub fn commutes(&self) -> bool {
        matches!(self, Heisenberg::Commute(_))
    }
}

fn nearest(values: &[f64], x: f64) -> usize {
    (0..values.len())
        .min_by(|&i, &j| (values[i] - x).abs().total_cmp(&(values[j] - x).abs()))
        .expect("measurement has at least one value")
}

/// Commute iff `‖AB - BA‖ ≤ tol`; then also builds the joint observable.
pub fn heisenberg_check(a: &Measurement, b: &Measurement, tol: f64) -> Result<Heisenberg> {
    ensure_dim(a.dim(), b.dim())?;
    let norm = commutator_norm(a.matrix(), b.matrix());
    if norm > tol {
        return Ok(Heisenberg::NotCommute {
            commutator_norm: norm,
        });
    }
    let basis = common_eigenbasis(a.matrix(), b.matrix(), tol.max(1e-10))?.ok_or_else(|| {
        Error::Numerical("commuting pair without a common eigenbasis".into())
    })?;
    let rayleigh =
        |m: &ComplexMatrix, g: &ComplexVector| g.dotc(&(m * g)).re;
    let mut atoms: Vec<(usize, usize)> = Vec::new();
    let mut zeta = Vec::with_capacity(basis.dim());
    for g in basis.vectors() {
        let pair = (
            nearest(a.values(), rayleigh(a.matrix(), g)),
            nearest(b.values(), rayleigh(b.matrix(), g)),
        );
        let k = match atoms.iter().position(|&p| p == pair) {
            Some(k) => k,
            None => {
                atoms.push(pair);
                atoms.len() - 1
            }
        };
        zeta.push(k);
    }
    Ok(Heisenberg::Commute(JointObservable {
        a_values: a.values().to_vec(),
        b_values: b.values().to_vec(),
        atoms,
        zeta,
        basis,
    }))
}

/// `E(XY) = tr(A B D)` for commuting `A`, `B`.
pub fn pairwise_expectation<'a>(
    a: &Measurement,
    b: &Measurement,
    d: impl Into<QuantumState<'a>>,
) -> Result<f64> {
    ensure_dim(a.dim(), b.dim())?;
    let scale = (a.matrix().norm() * b.matrix().norm()).max(1.0);
    let norm = commutator_norm(a.matrix(), b.matrix());
    if norm > COMMUTE_TOL * scale {
        return Err(Error::NotJointlyRepresentable { norm });
    }
    let ab = a.matrix() * b.matrix();
    let z = match d.into() {
        QuantumState::Wave(s) => {
            ensure_dim(a.dim(), s.dim())?;
            s.vec().dotc(&(&ab * s.vec()))
        }
        QuantumState::Density(d) => {
            ensure_dim(a.dim(), d.dim())?;
            (&ab * d.matrix()).trace()
        }
    };
    if z.im.abs() > COMMUTE_TOL * scale {
        return Err(Error::Numerical(format!(
            "tr(ABD) has imaginary part {:e}",
            z.im
        )));
    }
    Ok(z.re)
}
