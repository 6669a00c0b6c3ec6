use thiserror::Error;

use crate::evolution::Verdict;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("non-finite entry in {what}")]
    NonFinite { what: &'static str },
    #[error("start vector is zero; the evolution space is empty")]
    ZeroStart,
    #[error("eigenvalue modulus cluster straddles the band cut {cut} (moduli {low}..{high})")]
    BandAmbiguity { cut: f64, low: f64, high: f64 },
    #[error("eigenvalue {re}{im:+}i is defective (algebraic multiplicity exceeds geometric)")]
    DefectiveEigenvalue { re: f64, im: f64 },
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },
    #[error("basis is not orthonormal (worst deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },
    #[error("evolution is not stable (verdict: {verdict:?})")]
    NotStable { verdict: Verdict },
    #[error("not a distribution at t={t}, label {label}: value {value}")]
    NotADistribution { t: usize, label: String, value: f64 },
    #[error("limit is not a distribution at label {label}: value {value}")]
    LimitNotADistribution { label: String, value: f64 },
    #[error("unknown label {0}")]
    UnknownLabel(String),
    #[error("column {column} of the transition matrix is not a probability distribution")]
    NotStochastic { column: usize },
    #[error("invalid process model at word {word:?}: {reason}")]
    InvalidModel { word: Vec<usize>, reason: String },
    #[error("problem too large: {size} exceeds limit {limit}")]
    TooLarge { size: u128, limit: u128 },
    #[error("invalid channel from site {from} to site {to}: {reason}")]
    InvalidChannel { from: usize, to: usize, reason: String },
    #[error("channels leaving site {from} carry total trace {total}, expected 1")]
    ChannelTraceMismatch { from: usize, total: f64 },
    #[error("trace leak: total trace {total} after step")]
    TraceLeak { total: f64 },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("measurements do not commute (commutator norm {norm:e})")]
    NotJointlyRepresentable { norm: f64 },
    #[error("expectation {value} outside [-1, 1]")]
    OutOfRange { value: f64 },
    #[error("inconsistent constraints: {0}")]
    InconsistentConstraints(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for failures of the numerics or of a statistical invariant on
    /// otherwise well-formed input; false for malformed or invalid input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::BandAmbiguity { .. }
                | Error::DefectiveEigenvalue { .. }
                | Error::NotStable { .. }
                | Error::NotADistribution { .. }
                | Error::LimitNotADistribution { .. }
                | Error::TraceLeak { .. }
                | Error::Numerical(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
