//! Joint observability: marginal coupling, commutativity and Bell tests.

mod bell;
mod coupling;
mod heisenberg;
pub mod simplex;

pub use bell::{
    bell_inequality_check, bell_counterexample_density, bell_counterexample, BellReport, BellCounterexample,
    BELL_COUNTEREXAMPLE_MEASUREMENTS,
};
pub use coupling::{
    coupling_feasibility, eight_atom_feasibility, Arithmetic, CouplingProblem, CouplingReport,
    CouplingVerdict, CrossCheck, EightAtomSolution, FarkasCertificate, MarginalConstraint, Table,
    TriplePairTables, CROSS_CHECK_ATOMS, MAX_ATOMS,
};
pub use heisenberg::{
    heisenberg_check, pairwise_expectation, Heisenberg, JointObservable, COMMUTE_TOL,
};
