//! Quantum observation statistics over finite-dimensional Hilbert spaces.
//!
//! Hermitian `d x d` matrices are handled as real vectors of length `d²`
//! through [`HermitianBasis`], which turns conjugations and channels into
//! plain real matrices and hence into [`Evolution`](crate::evolution::Evolution)s.

mod gudder;
mod hermitian;
mod schrodinger;
mod state;

pub use gudder::{
    conjugation_channel, gudder_step, probe_densities, walk_path_probability, GudderWalk,
};
pub use hermitian::HermitianBasis;
pub use schrodinger::{schrodinger_evolution, SchrodingerEvolution};
pub use state::{
    born_probabilities, measurement_expectation, trace_functional, Expectation,
    GeneralizedDensity, Measurement, QuantumState, WaveFunction, QUANTUM_TOL,
};
