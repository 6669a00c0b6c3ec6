//! Observables and generalized Markov chains on evolutions: distributions,
//! indicator chains, limit distributions, random walks, hidden chains and
//! the prediction-vector evolution of finite-dimensional processes.

mod observable;
mod process;
mod walk;

pub use observable::{
    chain_distributions, indicator_chain, limit_distribution, DistributionSeries,
    LimitDistribution, Observable, DISTRIBUTION_TOL,
};
pub use process::{
    enumerate_process_marginals, process_evolution, process_marginal, ProcessModel,
    ENUMERATION_LIMIT, VALIDATION_DEPTH,
};
pub use walk::{hidden_observable, random_walk_evolution};
