//! Statistics of discrete-time linear evolutions: stability,
//! Cesàro limits, generalized Markov chains, quantum dynamics and joint
//! observability. See `examples/` for one runnable program per capability.

pub mod cli;
pub mod corpus;
pub mod error;
pub mod evolution;
pub mod jointness;
pub mod markov;
pub mod quantum;
pub mod sampling;
pub mod scenario;
pub mod spectral;

pub use error::{Error, Result};
