pub mod anneal;
pub mod baselines;
pub mod boost;
pub mod chimera;
pub mod datasets;
pub mod error;
pub mod eval;
pub mod experiments;
pub mod io;
pub mod qubo;
pub mod seed;

pub use error::{Error, Result};
pub use qubo::{Assignment, IsingProblem, QuboProblem};
