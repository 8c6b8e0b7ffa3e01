//! Matrix majorization of statistical experiments.
//!
//! An experiment is a nonnegative matrix whose columns are distributions over
//! a common outcome set. `P` majorizes `Q` when a column-stochastic matrix
//! maps every column of `P` to the matching column of `Q`. The crate decides
//! this exactly by linear programming, evaluates the additive and
//! multiplicative monotones that govern the large-sample and catalytic
//! versions of the order, certifies those versions on a finite parameter
//! grid, builds explicit catalysts, and applies all of it to thermal state
//! conversion for commuting states.

pub mod catalysis;
pub mod certify;
pub mod error;
pub mod experiment;
pub mod feasibility;
pub mod grid;
pub mod io;
mod lorenz;
pub mod monotone;
pub mod report;
mod simplex;
pub mod thermal;
pub mod universal;

pub use error::{Error, Result};
pub use experiment::{Experiment, IndexSet, SupportRegime};
pub use feasibility::{dichotomy_majorizes, majorizes, vector_majorizes, FeasibilityResult, FeasibilityStatus, LpOptions, StochasticMatrix};
pub use grid::GridSpec;
pub use certify::{CertReport, Mode, Verdict};
