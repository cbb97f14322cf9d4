//! Recursive distributional equations, recursive tree processes, and
//! numerical diagnostics of tail-triviality through the bivariate
//! uniqueness of the second kind.

pub mod cli;
pub mod dist;
pub mod error;
pub mod grid;
pub mod rde;
pub mod seed;
pub mod tail;
pub mod value;

pub use dist::{ks_distance, ClosedForm, Empirical, GridCdf, MarginalDist};
pub use error::{Error, Result};
pub use rde::{phi, Assignment, JointBoundary, PairSample, RdeKind, RdeSpec};
pub use seed::Seed;
pub use value::ExtendedValue;
