//! A self-contained branch-and-cut laboratory.
//!
//! The crate bundles a small MIP stack (instances, an LP simplex, Gomory
//! cuts), a branch-and-cut engine whose node/cut/branch decisions are driven
//! by parameterized scoring functions, probes that measure the piecewise
//! structure of the resulting cost surface, and calculators for the
//! sample-complexity bounds that structure implies.

pub mod bounds;
pub mod cuts;
pub mod engine;
pub mod error;
pub mod exec;
pub mod instance;
pub mod lab;
pub mod logmag;
pub mod policy;
pub mod probe;
pub mod rng;
pub mod simplex;

pub use error::{Error, Result};
