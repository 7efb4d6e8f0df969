//! Exact-arithmetic toolkit for no-signaling Bell polytopes.
//!
//! The crate works with distribution matrices of the `(2,2,2)` scenario and of
//! the `(2,n,2)` chained Bell scenario. It validates them against the
//! probability and no-signaling constraints, splits nonlocal ones into a single
//! PR box plus local deterministic vertices, measures distances to the local
//! set and models detector loss. Everything that touches the polytope is exact
//! rational arithmetic; only the Kullback-Leibler path uses floating point.
//!
//! Rows are always stored in the chained order `a1b1, a2b1, a2b2, ..., anbn,
//! a1bn`. For `n = 2` this is `ab, a'b, a'b', ab'` in the `(2,2,2)` labels.

pub mod chained;
pub mod cli;
pub mod decomp222;
pub mod efficiency;
pub mod error;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod matrix;
pub mod metrics;
pub mod polytope;
pub mod rational;
pub mod relabel;
pub mod sampling;
pub mod vertex;

pub use error::{Error, Result};
pub use matrix::{
    mix, validate, Decomposition, DistributionMatrix, Outcome, Scenario, SettingsDistribution,
    Violation,
};
pub use rational::Q;
pub use vertex::{
    catalog_222, enumerate_gprs, enumerate_lds, Catalog222, GeneralizedPrBox, LocalDeterministic,
    RowType,
};
