//! Random lifts of multigraphs and their walk-subgroups.
//!
//! An `n`-lift of a base multigraph is built by orienting each edge and
//! assigning it a permutation of `{0, …, n-1}`: vertex `(u, i)` connects to
//! `(v, j)` over edge `(u, v)` with label `π` exactly when `π(i) = j`.
//! Products of edge labels along walks form a subgroup of the symmetric
//! group whose transitivity, order, and tuple-orbit structure control
//! connectivity, edge connectivity, and edge expansion of the lift.
//!
//! The crate provides:
//!
//! * [`graph`] — the multigraph model (loops and parallel edges allowed),
//!   deterministic spanning trees, cycle rank, and named graph families;
//! * [`perm`], [`group`], [`wreath`] — permutations, generated subgroups
//!   (orbits, stabilizer chain, k-transitivity), and iterated wreath
//!   product elements with their product-domain action;
//! * [`lift`] — random and iterated random lift assignments, walk
//!   products, walk-subgroup extraction, and walk lifting;
//! * [`analysis`] — connectivity, global minimum edge cuts, and exact
//!   edge expansion by subset enumeration;
//! * [`mc`] — a seeded, reproducible Monte Carlo harness with exact
//!   small-case enumeration oracles and closed-form comparison values.
//!
//! Trials run in parallel through rayon when the `parallel` feature
//! (default) is enabled. Per-trial RNG streams are derived from the master
//! seed by counter keying, so worker count never affects results.

pub mod analysis;
pub mod graph;
pub mod group;
pub mod lift;
pub mod mc;
pub mod perm;
pub mod wreath;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("graph is not connected")]
    Disconnected,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("signature mismatch: {left:?} vs {right:?}")]
    SignatureMismatch { left: Vec<usize>, right: Vec<usize> },
    #[error("point out of range: {point} not below {bound}")]
    OutOfRange { point: usize, bound: usize },
    #[error("budget exceeded: needs {needed}, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("size limit exceeded: {size} > {limit}")]
    SizeLimit { size: usize, limit: usize },
    #[error("invalid walk: {0}")]
    InvalidWalk(String),
    #[error("flat edge set is not a spanning tree: {0}")]
    NotSpanningTreeFlat(String),
    #[error("insufficient failures at n = {n}; raise the trial count")]
    InsufficientFailures { n: u64 },
    #[error("unknown formula: {0}")]
    UnknownFormula(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
