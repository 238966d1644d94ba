//! Failure-probability analysis for random linear network coding (RLNC) on
//! single-source multicast networks.
//!
//! The library computes analytic upper and lower bounds on the probability
//! that some sink (or one specific sink) cannot decode, evaluates them in
//! exact rational arithmetic, and validates them against exhaustive
//! enumeration of the coding-coefficient space and Monte Carlo simulation
//! over finite fields.
//!
//! Modules:
//! - [`gfield`]: GF(q) arithmetic and rank computation.
//! - [`network`]: acyclic multigraph model, min cuts, disjoint paths, file I/O.
//! - [`cuts`]: the path-cut sequences and their (m_k, n_k) profiles.
//! - [`bounds`]: exact-rational bound evaluation and field-size sweeps.
//! - [`sim`]: kernel propagation, Monte Carlo estimation, exact enumeration.
//! - [`generators`]: canonical and randomized test networks.
//! - [`cli`]: the `rlnc-bounds` command-line front end.
//!
//! The crate's `examples/` directory holds one runnable example per major
//! capability; `cargo run --example analyze_butterfly` is a good start.

pub mod bounds;
pub mod cli;
pub mod cuts;
mod error;
pub mod generators;
pub mod gfield;
pub mod network;
pub mod report;
pub mod sim;

pub use error::{Error, Result};
