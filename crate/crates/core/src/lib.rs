//! Simulation and numerical verification toolkit for vertex-reinforced jump
//! processes (VRJP) on finite wired graphs.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: finite weighted graphs with a wiring (pinning) vertex, the
//!   signed incidence matrix, the weighted Laplacian and a spanning-tree
//!   enumeration oracle.
//! - [`weights`]: Euclidean long-range, high-dimensional and hierarchical
//!   weight families, the digit-interleaving map between boxes and binary
//!   trees, and the explicit moment constants.
//! - [`environment`]: the random environment of the VRJP (the `u`-marginal of
//!   the bosonic H^{2|2} measure), quadrature oracles, a Metropolis sampler,
//!   Gaussian `s`-conditionals, Ward statistics and moment bounds.
//! - [`electrical`]: effective resistance, unit flows, Thomson and Rayleigh
//!   checks, the annuli flow on `Z^d`.
//! - [`vrjp`]: exact event-driven VRJP simulation and the annealed random walk
//!   in random conductances.
//! - [`transience`]: the visit-bound pipeline tying the pieces together.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod electrical;
pub mod environment;
mod error;
pub mod graph;
pub mod linalg;
pub mod quadrature;
pub mod stats;
pub mod transience;
pub mod vrjp;
pub mod weights;

pub use error::{Error, Result};
pub use graph::{PlusEdge, VertexId, WiredGraph};
