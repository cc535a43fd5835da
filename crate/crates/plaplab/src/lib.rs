//! Numerical laboratory for degenerate matrix-weighted p-Laplace problems.
//!
//! The crate bundles:
//!
//! - SPD matrix algebra with spectral exp/log ([`spd`]),
//! - matrix weight fields with logarithmic means over balls ([`weight`], [`ball`]),
//! - sampled-ball oscillation estimators: log-BMO seminorms, Muckenhoupt
//!   brackets, weighted-BMO comparison quantities ([`oscillation`]),
//! - power-type and shifted N-functions with their vector maps ([`orlicz`]),
//! - polygonal Lipschitz domains, boundary charts, flattening maps and
//!   triangulations ([`domain`], [`mesh`]),
//! - P1 finite elements for the weighted linear and p-Laplace Dirichlet
//!   problems ([`solver`]),
//! - grid maximal operators, weighted norms and the corner sharpness
//!   experiment ([`grid`], [`norms`], [`corner`], [`sweep`]),
//! - a reproducible batch front end ([`run`]).
//!
//! Start with the runnable examples (`cargo run --release --example
//! corner_sharpness`) for end-to-end usage.

pub mod ball;
// pub mod corner;
pub mod domain;
pub mod error;
// pub mod grid;
pub mod mesh;
// pub mod norms;
pub mod orlicz;
pub mod oscillation;
// pub mod run;
pub mod solver;
// pub mod sparse;
pub mod spd;
// pub mod sweep;
pub mod weight;

pub use ball::{Ball, BallQuadrature, QuadratureSpec};
pub use error::{Error, Result};
pub use spd::{matrix_exp, matrix_log, SpdMatrix, SymMatrix};
pub use weight::{MatrixWeightField, WeightFamily};
