//! Stationary localised radial patterns (spots, rings and gaps) in a
//! two-component dryland vegetation model.
//!
//! The crate covers the full path from closed-form bifurcation data to
//! numerical branch tracing:
//!
//! * [`model`] — model parameters, uniform states, reduced (large water
//!   diffusivity) constants, spatial eigenvalues and normal-form
//!   coefficients, plus the Turing onset of the full system.
//! * [`bessel`] — Bessel functions used by linear solutions and
//!   leading-order profiles.
//! * [`amplitude`] — Ginzburg-Landau ground states on the half-line and
//!   leading-order spot/ring/gap profiles.
//! * [`grid`] / [`linalg`] — radial finite differences and banded linear
//!   algebra.
//! * [`solver`] — residual, analytic Jacobian and damped Newton for the
//!   full and reduced systems.
//! * [`continuation`] — pseudo-arclength branch tracing with fold
//!   detection.
//! * [`stability`] — radial spectral stability of computed profiles.
//! * [`config`] / [`report`] / [`scenario`] — scenario configuration and
//!   the file outputs behind the `drypatch` command-line tool.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod amplitude;
pub mod bessel;
pub mod config;
pub mod continuation;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod model;
pub mod report;
pub mod scenario;
pub mod solver;
pub mod stability;

pub use error::{Error, Result};
