//! Constructive harmonic analysis on homogeneous nilpotent groups:
//! anisotropic dilations and norms, dyadic decomposition of multipliers,
//! group-convolution composition of kernels with additive order
//! arithmetic, and application of the resulting pseudodifferential
//! operators to sampled functions.
//!
//! The `examples/` directory has one runnable example per capability; the
//! thin `hgc` binary drives batch experiments from JSON configs.

pub mod error;
pub mod group;
pub mod grid;
pub mod halton;
pub mod multiplier;

pub use error::{HgcError, Result};
pub use grid::{Grid, GridFunction};
pub use group::{HomogeneousGroup, Multiindex};
