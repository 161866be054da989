//! Numerical laboratory for Blaschke products, Hardy-Orlicz interpolation
//! densities, Orlicz norms and Poisson balayage in the unit disk.
//!
//! Start from the runnable programs in `examples/`; each one exercises a
//! single capability end to end.

pub mod cli;
pub mod diagnostics;
pub mod dyadic;
pub mod error;
pub mod geometry;
pub mod harmonic;
pub mod numerics;
pub mod orlicz;
pub mod sequences;
pub mod spec;

pub use error::{LabError, Result};
pub use geometry::{
    log_blaschke_at, mobius_factor, normalize_angle, phi_lambda, pseudo_distance, BoundaryAngle, DiskPoint, LogModulus,
};
