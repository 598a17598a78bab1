//! Numerical study of the long-wave KdV limit of the one-dimensional
//! Gross-Pitaevskii equation.
//!
//! The crate is layered bottom-up: [`spectral`] supplies Fourier operations on
//! periodic grids, [`gp`] and [`kdv`] integrate the two equations, [`bridge`]
//! maps GP states into the slow KdV frames, and [`experiments`] runs the
//! convergence studies and writes reports.

pub mod bridge;
pub mod error;
pub mod experiments;
pub mod field;
pub mod fit;
pub mod gp;
pub mod grid;
pub mod kdv;
pub mod snapshot;
pub mod spectral;

pub use error::{Error, ErrorKind, Result};
pub use field::{ComplexField, RealField};
pub use grid::SpectralGrid;
