//! Surface dynamics of a fluid layer of arbitrary depth: the nonlocal
//! generalized KdV equation, its dispersion relation, steady solitary waves
//! built from a power-series recursion, and pseudospectral time evolution.

pub mod dispersion;
pub mod error;
pub mod evolution;
pub mod field;
pub mod grid;
pub mod params;
pub mod spectral_ops;
pub mod summation;
pub mod traveling_wave;
pub mod verify;

pub use error::{Error, Result};
pub use field::SpectralField;
pub use grid::PeriodicGrid;
pub use params::PhysicalParams;
