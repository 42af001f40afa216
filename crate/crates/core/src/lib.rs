//! Non-Hermitian Hamiltonians on discrete quantum graphs.
//!
//! [`model`] assembles chain, star and loop lattices. [`spectral`] computes
//! and classifies spectra. [`dieudonne`] solves the intertwining relation
//! `H†P = PH` numerically. [`metric`] holds the closed-form pseudometric and
//! metrics and the hermitization `Ω H Ω⁻¹`. [`scan`] maps where the spectrum
//! stays real.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dieudonne;
pub mod error;
pub mod matrix;
pub mod metric;
pub mod model;
pub mod scan;
pub mod spectral;

#[cfg(feature = "cli")]
pub mod cli;
#[cfg(feature = "cli")]
pub mod verify;


pub use error::{Error, Result};
pub use matrix::{Complex64, MatrixJson, Meta, SquareMatrix};
pub use model::{Couplings, GraphSpec};
