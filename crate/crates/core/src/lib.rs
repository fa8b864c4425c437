//! Spectral Galerkin simulation of the stochastic hyperviscous vorticity
//! equations on the 3-torus, with Girsanov reweighting between the full
//! and transport-only systems.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod checks;
pub mod cli;
pub mod config;
pub mod dynamics;
pub mod error;
mod fft;
pub mod field;
pub mod girsanov;
pub mod lattice;
pub mod noise;
pub mod nonlinear;
pub mod operators;
pub mod rng;
pub mod transform;

pub use error::{HvError, Result};
