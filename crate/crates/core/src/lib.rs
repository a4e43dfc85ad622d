//! Portable proxy of a gyrokinetic (CGYRO-style) kernel pipeline.
//!
//! The crate bundles five pieces that are meant to be used together when
//! studying where such a code spends its time:
//!
//! - [`grid`]: test-case shapes and a reproducible state generator.
//! - [`padding`]: dealiasing-padded FFT size planning over smooth numbers.
//! - [`spectral`]: transform contract, a direct DFT oracle and the
//!   dealiased pseudo-spectral Poisson bracket.
//! - [`kernels`]: the five proxy kernels (field, stream, shear, collision,
//!   nonlinear) with their `original` / `optimized` variants and a timer.
//! - [`commsim`]: an analytic all-to-all × all-reduce cost model over
//!   GPU-node topologies and a rank-grid planner.
//!
//! [`report`], [`verify`] and [`cli`] sit on top and drive the
//! `gyroproxy` binary.

pub mod cli;
pub mod commsim;
pub mod error;
pub mod grid;
pub mod kernels;
pub mod padding;
pub mod report;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
