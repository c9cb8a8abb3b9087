//! Exact and certified computations for commuting maps of the torus.
//!
//! The crate is `no_std` (it needs `alloc`) and carries only pure algorithms:
//!
//! - [`spectral`]: characteristic polynomials, certified eigenvalue disks,
//!   topological entropy and the κ entropy fraction.
//! - [`action`]: commutation, multiplicative dependence, commuting partners
//!   and bounded rank-one factor scans.
//! - [`symbolic`]: avoid-ball sets of `×b` as subshifts of finite type,
//!   Perron data and Parry-measure sampling.
//! - [`orbits`]: fixed-point orbit iteration with in-band precision
//!   tracking, ε-density verdicts and avoid-ball checks.
//! - [`bounds`]: the entropy → dimension inequality chain.
//! - [`averaging`]: push-forwards and Cesàro averages of grid measures.
//! - [`cartan`]: root-system entropy for Cartan elements of `sl_n` products.
//!
//! File formats, the command line and parallel sweeps live in the
//! companion `toral-lab` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod action;
pub mod approx;
pub mod averaging;
pub mod bounds;
pub mod cartan;
mod error;
pub mod matrix;
pub mod orbits;
pub mod poly;
pub mod roots;
pub mod spectral;
pub use spectral::{EntropyReport, SpectralData, ToralMap};
pub mod symbolic;

pub use approx::Approx;
pub use error::{Error, Result};
pub use matrix::{IntMatrix, RatMatrix};
pub use poly::IntPoly;

