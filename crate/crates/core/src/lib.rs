//! Semiparametric density estimation: a parametric start density multiplied
//! by a kernel-estimated correction factor.
//!
//! The estimator at the heart of this crate is
//!
//! ```text
//! f̂(x) = f(x, θ̂) · (1/n) Σ K_h(X_i − x) / f(X_i, θ̂)
//! ```
//!
//! which reduces to the classic kernel estimator when the start is constant.
//! Around it sit the pieces needed to use and study it: kernels and their
//! moment constants, start families, bandwidth selectors, Hermite expansion
//! coefficients, exact MISE formulas for normal-mixture truths, a
//! multivariate sphered variant and a generalised Nadaraya–Watson smoother.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, the CLI and
//! parallel benchmark drivers live in the companion `semistart` crate.

#![no_std]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bandwidth;
pub mod densities;
mod error;
pub mod estimator;
pub mod exact_mise;
pub mod hermite;
pub mod kernels;
pub mod math;
pub mod multivariate;
pub mod quadrature;
pub mod regression;
pub mod starts;

pub use error::{Error, Result};

pub use bandwidth::{BandwidthChoice, BandwidthMethod};
pub use densities::{marron_wand, Component, NormalMixture};
pub use estimator::{estimate_kernel, DensityEstimate};
pub use exact_mise::MiseReport;
pub use hermite::HermiteCoeffs;
pub use kernels::{KernelShape, KernelSpec};
pub use starts::{FittedStart, StartFamily};

pub use nalgebra;
