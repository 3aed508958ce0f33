//! Clustering of noisy sampled signals with structured feature sparsity.
//!
//! The pipeline is: transform each signal into a feature domain where the
//! interesting structure concentrates on few coordinates (orthogonal wavelet
//! coefficients or translation-stable scattering coefficients), then run
//! K-means with per-feature weights chosen to maximize the weighted
//! between-cluster sum of squares under an L1 or group-structured norm budget.
//! Group budgets let whole blocks of features (wavelet scales, multivariate
//! slices, scattering paths) enter or leave together, which survives small
//! sample sizes far better than coordinate-wise selection.
//!
//! The crate is `no_std` + `alloc`; all IO and file formats live in the
//! companion CLI crate. Everything here is deterministic given a seed: the
//! only randomness source is ChaCha12 streams from the [`rng`] module.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod cluster;
pub mod dwt;
pub mod error;
pub mod eval;
pub mod fft;
pub mod rng;
pub mod scattering;
pub mod select;
pub mod signals;
pub mod simgen;

pub use error::{Error, Result};
