//! Channel analysis toolkit for sub-GHz massive MIMO.
//!
//! The crate is `no_std` (it needs `alloc`) and holds every numerical piece:
//!
//! - [`tensor`] and [`geometry`]: CSI tensors indexed `[snapshot][subcarrier][antenna]`,
//!   measurement metadata and half-wavelength ULA/URA layouts.
//! - [`synth`]: seeded Rayleigh, Rician and constant channels plus per-antenna
//!   large-scale profiles.
//! - [`metrics`]: time/frequency averaged gain, channel hardening, normalization,
//!   correlation coefficients and combined-gain series.
//! - [`srd860`]: ERP, duty cycle, occupied bandwidth, frame layouts and the band
//!   compliance check.
//! - [`linksim`]: uplink SNR series, outage and required transmit power.
//!
//! File formats and the command-line front end live in the `sgmimo` crate.
//!
//! Enable the `parallel` feature to spread generation and Monte-Carlo loops over a
//! rayon pool. Every random draw is keyed by `(seed, index)` so results do not depend
//! on the number of threads.

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` is used on purpose so NaN lands on the error path
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod geometry;
pub mod linksim;
pub mod metrics;
pub mod srd860;
pub mod synth;
pub mod tensor;

mod math;
mod par;
mod rng;

pub use error::{Error, Result};
pub use geometry::{build_array_geometry, ArrayGeometry, Layout};
pub use tensor::{ChannelTensor, Dims, GainProfile, MeasurementMeta, Scenario};

/// Complex sample type used throughout the crate.
pub type Complex = num_complex::Complex64;
