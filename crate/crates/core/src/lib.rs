//! Physical-signature classification from multi-sensor recordings.
//!
//! The pipeline runs in stages, each usable on its own:
//!
//! 1. [`synthgen`] renders synthetic recordings for a group of targets.
//! 2. [`spectral`] cuts random one-second blocks and keeps the 1..=300 Hz
//!    magnitude bins.
//! 3. [`fuse_select`] averages the selected channels into one 300-bin row
//!    and picks the bins whose class-mean to grand-mean ratio stands out.
//! 4. [`dnn`] is a three-layer sigmoid network trained with Adam on a
//!    per-class sigmoid cross-entropy.
//! 5. [`trainer`] loads rows, splits, trains in 150-row runs and scores
//!    the result with a confusion matrix that has an `Unclassified` column.

pub mod dnn;
pub mod error;
pub mod fuse_select;
pub mod rng;
pub mod spectral;
pub mod synthgen;
pub mod trainer;

pub use error::{Error, Result};

/// Highest retained frequency; also the number of bins per spectrum.
pub const MAX_FREQ_HZ: usize = 300;
