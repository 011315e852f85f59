//! Crossroad route prediction at desk scale.
//!
//! A deterministic, self-contained implementation of a sensor-fusion route
//! predictor for vehicles approaching a crossroad:
//!
//! - [`radar`] turns emitted/reflected frequency pairs into velocities and
//!   the velocity-difference feature, and can simulate the reflected
//!   frequency for a known speed.
//! - [`plate`] renders synthetic license plates and recognizes them back by
//!   per-glyph template matching against a fixed 5x7 bitmap font.
//! - [`registry`] is the plate-keyed vehicle store that gates every run.
//! - [`learn`] holds the three from-scratch classifiers (k-NN, naive Bayes,
//!   decision tree), the dataset format, and the evaluation report.
//! - [`datagen`] generates reproducible training data from a seeded RNG.
//! - [`pipeline`] wires the stages into the per-vehicle state machine and
//!   the batch scoring harness.
//!
//! All randomness flows through [`rng::SplitMix64`], so every artifact the
//! crate produces is reproducible from a seed.

pub mod datagen;
pub mod error;
pub mod learn;
pub mod pipeline;
pub mod plate;
pub mod radar;
pub mod registry;
pub mod rng;

pub use error::{Error, Result};
