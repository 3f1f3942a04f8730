//! Drift detection on unlabeled streams via margin density.

pub mod classifiers;
pub mod data;
pub mod detectors;
pub mod error;
pub mod harness;
pub mod induction;
pub mod margin;
pub mod seed;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
