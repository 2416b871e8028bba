//! Ranked-amplitude (SRA) diagnostics for single-photon detector timestamps.
//!
//! The crate turns detector time tags into inter-arrival samples, sorts them
//! into sequences of ranged amplitudes, and fits three noise hypotheses:
//! Poisson dark counts, power-law afterpulsing and a saturating law. It can
//! locate where a fitted model stops describing the data and compare time
//! windows nonparametrically for drift. A detector simulator with known
//! ground truth backs the test suite and the runnable examples.
//!
//! | module | role |
//! |---|---|
//! | [`timestamps`] | tick parsing, sidecar metadata, inter-arrivals |
//! | [`sra`] | SRA curves, ECDF link, resampling, relative SRA |
//! | [`models`] | densities and closed-form SRA curves |
//! | [`fit`] | histogram and SRA fitting, applicability limits |
//! | [`sim`] | dark-count / afterpulse stream simulator |
//! | [`diagnostics`] | window comparison and rolling drift monitoring |
//! | [`cli`] | the `sra-diag` command |

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod fit;
pub mod models;
pub mod sim;
pub mod sra;
pub mod timestamps;

pub use error::{Error, ErrorClass, Result};
