//! Lamb-wave dispersion in isotropic plates and time-of-arrival estimation for
//! guided-wave signals.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dispersion;
pub mod error;
pub mod estimators;
pub mod fft;
pub mod harness;
pub mod plot;
pub mod signal;
pub mod tfa;

pub use error::{Error, Result};
