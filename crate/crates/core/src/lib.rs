//! Word-frequency statistics and hapax-rate models of vocabulary growth.
//!
//! The crate is organised bottom-up:
//!
//! - [`corpus`]: tokenization, frequency lists, spectra, rank tables and
//!   incremental curves of real texts;
//! - [`urnmodel`]: exact expectations for sampling from a finite urn or a
//!   memoryless source, with seeded Monte Carlo samplers;
//! - [`analytic`]: the correspondence between a hapax rate `h(u)` and a
//!   vocabulary size function `g(n)`, its spectrum and rank function, and
//!   smoothing of an empirical spectrum;
//! - [`models`]: the constant, Davis, linear, logistic, maximal and mixture
//!   families, plus ideal Zipf-law diagnostics;
//! - [`fitting`]: least-squares fitting of model families to smoothed curves.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod corpus;
pub mod error;
pub mod fitting;
pub mod format;
pub mod models;
pub mod numeric;
pub mod special;
pub mod urnmodel;

pub use error::{Error, Result};
