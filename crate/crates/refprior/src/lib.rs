//! Objective ("reference") prior construction for one-parameter models.
//!
//! The crate has three layers:
//!
//! * [`models`] — a zoo of built-in one-parameter sampling models behind the
//!   [`models::Model`] trait, with samplers, sufficient statistics and fast
//!   likelihood evaluators.
//! * [`numerics`] — adaptive Gauss–Legendre quadrature (log-space and signed),
//!   special functions, and monotone-cubic interpolation of tabulated priors.
//! * [`divergence`], [`information`], [`reference`] — the statistical layer:
//!   posterior discrepancy diagnostics, expected-information functionals, and
//!   the Monte Carlo / closed-form prior constructions themselves.
//!
//! The [`cli`] module wires everything into a batch front end driven by a JSON
//! run configuration.

pub mod cli;
pub mod divergence;
pub mod error;
pub mod information;
pub mod models;
pub mod numerics;
pub mod reference;
pub mod rng;

pub use error::{Error, Result};
