//! Numerical calculus for set-valued functions F : (a, b) → K(ℝⁿ).
//!
//! Compact sets are represented by finite point clouds ([`CompactSet`]).
//! On top of the exact metric constructions in [`set_core`] the crate
//! provides first metric divided differences and one-sided metric
//! derivatives ([`calculus`]), local metric linear approximants together
//! with empirical approximation-order estimates ([`approximant`]), and a
//! small gallery of set-valued functions to run them on ([`svf`]).

// `!(a < b)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approximant;
pub mod calculus;
mod error;
pub mod set_core;
pub mod svf;

pub use error::{Error, Result};
pub use set_core::{CompactSet, MetricPairSet, Point, Tolerances};
