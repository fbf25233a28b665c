//! Loss of interference contrast in a two-path electron interferometer
//! driven by an oscillating electromagnetic field.
//!
//! The field imprints an Aharonov-Bohm phase ϑ(t0) = Re[C e^{-iωt0}] that
//! depends on the emission time t0. Averaging e^{iϑ} over t0 multiplies the
//! fringe amplitude by Υ = J0(|C|), which vanishes at |C| ≈ 2.405 and then
//! revives with decreasing peaks as the field grows.
//!
//! All internal quantities are in Lorentz-Heaviside natural units
//! (ħ = c = 1, eV powers); see [`units`].

pub mod cli;
pub mod closedform;
pub mod contrast;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod phase;
pub mod quadrature;
pub mod scan;
pub mod scenario;
pub mod units;

pub use error::{Error, Result};
