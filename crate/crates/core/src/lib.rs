//! Simulation toolkit for high-power laser-damage attacks on the optical
//! attenuators of quantum key distribution transmitters.
//!
//! The crate covers four pipelines:
//!
//! * [`fiber`]: SRS/SBS thresholds that cap how much power an attacker can
//!   push back through the channel fiber.
//! * [`attenuator`] and [`campaign`]: phenomenological damage models for four
//!   attenuator classes and the stepwise test procedure that drives them.
//! * [`impact`]: attenuation change to mean-photon-number consequences.
//! * [`risk`]: Bayesian prediction of how many untested units share a
//!   vulnerability, from a small tested sample.
//!
//! All internal quantities are SI. Powers labelled `_dbm` and attenuations
//! labelled `_db` are the only logarithmic values.

pub mod attenuator;
pub mod campaign;
pub mod config;
pub mod error;
pub mod fiber;
pub mod impact;
pub mod risk;

pub use error::{Error, Result};
