//! System-level simulator for a cellular-connected UAV carrying a
//! six-face switched patch array plus an omni-directional monopole.
//!
//! The crate is organised bottom-up:
//!
//! - [`geokin`]: local ENU geometry, bearings and trajectory sampling.
//! - [`antenna`]: parametric patch/monopole gain models and the array layout.
//! - [`deployment`]: towers, sectors and the propagation model.
//! - [`linkmetrics`]: RSSI/RSRQ/SINR, measurement reports, UL power control.
//! - [`control`]: beam selection and the A3 handover state machine.
//! - [`harness`]: scenario files, the tick engine, metrics and comparisons.
//!
//! With the `parallel` feature (on by default) the per-tick link tables and
//! multi-run grids are evaluated with rayon; without it everything runs on
//! the calling thread and produces identical output.

pub mod antenna;
pub mod control;
pub mod deployment;
mod error;
pub mod geokin;
pub mod harness;
pub mod linkmetrics;
pub mod par;
pub mod shadowing;

pub use error::{Error, Result};

/// Converts a power ratio in dB to linear scale.
#[inline]
pub fn db_to_lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to dB.
#[inline]
pub fn lin_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}
