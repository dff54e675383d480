//! Far-field gain models for the switched patch array and the monopole.
//!
//! The patch pattern is a separable quadratic roll-off (in dB) clamped at the
//! front-to-back ratio. The monopole is treated as perfectly omni-directional.

use serde::{Deserialize, Serialize};

use crate::geokin::{wrap_180, Direction};
use crate::{Error, Result};

/// Roll-off of a quadratic-in-dB pattern: 3 dB at half the beamwidth.
#[inline]
pub(crate) fn quadratic_rolloff(az_off: f64, el_off: f64, hpbw_az: f64, hpbw_el: f64) -> f64 {
    12.0 * (az_off / hpbw_az).powi(2) + 12.0 * (el_off / hpbw_el).powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PatchPattern {
    /// Realized boresight gain, dBi.
    pub peak_gain: f64,
    pub hpbw_az: f64,
    pub hpbw_el: f64,
    /// dB; also the floor of the pattern relative to the peak.
    pub front_to_back: f64,
}

impl Default for PatchPattern {
    fn default() -> Self {
        Self {
            peak_gain: 6.4,
            hpbw_az: 70.0,
            hpbw_el: 61.0,
            front_to_back: 15.0,
        }
    }
}

impl PatchPattern {
    pub fn validate(&self, path: &str) -> Result<()> {
        if !self.peak_gain.is_finite() {
            return Err(Error::config(format!("{path}.peak_gain"), "must be finite"));
        }
        for (name, v) in [("hpbw_az", self.hpbw_az), ("hpbw_el", self.hpbw_el)] {
            if !(v > 0.0 && v <= 180.0) {
                return Err(Error::config(format!("{path}.{name}"), "must be in (0, 180]"));
            }
        }
        if !(self.front_to_back > 0.0 && self.front_to_back.is_finite()) {
            return Err(Error::config(format!("{path}.front_to_back"), "must be > 0"));
        }
        Ok(())
    }

    /// Gain in dBi at the given angular offsets from boresight.
    pub fn gain(&self, az_off: f64, el_off: f64) -> f64 {
        let az_off = wrap_180(az_off);
        let loss = quadratic_rolloff(az_off, el_off, self.hpbw_az, self.hpbw_el);
        self.peak_gain - loss.min(self.front_to_back)
    }
}

pub fn patch_gain(p: &PatchPattern, az_off: f64, el_off: f64) -> f64 {
    p.gain(az_off, el_off)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OmniPattern {
    pub gain: f64,
}

impl Default for OmniPattern {
    fn default() -> Self {
        Self { gain: 2.0 }
    }
}

pub fn omni_gain(o: &OmniPattern, _el_off: f64) -> f64 {
    o.gain
}

/// Geometry of the hexagonal patch array plus the reference monopole.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AntennaArrayConfig {
    /// Face boresights in degrees relative to the airframe heading. Face 0
    /// looks along the heading.
    pub face_azimuths: Vec<f64>,
    pub boresight_elevation: f64,
    pub patch: PatchPattern,
    pub omni: OmniPattern,
}

impl Default for AntennaArrayConfig {
    fn default() -> Self {
        Self {
            face_azimuths: (0..6).map(|i| i as f64 * 60.0).collect(),
            boresight_elevation: 0.0,
            patch: PatchPattern::default(),
            omni: OmniPattern::default(),
        }
    }
}

impl AntennaArrayConfig {
    pub fn n_faces(&self) -> usize {
        self.face_azimuths.len()
    }

    pub fn validate(&self, path: &str) -> Result<()> {
        if self.face_azimuths.is_empty() {
            return Err(Error::config(format!("{path}.face_azimuths"), "need at least one face"));
        }
        for (i, a) in self.face_azimuths.iter().enumerate() {
            if !a.is_finite() {
                return Err(Error::config(format!("{path}.face_azimuths[{i}]"), "must be finite"));
            }
            for (j, b) in self.face_azimuths.iter().enumerate().take(i) {
                if wrap_180(a - b).abs() < 1e-9 {
                    return Err(Error::config(
                        format!("{path}.face_azimuths[{i}]"),
                        format!("duplicates face {j} modulo 360"),
                    ));
                }
            }
        }
        if !self.boresight_elevation.is_finite() {
            return Err(Error::config(format!("{path}.boresight_elevation"), "must be finite"));
        }
        self.patch.validate(&format!("{path}.patch"))?;
        if !self.omni.gain.is_finite() {
            return Err(Error::config(format!("{path}.omni.gain"), "must be finite"));
        }
        Ok(())
    }

    /// Gain of face `antenna_index` toward `direction` for a UAV with `heading`.
    pub fn gain(&self, antenna_index: usize, heading: f64, direction: &Direction) -> Result<f64> {
        let face = self.face_azimuths.get(antenna_index).ok_or_else(|| {
            Error::config(
                "antenna_index",
                format!("{antenna_index} out of range for {} faces", self.n_faces()),
            )
        })?;
        let az_off = wrap_180(direction.bearing - heading - face);
        let el_off = direction.elevation - self.boresight_elevation;
        Ok(self.patch.gain(az_off, el_off))
    }
}

pub fn array_gain(cfg: &AntennaArrayConfig, antenna_index: usize, heading: f64, direction: &Direction) -> Result<f64> {
    cfg.gain(antenna_index, heading, direction)
}
