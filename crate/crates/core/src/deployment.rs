//! Synthetic macro deployment and the air-to-ground propagation model.
//!
//! Path loss is free space plus a fixed-slope excess for links that are both
//! beyond the line-of-sight cutoff distance and received below rooftop level.

use serde::{Deserialize, Serialize};

use crate::antenna::quadratic_rolloff;
use crate::geokin::{bearing_elevation, wrap_180, Direction, EnuPosition};
use crate::shadowing::shadowing_db;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SectorPattern {
    pub gain: f64,
    pub hpbw_az: f64,
    pub hpbw_el: f64,
    pub attenuation_max: f64,
}

impl Default for SectorPattern {
    fn default() -> Self {
        Self {
            gain: 15.0,
            hpbw_az: 65.0,
            hpbw_el: 10.0,
            attenuation_max: 30.0,
        }
    }
}

impl SectorPattern {
    pub fn validate(&self, path: &str) -> Result<()> {
        if !self.gain.is_finite() {
            return Err(Error::config(format!("{path}.gain"), "must be finite"));
        }
        if !(self.hpbw_az > 0.0 && self.hpbw_az.is_finite()) {
            return Err(Error::config(format!("{path}.hpbw_az"), "must be > 0"));
        }
        if !(self.hpbw_el > 0.0 && self.hpbw_el.is_finite()) {
            return Err(Error::config(format!("{path}.hpbw_el"), "must be > 0"));
        }
        if !(self.attenuation_max > 0.0 && self.attenuation_max.is_finite()) {
            return Err(Error::config(format!("{path}.attenuation_max"), "must be > 0"));
        }
        Ok(())
    }
}

/// Gain of a sector antenna at offsets from its (downtilted) boresight.
pub fn sector_gain(sp: &SectorPattern, az_off: f64, el_off: f64) -> f64 {
    let loss = quadratic_rolloff(wrap_180(az_off), el_off, sp.hpbw_az, sp.hpbw_el);
    sp.gain - loss.min(sp.attenuation_max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelParams {
    /// Ground distance beyond which sub-rooftop links pick up NLOS excess.
    pub los_cutoff_distance: f64,
    pub rooftop_height: f64,
    /// dB of excess loss per metre the UAV sits below the rooftops.
    pub nlos_slope: f64,
    pub shadowing_sigma: f64,
    pub noise_figure_ue: f64,
    pub noise_figure_bs: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            los_cutoff_distance: 500.0,
            rooftop_height: 30.0,
            nlos_slope: 1.0,
            shadowing_sigma: 0.0,
            noise_figure_ue: 7.0,
            noise_figure_bs: 5.0,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self, path: &str) -> Result<()> {
        for (name, v) in [
            ("los_cutoff_distance", self.los_cutoff_distance),
            ("rooftop_height", self.rooftop_height),
            ("nlos_slope", self.nlos_slope),
            ("shadowing_sigma", self.shadowing_sigma),
            ("noise_figure_ue", self.noise_figure_ue),
            ("noise_figure_bs", self.noise_figure_bs),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::config(format!("{path}.{name}"), "must be finite and >= 0"));
            }
        }
        Ok(())
    }

    /// Excess loss for a UAV at `h_uav` whose ground distance to the tower is `ground_distance`.
    pub fn nlos_excess(&self, h_uav: f64, ground_distance: f64) -> f64 {
        if ground_distance > self.los_cutoff_distance {
            (self.nlos_slope * (self.rooftop_height - h_uav)).max(0.0)
        } else {
            0.0
        }
    }
}

/// Free-space path loss, `d` in metres and `f` in MHz.
pub fn fspl(d: f64, f_mhz: f64) -> f64 {
    32.45 + 20.0 * (d / 1000.0).log10() + 20.0 * f_mhz.log10()
}

/// Deterministic path loss (free space plus NLOS excess). Shadowing is added
/// separately per link, see [`Deployment::link_budget`].
pub fn pathloss(d: f64, f_mhz: f64, h_uav: f64, ground_distance: f64, cp: &ChannelParams) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::Geometry(format!("link distance {d} m must be > 0")));
    }
    Ok(fspl(d, f_mhz) + cp.nlos_excess(h_uav, ground_distance))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub cell_id: u32,
    /// Antenna position; `up` is the mast height.
    pub tower_position: EnuPosition,
    pub azimuth: f64,
    /// Degrees below the horizon.
    pub downtilt: f64,
    pub tx_power_total: f64,
    pub bandwidth_rb: u32,
    /// MHz
    pub carrier_freq: f64,
}

impl Sector {
    /// Reference-signal power per resource element, dBm.
    pub fn power_per_re(&self) -> f64 {
        self.tx_power_total - 10.0 * (12.0 * f64::from(self.bandwidth_rb)).log10()
    }

    /// Sector antenna gain toward `uav`.
    pub fn gain_toward(&self, pattern: &SectorPattern, uav: &EnuPosition) -> f64 {
        let d = bearing_elevation(&self.tower_position, uav);
        sector_gain(pattern, d.bearing - self.azimuth, d.elevation + self.downtilt)
    }
}

/// UAV-independent part of one downlink: everything except the UAV antenna gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    /// From the UAV toward the sector antenna.
    pub direction: Direction,
    /// Path loss including shadowing, dB.
    pub pathloss: f64,
    pub sector_gain: f64,
    /// RSRP an isotropic (0 dBi) UAV antenna would measure, dBm.
    pub rsrp_iso: f64,
}

impl LinkBudget {
    pub fn rsrp(&self, port_gain: f64) -> f64 {
        self.rsrp_iso + port_gain
    }
}

/// Immutable set of sectors sharing one antenna pattern and channel model.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    sectors: Vec<Sector>,
    pub pattern: SectorPattern,
    pub channel: ChannelParams,
}

impl Deployment {
    pub fn new(sectors: Vec<Sector>, pattern: SectorPattern, channel: ChannelParams) -> Result<Self> {
        if sectors.is_empty() {
            return Err(Error::config("deployment.towers", "deployment has no sectors"));
        }
        pattern.validate("deployment.pattern")?;
        channel.validate("channel")?;
        for (i, s) in sectors.iter().enumerate() {
            let path = format!("deployment.sectors[{i}]");
            if sectors[..i].iter().any(|o| o.cell_id == s.cell_id) {
                return Err(Error::config(format!("{path}.cell_id"), format!("duplicate cell id {}", s.cell_id)));
            }
            if s.bandwidth_rb == 0 {
                return Err(Error::config(format!("{path}.bandwidth_rb"), "must be > 0"));
            }
            if !(s.carrier_freq > 0.0 && s.carrier_freq.is_finite()) {
                return Err(Error::config(format!("{path}.carrier_freq"), "must be > 0"));
            }
            if !(s.tower_position.is_finite()
                && s.azimuth.is_finite()
                && s.downtilt.is_finite()
                && s.tx_power_total.is_finite())
            {
                return Err(Error::config(path, "non-finite sector parameter"));
            }
        }
        Ok(Self {
            sectors,
            pattern,
            channel,
        })
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn sector(&self, cell_id: u32) -> Option<&Sector> {
        self.sectors.iter().find(|s| s.cell_id == cell_id)
    }

    pub fn index_of(&self, cell_id: u32) -> Option<usize> {
        self.sectors.iter().position(|s| s.cell_id == cell_id)
    }

    pub fn link_budget(&self, sector: &Sector, uav: &EnuPosition, seed: u64) -> Result<LinkBudget> {
        let d = uav.distance(&sector.tower_position);
        let ground = uav.horizontal_distance(&sector.tower_position);
        let pl = pathloss(d, sector.carrier_freq, uav.up, ground, &self.channel)?
            + shadowing_db(self.channel.shadowing_sigma, seed, sector.cell_id);
        let g = sector.gain_toward(&self.pattern, uav);
        Ok(LinkBudget {
            direction: bearing_elevation(uav, &sector.tower_position),
            pathloss: pl,
            sector_gain: g,
            rsrp_iso: sector.power_per_re() + g - pl,
        })
    }

    /// Budgets toward every sector, in deployment order.
    pub fn link_budgets(&self, uav: &EnuPosition, seed: u64) -> Result<Vec<LinkBudget>> {
        self.sectors.iter().map(|s| self.link_budget(s, uav, seed)).collect()
    }
}

/// Downlink RSRP at a UAV antenna port with gain `port_gain`.
pub fn link_rsrp(
    sector: &Sector,
    pattern: &SectorPattern,
    uav: &EnuPosition,
    port_gain: f64,
    cp: &ChannelParams,
) -> Result<f64> {
    let d = uav.distance(&sector.tower_position);
    let ground = uav.horizontal_distance(&sector.tower_position);
    let pl = pathloss(d, sector.carrier_freq, uav.up, ground, cp)?;
    Ok(sector.power_per_re() + sector.gain_toward(pattern, uav) + port_gain - pl)
}
