//! Scenario files.
//!
//! A scenario is a TOML document that fully defines one reproducible run.
//! Geometry is given in a local ENU frame; towers may alternatively be placed
//! by latitude/longitude relative to `deployment.origin`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::antenna::AntennaArrayConfig;
use crate::control::{BsDatabase, HandoverParams};
use crate::deployment::{ChannelParams, Deployment, Sector, SectorPattern};
use crate::geokin::{to_enu, EnuPosition, GeoPosition, Trajectory, DEFAULT_TICK_S};
use crate::linkmetrics::{PowerControlParams, ThroughputMap};
use crate::{Error, Result};

/// Maximum sectors per tower; cell ids are `tower_id * 10 + sector_index`.
pub const MAX_SECTORS_PER_TOWER: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Selected patch on the main port, monopole on the auxiliary port.
    #[default]
    Directional,
    /// Monopole on the main port only.
    Omni,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Directional => "directional",
            Mode::Omni => "omni",
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "directional" => Ok(Mode::Directional),
            "omni" => Ok(Mode::Omni),
            other => Err(Error::config("mode", format!("unknown mode '{other}' (directional | omni)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectorySpec {
    /// `[east, north]` in metres; the flight altitude comes from `altitude`.
    pub waypoints: Vec<[f64; 2]>,
    /// m/s. Exactly one of `speed` and `speed_kmh` must be given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speed: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speed_kmh: Option<f64>,
    #[serde(default)]
    pub heading: f64,
    #[serde(default = "default_tick")]
    pub tick: f64,
}

fn default_tick() -> f64 {
    DEFAULT_TICK_S
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SectorDefaults {
    pub downtilt: f64,
    pub tx_power: f64,
    pub bandwidth_rb: u32,
    pub carrier_freq: f64,
}

impl Default for SectorDefaults {
    fn default() -> Self {
        Self {
            downtilt: 6.0,
            tx_power: 46.0,
            bandwidth_rb: 50,
            carrier_freq: 1800.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<u32>,
    /// `[east, north]` in metres.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<[f64; 2]>,
    /// `[latitude, longitude]`, requires `deployment.origin`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub latlon: Option<[f64; 2]>,
    #[serde(default = "default_tower_height")]
    pub height: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sector_azimuths: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub downtilt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tx_power: Option<f64>,
}

fn default_tower_height() -> f64 {
    30.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeploymentSpec {
    /// `[latitude, longitude]` of the ENU origin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<[f64; 2]>,
    #[serde(default = "default_sector_azimuths")]
    pub sector_azimuths: Vec<f64>,
    #[serde(default)]
    pub sector: SectorDefaults,
    #[serde(default)]
    pub pattern: SectorPattern,
    pub towers: Vec<TowerSpec>,
}

fn default_sector_azimuths() -> Vec<f64> {
    vec![0.0, 120.0, 240.0]
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BeamOptions {
    /// Minimum seconds between antenna switches; 0 disables the dwell timer.
    pub dwell: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReplayOptions {
    /// Cell the switch replay steers toward; defaults to the initial serving cell.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub serving_cell: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub mode: Mode,
    /// Flight altitude above ground, metres.
    pub altitude: f64,
    /// Fraction of interfering resource elements occupied.
    #[serde(default = "default_load")]
    pub load: f64,
    pub trajectory: TrajectorySpec,
    pub deployment: DeploymentSpec,
    #[serde(default)]
    pub channel: ChannelParams,
    #[serde(default)]
    pub antenna: AntennaArrayConfig,
    #[serde(default)]
    pub beam: BeamOptions,
    #[serde(default)]
    pub power_control: PowerControlParams,
    #[serde(default)]
    pub throughput: ThroughputMap,
    #[serde(default)]
    pub handover: HandoverParams,
    #[serde(default)]
    pub replay: ReplayOptions,
}

fn default_load() -> f64 {
    1.0
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::config("scenario", format!("{}: {e}", path.as_ref().display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_altitude(mut self, altitude: f64) -> Self {
        self.altitude = altitude;
        self
    }

    /// Hash of everything except the antenna mode, so the two arms of an
    /// A/B comparison share a fingerprint.
    pub fn fingerprint(&self) -> Result<String> {
        let canonical = self.clone().with_mode(Mode::Directional).to_toml()?;
        let digest = Sha256::digest(canonical.as_bytes());
        Ok(digest.iter().take(8).map(|b| format!("{b:02x}")).collect())
    }

    pub fn speed_mps(&self) -> Result<f64> {
        match (self.trajectory.speed, self.trajectory.speed_kmh) {
            (Some(v), None) => Ok(v),
            (None, Some(kmh)) => Ok(kmh / 3.6),
            (Some(_), Some(_)) => Err(Error::config("trajectory", "give either speed or speed_kmh, not both")),
            (None, None) => Err(Error::config("trajectory.speed", "missing (speed or speed_kmh)")),
        }
    }

    pub fn trajectory(&self) -> Result<Trajectory> {
        let waypoints = self
            .trajectory
            .waypoints
            .iter()
            .map(|[e, n]| EnuPosition::new(*e, *n, self.altitude))
            .collect();
        let t = Trajectory {
            waypoints,
            speed: self.speed_mps()?,
            heading: self.trajectory.heading,
            tick: self.trajectory.tick,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn sectors(&self) -> Result<Vec<Sector>> {
        let dep = &self.deployment;
        if dep.towers.is_empty() {
            return Err(Error::config("deployment.towers", "at least one tower is required"));
        }
        let origin = dep
            .origin
            .map(|[lat, lon]| GeoPosition::new(lat, lon, 0.0))
            .transpose()
            .map_err(|e| Error::config("deployment.origin", e.to_string()))?;

        let mut sectors = Vec::new();
        for (i, tower) in dep.towers.iter().enumerate() {
            let path = format!("deployment.towers[{i}]");
            let id = tower.id.unwrap_or(i as u32 + 1);
            let (east, north) = match (tower.position, tower.latlon) {
                (Some([e, n]), None) => (e, n),
                (None, Some([lat, lon])) => {
                    let origin = origin.as_ref().ok_or_else(|| {
                        Error::config(format!("{path}.latlon"), "requires deployment.origin")
                    })?;
                    let p = GeoPosition::new(lat, lon, 0.0)
                        .map_err(|e| Error::config(format!("{path}.latlon"), e.to_string()))?;
                    let enu = to_enu(origin, &p);
                    (enu.east, enu.north)
                }
                _ => return Err(Error::config(path, "exactly one of position or latlon is required")),
            };
            if !(tower.height.is_finite() && tower.height >= 0.0) {
                return Err(Error::config(format!("{path}.height"), "must be finite and >= 0"));
            }
            let azimuths = tower.sector_azimuths.as_ref().unwrap_or(&dep.sector_azimuths);
            if azimuths.is_empty() || azimuths.len() > MAX_SECTORS_PER_TOWER {
                return Err(Error::config(
                    format!("{path}.sector_azimuths"),
                    format!("need 1..={MAX_SECTORS_PER_TOWER} sectors"),
                ));
            }
            for (j, az) in azimuths.iter().enumerate() {
                sectors.push(Sector {
                    cell_id: id
                        .checked_mul(MAX_SECTORS_PER_TOWER as u32)
                        .and_then(|c| c.checked_add(j as u32))
                        .ok_or_else(|| Error::config(format!("{path}.id"), "too large"))?,
                    tower_position: EnuPosition::new(east, north, tower.height),
                    azimuth: *az,
                    downtilt: tower.downtilt.unwrap_or(dep.sector.downtilt),
                    tx_power_total: tower.tx_power.unwrap_or(dep.sector.tx_power),
                    bandwidth_rb: dep.sector.bandwidth_rb,
                    carrier_freq: dep.sector.carrier_freq,
                });
            }
        }
        Ok(sectors)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.altitude.is_finite() && self.altitude >= 0.0) {
            return Err(Error::config("altitude", "must be finite and >= 0"));
        }
        if !(0.0..=1.0).contains(&self.load) {
            return Err(Error::config("load", "must be in [0, 1]"));
        }
        if !(self.beam.dwell.is_finite() && self.beam.dwell >= 0.0) {
            return Err(Error::config("beam.dwell", "must be >= 0"));
        }
        self.antenna.validate("antenna")?;
        self.power_control.validate("power_control")?;
        self.throughput.validate("throughput")?;
        self.handover.validate("handover")?;
        self.trajectory()?;
        let sectors = self.sectors()?;
        if let Some(cell) = self.replay.serving_cell {
            if !sectors.iter().any(|s| s.cell_id == cell) {
                return Err(Error::config("replay.serving_cell", format!("unknown cell {cell}")));
            }
        }
        Ok(())
    }
}

/// A validated scenario with its derived runtime objects.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub deployment: Deployment,
    pub trajectory: Trajectory,
    pub bs_db: BsDatabase,
}

impl Scenario {
    pub fn new(config: ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let deployment = Deployment::new(config.sectors()?, config.deployment.pattern, config.channel)?;
        let trajectory = config.trajectory()?;
        let bs_db = BsDatabase::from_deployment(&deployment);
        Ok(Self {
            config,
            deployment,
            trajectory,
            bs_db,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::new(ScenarioConfig::load(path)?)
    }
}
