//! Local geometry and UAV kinematics.
//!
//! Everything downstream works in a flat East-North-Up frame. Geographic
//! coordinates are only an ingestion convenience and are projected with a
//! spherical equirectangular approximation, which is accurate to well under a
//! metre over the couple of kilometres a flight spans.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Mean Earth radius used by the small-area projection.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Horizontal distance below which a bearing is undefined.
pub const DEGENERATE_HORIZONTAL_M: f64 = 1e-6;

/// Default modem reporting period.
pub const DEFAULT_TICK_S: f64 = 0.2;

/// Wraps an angle to `[-180, 180)`.
pub fn wrap_180(deg: f64) -> f64 {
    let w = (deg + 180.0).rem_euclid(360.0) - 180.0;
    // rem_euclid can round up to exactly 360 for tiny negative inputs
    if w >= 180.0 {
        w - 360.0
    } else {
        w
    }
}

/// Normalizes an angle to `[0, 360)`.
pub fn normalize_360(deg: f64) -> f64 {
    let w = deg.rem_euclid(360.0);
    if w >= 360.0 {
        0.0
    } else {
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPosition {
    latitude: f64,
    longitude: f64,
    altitude: f64,
}

impl GeoPosition {
    pub fn new(latitude: f64, longitude: f64, altitude: f64) -> Result<Self> {
        if !(-90.0..=90.0).contains(&latitude) {
            return Err(Error::config("latitude", format!("{latitude} outside [-90, 90]")));
        }
        if !(-180.0..=180.0).contains(&longitude) {
            return Err(Error::config("longitude", format!("{longitude} outside [-180, 180]")));
        }
        if !altitude.is_finite() || altitude < 0.0 {
            return Err(Error::config("altitude", format!("{altitude} must be finite and >= 0")));
        }
        Ok(Self {
            latitude,
            longitude,
            altitude,
        })
    }

    pub fn latitude(&self) -> f64 {
        self.latitude
    }

    pub fn longitude(&self) -> f64 {
        self.longitude
    }

    pub fn altitude(&self) -> f64 {
        self.altitude
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnuPosition {
    pub east: f64,
    pub north: f64,
    pub up: f64,
}

impl EnuPosition {
    pub const fn new(east: f64, north: f64, up: f64) -> Self {
        Self { east, north, up }
    }

    pub fn is_finite(&self) -> bool {
        self.east.is_finite() && self.north.is_finite() && self.up.is_finite()
    }

    pub fn horizontal_distance(&self, other: &EnuPosition) -> f64 {
        (other.east - self.east).hypot(other.north - self.north)
    }

    pub fn distance(&self, other: &EnuPosition) -> f64 {
        let dz = other.up - self.up;
        self.horizontal_distance(other).hypot(dz)
    }

    fn lerp(&self, other: &EnuPosition, frac: f64) -> EnuPosition {
        EnuPosition {
            east: self.east + (other.east - self.east) * frac,
            north: self.north + (other.north - self.north) * frac,
            up: self.up + (other.up - self.up) * frac,
        }
    }
}

/// Projects `p` into the ENU frame centred on `origin`.
pub fn to_enu(origin: &GeoPosition, p: &GeoPosition) -> EnuPosition {
    let deg = std::f64::consts::PI / 180.0;
    let north = (p.latitude - origin.latitude) * deg * EARTH_RADIUS_M;
    let east = (p.longitude - origin.longitude) * deg * EARTH_RADIUS_M * (origin.latitude * deg).cos();
    EnuPosition {
        east,
        north,
        up: p.altitude - origin.altitude,
    }
}

/// Direction from one point to another.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    /// Clockwise from north, `[0, 360)`.
    pub bearing: f64,
    /// Positive when the target is above the source, `[-90, 90]`.
    pub elevation: f64,
    /// Set when the points coincide horizontally; `bearing` is then 0.
    pub degenerate: bool,
}

pub fn bearing_elevation(from: &EnuPosition, to: &EnuPosition) -> Direction {
    let de = to.east - from.east;
    let dn = to.north - from.north;
    let du = to.up - from.up;
    let horizontal = de.hypot(dn);
    let degenerate = horizontal < DEGENERATE_HORIZONTAL_M;
    let bearing = if degenerate {
        0.0
    } else {
        normalize_360(de.atan2(dn).to_degrees())
    };
    Direction {
        bearing,
        elevation: du.atan2(horizontal).to_degrees(),
        degenerate,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UavState {
    pub position: EnuPosition,
    /// Clockwise from north, `[0, 360)`.
    pub heading: f64,
    pub time: f64,
    pub speed: f64,
}

/// A constant-speed, constant-heading polyline flight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub waypoints: Vec<EnuPosition>,
    /// m/s
    pub speed: f64,
    /// Airframe heading in degrees, independent of the direction of travel.
    pub heading: f64,
    /// Sampling period in seconds.
    pub tick: f64,
}

impl Trajectory {
    pub fn new(waypoints: Vec<EnuPosition>, speed: f64, heading: f64) -> Result<Self> {
        let t = Self {
            waypoints,
            speed,
            heading,
            tick: DEFAULT_TICK_S,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn with_tick(mut self, tick: f64) -> Result<Self> {
        self.tick = tick;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.waypoints.len() < 2 {
            return Err(Error::config("trajectory.waypoints", "need at least two waypoints"));
        }
        for (i, w) in self.waypoints.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::config(format!("trajectory.waypoints[{i}]"), "non-finite coordinate"));
            }
        }
        for (i, pair) in self.waypoints.windows(2).enumerate() {
            if pair[0].distance(&pair[1]) < 1e-9 {
                return Err(Error::config(
                    format!("trajectory.waypoints[{}]", i + 1),
                    "coincides with the previous waypoint",
                ));
            }
        }
        if !(self.speed.is_finite() && self.speed > 0.0) {
            return Err(Error::config("trajectory.speed", "must be > 0"));
        }
        if !(self.tick.is_finite() && self.tick > 0.0) {
            return Err(Error::config("trajectory.tick", "must be > 0"));
        }
        if !self.heading.is_finite() {
            return Err(Error::config("trajectory.heading", "must be finite"));
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.waypoints.windows(2).map(|p| p[0].distance(&p[1])).sum()
    }

    pub fn duration(&self) -> f64 {
        self.length() / self.speed
    }

    /// Position after travelling `s` metres along the polyline (clamped to the ends).
    pub fn position_at(&self, s: f64) -> EnuPosition {
        let mut remaining = s.max(0.0);
        for pair in self.waypoints.windows(2) {
            let len = pair[0].distance(&pair[1]);
            if remaining <= len {
                return pair[0].lerp(&pair[1], remaining / len);
            }
            remaining -= len;
        }
        *self.waypoints.last().expect("validated trajectory")
    }
}

/// Samples the flight every `tick` seconds from t = 0, always including the
/// final waypoint. A last partial tick is emitted at the true arrival time.
pub fn sample_trajectory(t: &Trajectory) -> Result<Vec<UavState>> {
    t.validate()?;
    let heading = normalize_360(t.heading);
    let duration = t.duration();
    // absorb round-off when the duration is an exact multiple of the tick
    let full_ticks = (duration / t.tick + 1e-9).floor() as usize;
    let mut times: Vec<f64> = (0..=full_ticks).map(|k| k as f64 * t.tick).collect();
    let last = *times.last().expect("at least t = 0");
    if duration - last > 1e-9 * t.tick.max(1.0) {
        times.push(duration);
    }
    let n = times.len();
    Ok(times
        .into_iter()
        .enumerate()
        .map(|(k, time)| {
            let position = if k + 1 == n {
                *t.waypoints.last().expect("validated trajectory")
            } else {
                t.position_at(time * t.speed)
            };
            UavState {
                position,
                heading,
                time,
                speed: t.speed,
            }
        })
        .collect())
}
