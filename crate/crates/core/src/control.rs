//! Beam selection toward the serving base station and the A3 handover
//! state machine.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::antenna::AntennaArrayConfig;
use crate::deployment::Deployment;
use crate::geokin::{bearing_elevation, normalize_360, wrap_180, EnuPosition, UavState};
use crate::linkmetrics::ModemReport;
use crate::{Error, Result};

/// Angular slack when comparing face offsets; keeps the lower-index tie rule
/// stable against round-off in the bearing.
pub const TIE_TOLERANCE_DEG: f64 = 1e-9;

/// A-priori base-station locations, keyed by cell id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BsDatabase {
    positions: BTreeMap<u32, EnuPosition>,
}

impl BsDatabase {
    pub fn from_deployment(dep: &Deployment) -> Self {
        Self {
            positions: dep.sectors().iter().map(|s| (s.cell_id, s.tower_position)).collect(),
        }
    }

    pub fn insert(&mut self, cell_id: u32, position: EnuPosition) {
        self.positions.insert(cell_id, position);
    }

    pub fn position(&self, cell_id: u32) -> Result<EnuPosition> {
        self.positions
            .get(&cell_id)
            .copied()
            .ok_or_else(|| Error::config("serving_cell_id", format!("cell {cell_id} not in base-station database")))
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Face whose boresight is closest to the serving BS, or `None` when the UAV
/// is horizontally on top of it (caller keeps its previous choice).
pub fn select_antenna(uav: &UavState, serving_pos: &EnuPosition, cfg: &AntennaArrayConfig) -> Option<usize> {
    let d = bearing_elevation(&uav.position, serving_pos);
    if d.degenerate {
        return None;
    }
    Some(nearest_face(d.bearing - uav.heading, cfg))
}

/// Index of the face nearest to `relative_bearing` (degrees from the heading).
pub fn nearest_face(relative_bearing: f64, cfg: &AntennaArrayConfig) -> usize {
    let r = normalize_360(relative_bearing);
    let mut best = 0;
    let mut best_off = f64::INFINITY;
    for (i, face) in cfg.face_azimuths.iter().enumerate() {
        let off = wrap_180(r - face).abs();
        if off < best_off - TIE_TOLERANCE_DEG {
            best = i;
            best_off = off;
        }
    }
    best
}

/// Stateful wrapper around [`select_antenna`] that counts switches and
/// optionally enforces a minimum dwell between them.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamSelector {
    current: usize,
    last_switch: Option<f64>,
    dwell: f64,
    switch_count: usize,
}

impl BeamSelector {
    pub fn new(initial: usize, dwell: f64) -> Self {
        Self {
            current: initial,
            last_switch: None,
            dwell,
            switch_count: 0,
        }
    }

    pub fn current(&self) -> usize {
        self.current
    }

    pub fn switch_count(&self) -> usize {
        self.switch_count
    }

    /// Updates the selection for this tick; returns whether the face changed.
    pub fn update(&mut self, uav: &UavState, serving_pos: &EnuPosition, cfg: &AntennaArrayConfig) -> bool {
        let Some(next) = select_antenna(uav, serving_pos, cfg) else {
            return false;
        };
        if next == self.current {
            return false;
        }
        if let Some(t) = self.last_switch {
            if uav.time - t < self.dwell - 1e-9 {
                return false;
            }
        }
        self.current = next;
        self.last_switch = Some(uav.time);
        self.switch_count += 1;
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HandoverParams {
    /// dB
    pub hysteresis: f64,
    /// seconds
    pub time_to_trigger: f64,
}

impl Default for HandoverParams {
    fn default() -> Self {
        Self {
            hysteresis: 3.0,
            time_to_trigger: 0.6,
        }
    }
}

impl HandoverParams {
    pub fn validate(&self, path: &str) -> Result<()> {
        if !(self.hysteresis.is_finite() && self.hysteresis >= 0.0) {
            return Err(Error::config(format!("{path}.hysteresis"), "must be >= 0"));
        }
        if !(self.time_to_trigger.is_finite() && self.time_to_trigger >= 0.0) {
            return Err(Error::config(format!("{path}.time_to_trigger"), "must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HandoverEvent {
    pub time_ms: u64,
    pub from: u32,
    pub to: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MobilityState {
    pub serving_cell_id: u32,
    pub candidate_cell_id: Option<u32>,
    pub candidate_timer: f64,
    pub handover_log: Vec<HandoverEvent>,
}

impl MobilityState {
    pub fn new(serving_cell_id: u32) -> Self {
        Self {
            serving_cell_id,
            candidate_cell_id: None,
            candidate_timer: 0.0,
            handover_log: Vec::new(),
        }
    }

    pub fn handover_count(&self) -> usize {
        self.handover_log.len()
    }

    fn clear_candidate(&mut self) {
        self.candidate_cell_id = None;
        self.candidate_timer = 0.0;
    }
}

/// One A3 evaluation. The best neighbour must beat the serving cell's
/// reported RSRP by strictly more than the hysteresis for `time_to_trigger`
/// seconds of consecutive ticks; a different best neighbour restarts the timer.
pub fn handover_step(state: &mut MobilityState, report: &ModemReport, hp: &HandoverParams, tick: f64) -> Option<HandoverEvent> {
    debug_assert_eq!(report.serving_cell_id, state.serving_cell_id);
    let serving = report.serving().reported_rsrp;
    let Some(best) = report.best_neighbor() else {
        state.clear_candidate();
        return None;
    };
    if best.reported_rsrp <= serving + hp.hysteresis {
        state.clear_candidate();
        return None;
    }
    if state.candidate_cell_id == Some(best.cell_id) {
        state.candidate_timer += tick;
    } else {
        state.candidate_cell_id = Some(best.cell_id);
        state.candidate_timer = tick;
    }
    // tick sums such as 0.2 + 0.2 + 0.2 land a hair off 0.6
    if state.candidate_timer + 1e-9 >= hp.time_to_trigger {
        let event = HandoverEvent {
            time_ms: (report.time * 1000.0).round() as u64,
            from: state.serving_cell_id,
            to: best.cell_id,
        };
        state.handover_log.push(event);
        state.serving_cell_id = best.cell_id;
        state.clear_candidate();
        return Some(event);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linkmetrics::CellMeasurement;
    use proptest::prelude::*;

    fn uav(heading: f64) -> UavState {
        UavState {
            position: EnuPosition::new(0.0, 0.0, 40.0),
            heading,
            time: 0.0,
            speed: 1.0,
        }
    }

    fn at_bearing(bearing: f64) -> EnuPosition {
        let r = bearing.to_radians();
        EnuPosition::new(500.0 * r.sin(), 500.0 * r.cos(), 30.0)
    }

    #[test]
    fn selection_examples() {
        let cfg = AntennaArrayConfig::default();
        assert_eq!(select_antenna(&uav(0.0), &at_bearing(0.0), &cfg), Some(0));
        assert_eq!(select_antenna(&uav(0.0), &at_bearing(100.0), &cfg), Some(2));
        assert_eq!(select_antenna(&uav(0.0), &EnuPosition::new(500.0, 0.0, 30.0), &cfg), Some(1));
        assert_eq!(select_antenna(&uav(0.0), &at_bearing(320.0), &cfg), Some(5));
        // exactly between faces 5 and 0: lower index wins
        assert_eq!(select_antenna(&uav(0.0), &at_bearing(330.0), &cfg), Some(0));
        assert_eq!(select_antenna(&uav(0.0), &EnuPosition::new(0.0, 0.0, 30.0), &cfg), None);
    }

    #[test]
    fn selector_keeps_face_when_degenerate() {
        let cfg = AntennaArrayConfig::default();
        let mut sel = BeamSelector::new(3, 0.0);
        assert!(!sel.update(&uav(0.0), &EnuPosition::new(0.0, 0.0, 0.0), &cfg));
        assert_eq!(sel.current(), 3);
        assert!(sel.update(&uav(0.0), &at_bearing(0.0), &cfg));
        assert_eq!(sel.switch_count(), 1);
    }

    #[test]
    fn selector_dwell() {
        let cfg = AntennaArrayConfig::default();
        let mut sel = BeamSelector::new(0, 1.0);
        let mut u = uav(0.0);
        assert!(sel.update(&u, &at_bearing(60.0), &cfg));
        u.time = 0.4;
        assert!(!sel.update(&u, &at_bearing(120.0), &cfg));
        u.time = 1.0;
        assert!(sel.update(&u, &at_bearing(120.0), &cfg));
        assert_eq!(sel.current(), 2);
    }

    fn report(time: f64, serving: (u32, f64), neighbor: (u32, f64)) -> ModemReport {
        let m = |(id, r): (u32, f64)| CellMeasurement {
            cell_id: id,
            data_port_rsrp: r,
            aux_port_rsrp: None,
            reported_rsrp: r,
        };
        let mut measurements = vec![m(serving), m(neighbor)];
        measurements.sort_by(|a, b| b.reported_rsrp.total_cmp(&a.reported_rsrp));
        ModemReport {
            time,
            serving_cell_id: serving.0,
            measurements,
            serving_rsrp: serving.1,
            rssi: 0.0,
            rsrq: 0.0,
            sinr_dl: 0.0,
        }
    }

    #[test]
    fn handover_after_time_to_trigger() {
        let hp = HandoverParams::default();
        let mut st = MobilityState::new(1);
        assert!(handover_step(&mut st, &report(0.0, (1, -80.0), (2, -76.0)), &hp, 0.2).is_none());
        assert!(handover_step(&mut st, &report(0.2, (1, -80.0), (2, -76.0)), &hp, 0.2).is_none());
        let ev = handover_step(&mut st, &report(0.4, (1, -80.0), (2, -76.0)), &hp, 0.2).unwrap();
        assert_eq!(ev, HandoverEvent { time_ms: 400, from: 1, to: 2 });
        assert_eq!(st.serving_cell_id, 2);
        assert_eq!(st.handover_count(), 1);
        assert_eq!(st.candidate_cell_id, None);
    }

    #[test]
    fn lapsed_condition_resets() {
        let hp = HandoverParams::default();
        let mut st = MobilityState::new(1);
        handover_step(&mut st, &report(0.0, (1, -80.0), (2, -76.0)), &hp, 0.2);
        handover_step(&mut st, &report(0.2, (1, -80.0), (2, -76.0)), &hp, 0.2);
        assert!((st.candidate_timer - 0.4).abs() < 1e-12);
        assert!(handover_step(&mut st, &report(0.4, (1, -80.0), (2, -79.0)), &hp, 0.2).is_none());
        assert_eq!(st.candidate_cell_id, None);
        assert_eq!(st.candidate_timer, 0.0);
        assert!(handover_step(&mut st, &report(0.6, (1, -80.0), (2, -76.0)), &hp, 0.2).is_none());
        assert_eq!(st.handover_count(), 0);
    }

    #[test]
    fn exact_hysteresis_does_not_trigger() {
        let hp = HandoverParams {
            hysteresis: 3.0,
            time_to_trigger: 0.0,
        };
        let mut st = MobilityState::new(1);
        assert!(handover_step(&mut st, &report(0.0, (1, -80.0), (2, -77.0)), &hp, 0.2).is_none());
        assert!(handover_step(&mut st, &report(0.2, (1, -80.0), (2, -76.9)), &hp, 0.2).is_some());
    }

    proptest! {
        #[test]
        fn selection_rotation_invariant(bearing in 0.0f64..360.0, heading in 0.0f64..360.0, rot in 0.0f64..360.0) {
            let cfg = AntennaArrayConfig::default();
            // keep clear of the 30-degree boundaries where round-off picks a side
            let rel = normalize_360(bearing - heading);
            prop_assume!(((rel - 30.0).rem_euclid(60.0)).min(60.0 - (rel - 30.0).rem_euclid(60.0)) > 1e-6);
            let a = nearest_face(bearing - heading, &cfg);
            let b = nearest_face((bearing + rot) - (heading + rot), &cfg);
            prop_assert_eq!(a, b);
        }

        #[test]
        fn selected_face_within_thirty_degrees(rel in -720.0f64..720.0) {
            let cfg = AntennaArrayConfig::default();
            let i = nearest_face(rel, &cfg);
            prop_assert!(wrap_180(rel - cfg.face_azimuths[i]).abs() <= 30.0 + 1e-6);
        }

        #[test]
        fn handover_log_is_chained(deltas in proptest::collection::vec(-10.0f64..10.0, 1..200)) {
            let hp = HandoverParams::default();
            let mut st = MobilityState::new(1);
            let mut last_count = 0;
            for (k, d) in deltas.iter().enumerate() {
                let s = st.serving_cell_id;
                let other = if s == 1 { 2 } else { 1 };
                handover_step(&mut st, &report(k as f64 * 0.2, (s, -80.0), (other, -80.0 + d)), &hp, 0.2);
                prop_assert!(st.handover_count() >= last_count);
                prop_assert!(st.candidate_timer <= hp.time_to_trigger + 1e-9);
                last_count = st.handover_count();
            }
            for w in st.handover_log.windows(2) {
                prop_assert_eq!(w[0].to, w[1].from);
            }
        }
    }
}
