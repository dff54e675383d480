//! Scenario ingestion, the simulation engine, metric aggregation and mode
//! comparison.

pub mod compare;
pub mod engine;
pub mod metrics;
pub mod output;
pub mod scenario;

pub use compare::{compare_modes, render_table, ComparisonReport};
pub use engine::{replay_switch, run_scenario, run_scenario_with, RunOutput, SwitchReplay, SwitchSample, TickRecord};
pub use metrics::{ecdf, quantile, RunSummary, Stats};
pub use scenario::{Mode, Scenario, ScenarioConfig};

use crate::par::{self, Execution};
use crate::Result;

/// Directional and omni runs of one scenario at one altitude.
#[derive(Debug, Clone)]
pub struct GridCell {
    pub altitude: f64,
    pub directional: RunOutput,
    pub omni: RunOutput,
}

impl GridCell {
    pub fn comparison(&self) -> Result<ComparisonReport> {
        compare_modes(&self.directional.summary, &self.omni.summary)
    }
}

/// Runs the mode x altitude grid. Each run is independent, so with
/// [`Execution::Parallel`] they are spread across threads; each run's inner
/// link table then uses the same policy.
pub fn run_grid(config: &ScenarioConfig, altitudes: &[f64], exec: Execution) -> Result<Vec<GridCell>> {
    let jobs: Vec<ScenarioConfig> = altitudes
        .iter()
        .flat_map(|&alt| {
            [Mode::Directional, Mode::Omni].map(|m| config.clone().with_altitude(alt).with_mode(m))
        })
        .collect();
    let mut runs = par::map(&jobs, exec, |cfg| {
        Scenario::new(cfg.clone()).and_then(|s| run_scenario_with(&s, exec))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?
    .into_iter();
    Ok(altitudes
        .iter()
        .map(|&altitude| GridCell {
            altitude,
            directional: runs.next().expect("two runs per altitude"),
            omni: runs.next().expect("two runs per altitude"),
        })
        .collect())
}
