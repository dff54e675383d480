use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use uavbeam_core::harness::output::{self, SUMMARY_FILE};
use uavbeam_core::harness::{compare_modes, render_table, replay_switch, run_grid, run_scenario, Mode, Scenario, ScenarioConfig};
use uavbeam_core::par::Execution;
use uavbeam_core::Error;

/// Overrides the default output directory of `run` and `grid`.
const OUT_DIR_ENV: &str = "UAVBEAM_OUT_DIR";

#[derive(Parser)]
#[command(name = "uavbeam", version, about = "Switched-beam UAV on LTE: system-level simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Overrides {
    /// directional | omni
    #[arg(long)]
    mode: Option<Mode>,
    /// Flight altitude in metres
    #[arg(long)]
    altitude: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

impl Overrides {
    fn apply(&self, mut cfg: ScenarioConfig) -> ScenarioConfig {
        if let Some(m) = self.mode {
            cfg.mode = m;
        }
        if let Some(a) = self.altitude {
            cfg.altitude = a;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one flight and write ticks.csv, handovers.csv and summary.toml
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Compare two run directories (a - b)
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Also write the comparison as TOML
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Antenna index along the path while steering at a fixed cell
    ReplaySwitch {
        #[arg(long)]
        scenario: PathBuf,
        /// CSV destination; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run both antenna modes at each altitude and print the comparison table
    Grid {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "10,40")]
        altitudes: Vec<f64>,
        #[arg(long)]
        sequential: bool,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config { .. } | Error::Parse(_) | Error::Mismatch(_) => 2,
        Error::Numeric(_) | Error::Geometry(_) => 3,
        Error::Io(_) | Error::Csv(_) | Error::Serialize(_) => 1,
    }
}

fn out_dir(explicit: Option<PathBuf>) -> PathBuf {
    explicit
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn load(path: &Path, overrides: &Overrides) -> Result<Scenario, Error> {
    Scenario::new(overrides.apply(ScenarioConfig::load(path)?))
}

fn execute(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::Run {
            scenario,
            out,
            overrides,
        } => {
            let s = load(&scenario, &overrides)?;
            let result = run_scenario(&s)?;
            let dir = out_dir(out);
            output::write_run(&dir, &result)?;
            let sm = &result.summary;
            println!(
                "{} [{} @ {} m]: {} ticks, median RSRP {:.2} dBm, median RSRQ {:.2} dB, median UL {:.2} Mbit/s, {} handovers, {} switches -> {}",
                sm.name,
                sm.mode,
                sm.altitude,
                sm.ticks,
                sm.rsrp.median,
                sm.rsrq.median,
                sm.ul_tput.median,
                sm.handover_count,
                sm.switch_event_count,
                dir.display()
            );
        }
        Command::Compare { a, b, out } => {
            let sa = output::read_summary(a.join(SUMMARY_FILE))?;
            let sb = output::read_summary(b.join(SUMMARY_FILE))?;
            let report = compare_modes(&sa, &sb)?;
            print!("{}", render_table(std::slice::from_ref(&report)));
            if let Some(path) = out {
                output::write_comparison(path, &report)?;
            }
        }
        Command::ReplaySwitch {
            scenario,
            out,
            overrides,
        } => {
            let s = load(&scenario, &overrides)?;
            let replay = replay_switch(&s)?;
            match out {
                Some(path) => output::write_switch_samples(std::fs::File::create(path)?, &replay.samples)?,
                None => {
                    let stdout = std::io::stdout();
                    let mut lock = stdout.lock();
                    output::write_switch_samples(&mut lock, &replay.samples)?;
                    lock.flush()?;
                }
            }
            eprintln!(
                "target cell {}: {} switch events",
                replay.target_cell_id, replay.switch_count
            );
        }
        Command::Grid {
            scenario,
            out,
            altitudes,
            sequential,
        } => {
            let cfg = ScenarioConfig::load(&scenario)?;
            let exec = if sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            };
            let grid = run_grid(&cfg, &altitudes, exec)?;
            let dir = out_dir(out);
            let mut reports = Vec::with_capacity(grid.len());
            for cell in &grid {
                let base = dir.join(format!("alt_{}", cell.altitude));
                output::write_run(base.join("directional"), &cell.directional)?;
                output::write_run(base.join("omni"), &cell.omni)?;
                reports.push(cell.comparison()?);
            }
            print!("{}", render_table(&reports));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
