//! The `run` verb.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use photomech_core::femcore::interface_jump_check;
use photomech_core::solvers::solve;

use crate::config::{ConfigError, ScenarioConfig};
use crate::error::CliError;
use crate::output::{
    snapshot_path, write_jumps, write_snapshot, write_trajectory, Manifest, RunInfo, JUMPS_FILE, MANIFEST_FILE,
    SNAPSHOT_DIR, TRAJECTORY_FILE,
};

pub const OUTPUT_DIR_ENV: &str = "PHOTOMECH_OUTPUT_DIR";

#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub directory: PathBuf,
    pub frames: usize,
    pub final_time: f64,
    pub wall_time_seconds: f64,
}

pub fn load_config(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| ConfigError {
        field: path.display().to_string(),
        line: None,
        message: format!("cannot read configuration: {e}"),
    })?;
    Ok(ScenarioConfig::parse(&text)?)
}

/// Output directory: an explicit override, then `$PHOTOMECH_OUTPUT_DIR/<name>`,
/// then the configured directory, then `output/<name>`.
pub fn output_directory(cfg: &ScenarioConfig, explicit: Option<&Path>) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    if let Some(root) = std::env::var_os(OUTPUT_DIR_ENV).filter(|v| !v.is_empty()) {
        return PathBuf::from(root).join(&cfg.name);
    }
    cfg.outputs.directory.clone().unwrap_or_else(|| PathBuf::from("output").join(&cfg.name))
}

pub fn run(config_path: &Path, explicit_output: Option<&Path>) -> Result<RunSummary, CliError> {
    let cfg = load_config(config_path)?;
    run_config(&cfg, &output_directory(&cfg, explicit_output))
}

pub fn run_config(cfg: &ScenarioConfig, dir: &Path) -> Result<RunSummary, CliError> {
    let start = Instant::now();
    let scenario = cfg.build()?;
    let traj = solve(&scenario, &cfg.solver)?;
    let model = &scenario.model;

    let snapshots = dir.join(SNAPSHOT_DIR);
    if snapshots.exists() {
        fs::remove_dir_all(&snapshots).map_err(CliError::io(&snapshots))?;
    }
    fs::create_dir_all(&snapshots).map_err(CliError::io(&snapshots))?;
    write_trajectory(&dir.join(TRAJECTORY_FILE), model, &traj)?;
    let last = traj.frames.len() - 1;
    let stride = cfg.outputs.snapshot_stride;
    for (k, f) in traj.frames.iter().enumerate() {
        if k == 0 || k == last || (stride > 0 && k % stride == 0) {
            write_snapshot(&snapshot_path(dir, k), model, &f.state)?;
        }
    }
    let jumps = interface_jump_check(model, &traj.last().state)?;
    write_jumps(&dir.join(JUMPS_FILE), &jumps)?;

    let summary = RunSummary {
        directory: dir.to_path_buf(),
        frames: traj.frames.len(),
        final_time: traj.last().state.time,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    Manifest {
        run: RunInfo {
            name: cfg.name.clone(),
            units: cfg.units.clone(),
            photomech_version: env!("CARGO_PKG_VERSION").to_string(),
            frames: summary.frames,
            final_time: summary.final_time,
            wall_time_seconds: summary.wall_time_seconds,
            max_interface_charge_residual: jumps.iter().fold(0.0, |m, j| f64::max(m, j.electric.abs())),
        },
        config: cfg.clone(),
    }
    .write(&dir.join(MANIFEST_FILE))?;
    Ok(summary)
}
