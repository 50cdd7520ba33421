//! Run artifacts: trajectory table, nodal snapshots, interface jumps and the
//! run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use photomech_core::femcore::{FacetJump, FieldState, Model};
use photomech_core::solvers::{Frame, Trajectory};
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::CliError;

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const SNAPSHOT_DIR: &str = "snapshots";
pub const JUMPS_FILE: &str = "jumps.csv";
pub const MANIFEST_FILE: &str = "manifest.toml";

pub const TRAJECTORY_COLUMNS: [&str; 15] = [
    "step",
    "t",
    "kinetic",
    "potential",
    "total",
    "dissipated",
    "external_work",
    "lambda_max",
    "free_space_rate_max",
    "constraint_residual",
    "newton_iterations",
    "residual_norm",
    "potential_max",
    "order_max",
    "displacement_max",
];

pub const SNAPSHOT_COLUMNS: [&str; 16] = [
    "node", "X1", "X2", "X3", "y", "x1", "x2", "x3", "trans1", "trans2", "trans3", "cis1", "cis2", "cis3", "lambda", "matter",
];

pub(crate) fn num(v: f64) -> String {
    format!("{v:.12e}")
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>, CliError> {
    let file = fs::File::create(path).map_err(CliError::io(path))?;
    Ok(csv::Writer::from_writer(file))
}

pub fn write_trajectory(path: &Path, model: &Model, traj: &Trajectory) -> Result<(), CliError> {
    let mut w = writer(path)?;
    let e = CliError::csv(path);
    w.write_record(TRAJECTORY_COLUMNS).map_err(e)?;
    for (k, f) in traj.frames.iter().enumerate() {
        w.write_record(trajectory_row(k, model, f)).map_err(CliError::csv(path))?;
    }
    w.flush().map_err(CliError::io(path))
}

fn trajectory_row(step: usize, model: &Model, f: &Frame) -> Vec<String> {
    let d = &f.diagnostics;
    let s = &f.state.fields;
    let pot = s.potential.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let order = s.order.iter().fold(0.0_f64, |m, y| m.max(y.trans.max_abs()).max(y.cis.max_abs()));
    let disp = s
        .placement
        .iter()
        .zip(&model.mesh.nodes)
        .fold(0.0_f64, |m, (x, x0)| m.max((*x - *x0).max_abs()));
    let mut row = vec![step.to_string(), num(f.state.time)];
    row.extend(
        [d.kinetic, d.potential, d.total, d.dissipated, d.external_work, d.potential_rate, d.free_space_rate, d.constraint_residual]
            .map(num),
    );
    row.push(d.newton_iterations.to_string());
    row.extend([d.residual_norm, pot, order, disp].map(num));
    row
}

pub fn snapshot_path(dir: &Path, step: usize) -> PathBuf {
    dir.join(SNAPSHOT_DIR).join(format!("step_{step:06}.csv"))
}

pub fn write_snapshot(path: &Path, model: &Model, state: &FieldState) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(SNAPSHOT_COLUMNS).map_err(CliError::csv(path))?;
    let f = &state.fields;
    for n in 0..model.mesh.n_nodes() {
        let x0 = model.mesh.nodes[n];
        let rate = state.rates.as_ref().map_or(0.0, |r| r.potential[n]);
        let mut row = vec![n.to_string()];
        row.extend(x0.0.map(num));
        row.push(num(f.potential[n]));
        row.extend(f.placement[n].0.map(num));
        row.extend(f.order[n].trans.0.map(num));
        row.extend(f.order[n].cis.0.map(num));
        row.push(num(rate));
        row.push(u8::from(model.mesh.node_in_matter[n]).to_string());
        w.write_record(&row).map_err(CliError::csv(path))?;
    }
    w.flush().map_err(CliError::io(path))
}

pub fn write_jumps(path: &Path, jumps: &[FacetJump]) -> Result<(), CliError> {
    let mut w = writer(path)?;
    w.write_record(["facet", "face", "area", "flux_jump", "surface_charge", "electric", "mechanical1", "mechanical2", "mechanical3"])
        .map_err(CliError::csv(path))?;
    for j in jumps {
        let mut row = vec![j.facet.to_string(), j.face.name().to_string()];
        row.extend([j.area, j.flux_jump, j.surface_charge, j.electric].map(num));
        row.extend(j.mechanical.0.map(num));
        w.write_record(&row).map_err(CliError::csv(path))?;
    }
    w.flush().map_err(CliError::io(path))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub name: String,
    pub units: String,
    pub photomech_version: String,
    pub frames: usize,
    pub final_time: f64,
    pub wall_time_seconds: f64,
    pub max_interface_charge_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub run: RunInfo,
    pub config: ScenarioConfig,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Manifest, CliError> {
        let text = fs::read_to_string(path).map_err(CliError::io(path))?;
        toml::from_str(&text).map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = toml::to_string_pretty(self).expect("manifest serializes");
        fs::write(path, text).map_err(CliError::io(path))
    }
}
