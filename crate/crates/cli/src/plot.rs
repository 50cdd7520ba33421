//! Columnar plot data extracted from a run directory.

use std::fs;
use std::path::{Path, PathBuf};

use photomech_core::Vec3;

use crate::error::CliError;
use crate::output::{num, Manifest, MANIFEST_FILE, SNAPSHOT_DIR, TRAJECTORY_FILE};

/// Plot fields: `(name, source columns, output columns)`. Trajectory fields
/// read `trajectory.csv`; nodal fields read the snapshots at a probe node.
const TRAJECTORY_FIELDS: [(&str, &[&str], &[&str]); 4] = [
    ("energy", &["kinetic", "potential", "dissipated", "total"], &["kinetic", "potential", "dissipated", "total"]),
    ("work", &["external_work", "dissipated", "total"], &["external_work", "dissipated", "total"]),
    ("lambda", &["lambda_max", "free_space_rate_max"], &["lambda_max", "free_space_rate_max"]),
    ("newton", &["newton_iterations", "residual_norm"], &["newton_iterations", "residual_norm"]),
];

const NODAL_FIELDS: [(&str, &[&str]); 3] = [
    ("y", &["y"]),
    ("order", &["trans1", "trans2", "trans3", "cis1", "cis2", "cis3"]),
    ("displacement", &["u1", "u2", "u3"]),
];

pub fn known_fields() -> Vec<&'static str> {
    TRAJECTORY_FIELDS.iter().map(|f| f.0).chain(NODAL_FIELDS.iter().map(|f| f.0)).collect()
}

/// Writes `<out>/<field>.csv` for each requested field and returns the
/// paths. `run` is a run directory or its trajectory file; `probe` selects
/// the node nearest to a reference point for nodal fields.
pub fn emit_plot_data(run: &Path, fields: &[String], probe: Vec3, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let dir = if run.is_file() { run.parent().unwrap_or(Path::new(".")).to_path_buf() } else { run.to_path_buf() };
    let known = known_fields();
    if let Some(bad) = fields.iter().find(|f| !known.contains(&f.as_str())) {
        return Err(CliError::UnknownField(bad.clone()));
    }
    let units = Manifest::read(&dir.join(MANIFEST_FILE)).map(|m| m.run.units).unwrap_or_else(|_| "nondimensional".into());
    let traj = Table::read(&dir.join(TRAJECTORY_FILE))?;
    let times = traj.column("t")?;
    fs::create_dir_all(out).map_err(CliError::io(out))?;

    let mut written = Vec::new();
    for field in fields {
        let (t, names, columns): (Vec<f64>, &[&str], Vec<Vec<f64>>) =
            if let Some((_, src, dst)) = TRAJECTORY_FIELDS.iter().find(|f| f.0 == field) {
                let cols = src.iter().map(|c| traj.column(c)).collect::<Result<Vec<_>, _>>()?;
                (times.clone(), dst, cols)
            } else {
                let (_, dst) = NODAL_FIELDS.iter().find(|f| f.0 == field).expect("checked above");
                (snapshot_times(&dir, &traj)?, dst, nodal_history(&dir, field, probe)?)
            };
        let path = out.join(format!("{field}.csv"));
        let mut w = csv::Writer::from_path(&path).map_err(CliError::csv(&path))?;
        let mut header = vec![format!("t [{units}]")];
        header.extend(names.iter().map(|n| format!("{n} [{units}]")));
        w.write_record(&header).map_err(CliError::csv(&path))?;
        for (i, ti) in t.iter().enumerate() {
            let mut row = vec![num(*ti)];
            row.extend(columns.iter().map(|c| num(c[i])));
            w.write_record(&row).map_err(CliError::csv(&path))?;
        }
        w.flush().map_err(CliError::io(&path))?;
        written.push(path);
    }
    Ok(written)
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    fn read(path: &Path) -> Result<Table, CliError> {
        let mut r = csv::Reader::from_path(path).map_err(CliError::csv(path))?;
        let header = r.headers().map_err(CliError::csv(path))?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(CliError::csv(path))?;
            let row = rec
                .iter()
                .map(|v| v.parse::<f64>().map_err(|_| CliError::Malformed(format!("{}: bad number `{v}`", path.display()))))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        Ok(Table { header, rows })
    }

    fn column(&self, name: &str) -> Result<Vec<f64>, CliError> {
        let i = self
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Malformed(format!("missing column `{name}`")))?;
        Ok(self.rows.iter().map(|r| r[i]).collect())
    }
}

fn snapshot_files(dir: &Path) -> Result<Vec<(usize, PathBuf)>, CliError> {
    let snaps = dir.join(SNAPSHOT_DIR);
    let mut files = Vec::new();
    for entry in fs::read_dir(&snaps).map_err(CliError::io(&snaps))? {
        let path = entry.map_err(CliError::io(&snaps))?.path();
        let step = path
            .file_stem()
            .and_then(|s| s.to_str())
            .and_then(|s| s.strip_prefix("step_"))
            .and_then(|s| s.parse::<usize>().ok());
        if let Some(step) = step {
            files.push((step, path));
        }
    }
    files.sort();
    Ok(files)
}

fn snapshot_times(dir: &Path, traj: &Table) -> Result<Vec<f64>, CliError> {
    let t = traj.column("t")?;
    snapshot_files(dir)?
        .into_iter()
        .map(|(step, _)| t.get(step).copied().ok_or_else(|| CliError::Malformed(format!("snapshot step {step} beyond trajectory"))))
        .collect()
}

fn nodal_history(dir: &Path, field: &str, probe: Vec3) -> Result<Vec<Vec<f64>>, CliError> {
    let files = snapshot_files(dir)?;
    let mut node = None;
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for (_, path) in &files {
        let tab = Table::read(path)?;
        let x: Vec<Vec<f64>> = ["X1", "X2", "X3"].iter().map(|c| tab.column(c)).collect::<Result<_, _>>()?;
        let n = *node.get_or_insert_with(|| {
            (0..x[0].len())
                .min_by(|&a, &b| {
                    let d = |i: usize| (0..3).map(|k| (x[k][i] - probe[k]).powi(2)).sum::<f64>();
                    d(a).total_cmp(&d(b))
                })
                .unwrap_or(0)
        });
        let values: Vec<f64> = match field {
            "y" => vec![tab.column("y")?[n]],
            "order" => ["trans1", "trans2", "trans3", "cis1", "cis2", "cis3"]
                .iter()
                .map(|c| tab.column(c).map(|v| v[n]))
                .collect::<Result<_, _>>()?,
            _ => (0..3).map(|k| tab.column(&format!("x{}", k + 1)).map(|v| v[n] - x[k][n])).collect::<Result<_, _>>()?,
        };
        if cols.is_empty() {
            cols = vec![Vec::new(); values.len()];
        }
        for (c, v) in cols.iter_mut().zip(values) {
            c.push(v);
        }
    }
    Ok(cols)
}
