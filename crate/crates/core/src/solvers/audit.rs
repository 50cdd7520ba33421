//! Energy bookkeeping over a trajectory.

use super::Trajectory;

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyReport {
    /// `H_k - H_0 + D_k - W_k` per frame.
    pub closure: Vec<f64>,
    /// Normalization: the largest of `|H_0|`, the kinetic energy and the
    /// potential energy change along the trajectory.
    pub scale: f64,
    pub max_relative: f64,
}

pub fn energy_audit(traj: &Trajectory) -> EnergyReport {
    let first = &traj.frames[0].diagnostics;
    let h0 = first.total;
    let mut scale = h0.abs();
    for f in &traj.frames {
        let d = &f.diagnostics;
        scale = scale.max(d.kinetic.abs()).max((d.potential - first.potential).abs());
    }
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let closure: Vec<f64> = traj
        .frames
        .iter()
        .map(|f| {
            let d = &f.diagnostics;
            d.total - h0 + (d.dissipated - first.dissipated) - (d.external_work - first.external_work)
        })
        .collect();
    let max_relative = closure.iter().fold(0.0_f64, |m, c| m.max(c.abs())) / scale;
    EnergyReport { closure, scale, max_relative }
}
