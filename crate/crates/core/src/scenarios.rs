//! Small reference scenarios and trajectory probes used by the verification
//! suites.

use crate::energy::{MaterialParams, SurfaceLoads};
use crate::error::Result;
use crate::femcore::{
    affine_state, apply_dirichlet, BoxMeshSpec, DirichletValue, Face, FieldKind, LoadCase, Mesh, Model, NodeSet,
    SurfacePatch,
};
use crate::solvers::{Scenario, Trajectory};
use crate::species::Pair;
use crate::tensor::{Mat3, Vec3};

/// Unit matter cube with every potential and placement dof held: a uniform
/// field `field` acts on order parameters that start from `order`.
pub fn electronic_cell(params: MaterialParams, field: Vec3, order: Pair<Vec3>) -> Result<Scenario> {
    let mesh = Mesh::new(BoxMeshSpec::matter_only([1.0; 3], [1; 3]))?;
    let mut model = Model::new(mesh, params, LoadCase::none())?;
    let initial = affine_state(&model.mesh, 0.0, field, order, Mat3::IDENTITY);
    let all: Vec<usize> = (0..model.mesh.n_nodes()).collect();
    model.layout.fix_nodes(&all, FieldKind::Potential);
    model.layout.fix_nodes(&all, FieldKind::Placement);
    Ok(Scenario { model, initial })
}

/// Matter slab with a free-space shell along x only and frozen mechanics.
/// Opposite free surface charges `charge` sit on the +x and -x matter faces.
pub fn electrostatic_patch(params: MaterialParams, charge: f64) -> Result<Scenario> {
    let mesh = Mesh::new(BoxMeshSpec {
        extents: [1.0; 3],
        cells: [2, 1, 1],
        shell_thickness: [0.5, 0.0, 0.0],
        shell_cells: [2, 0, 0],
    })?;
    let patch = |face, q| SurfacePatch { faces: vec![face], loads: SurfaceLoads { free_charge: q, ..Default::default() } };
    let loads = LoadCase { surface: vec![patch(Face::XPlus, charge), patch(Face::XMinus, -charge)], ..LoadCase::none() };
    let mut model = Model::new(mesh, params, loads)?;
    let mut initial = affine_state(&model.mesh, 0.0, Vec3::ZERO, Pair::default(), Mat3::IDENTITY);
    apply_dirichlet(&model.mesh, &mut model.layout, &mut initial.fields, NodeSet::All, FieldKind::Placement, None)?;
    Ok(Scenario { model, initial })
}

/// Two-cell matter strip clamped at -x, with the potential prescribed on the
/// +-x faces so that a uniform field of strength `field` acts along x. The
/// order parameters start at zero, away from equilibrium.
pub fn driven_strip(params: MaterialParams, field: f64) -> Result<Scenario> {
    let mesh = Mesh::new(BoxMeshSpec::matter_only([2.0, 1.0, 1.0], [2, 1, 1]))?;
    let mut model = Model::new(mesh, params, LoadCase::none())?;
    let mut initial = affine_state(&model.mesh, 0.0, Vec3::new(field, 0.0, 0.0), Pair::default(), Mat3::IDENTITY);
    let (mesh, layout, fields) = (&model.mesh, &mut model.layout, &mut initial.fields);
    apply_dirichlet(mesh, layout, fields, NodeSet::MatterFace(Face::XMinus), FieldKind::Potential, Some(DirichletValue::Potential(0.0)))?;
    apply_dirichlet(
        mesh,
        layout,
        fields,
        NodeSet::MatterFace(Face::XPlus),
        FieldKind::Potential,
        Some(DirichletValue::Potential(-2.0 * field)),
    )?;
    apply_dirichlet(
        mesh,
        layout,
        fields,
        NodeSet::MatterFace(Face::XMinus),
        FieldKind::Placement,
        Some(DirichletValue::Displacement(Vec3::ZERO)),
    )?;
    Ok(Scenario { model, initial })
}

/// Time series of one order-parameter component at a node.
pub fn order_history(traj: &Trajectory, node: usize, species: usize, component: usize) -> Vec<(f64, f64)> {
    traj.frames
        .iter()
        .map(|f| (f.state.time, f.state.fields.order[node].get(species)[component]))
        .collect()
}

/// Times at which the signal crosses `level`, linearly interpolated.
pub fn crossings(series: &[(f64, f64)], level: f64) -> Vec<f64> {
    series
        .windows(2)
        .filter_map(|w| {
            let (t0, a) = (w[0].0, w[0].1 - level);
            let (t1, b) = (w[1].0, w[1].1 - level);
            (a != b && a * b <= 0.0 && b != 0.0).then(|| t0 + (t1 - t0) * a / (a - b))
        })
        .collect()
}

/// Oscillation period from the spacing of level crossings.
pub fn measured_period(series: &[(f64, f64)], level: f64) -> Option<f64> {
    let c = crossings(series, level);
    (c.len() >= 3).then(|| 2.0 * (c[c.len() - 1] - c[0]) / (c.len() - 1) as f64)
}

/// Decay time of `|s - limit|` from a least-squares fit of its logarithm.
pub fn fitted_decay_time(series: &[(f64, f64)], limit: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(_, s)| (s - limit).abs() > 1e-12 * limit.abs().max(1.0))
        .map(|&(t, s)| (t, (s - limit).abs().ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mt, ml) = pts.iter().fold((0.0, 0.0), |(a, b), (t, l)| (a + t / n, b + l / n));
    let (num, den) = pts.iter().fold((0.0, 0.0), |(a, b), (t, l)| (a + (t - mt) * (l - ml), b + (t - mt) * (t - mt)));
    let slope = num / den;
    (slope < 0.0).then(|| -1.0 / slope)
}
