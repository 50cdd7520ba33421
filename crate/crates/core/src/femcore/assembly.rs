//! Global assembly of the discrete potential energy, its gradient (the weak
//! residual) and Hessian (the consistent tangent), plus Gram, mass and damping
//! matrices.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::dofs::{DofLayout, FieldState, NodalFields};
use super::element::{face_points, QuadPoint};
use super::loads::LoadCase;
use super::mesh::{Element, Mesh, Region};
use crate::constitutive::tangent::{
    free_space_energy_density, free_space_gradient, free_space_hessian, matter_energy, matter_gradient,
    matter_hessian, LocalMatrix, LocalVector, DEF_GRAD, FIELD, ORDER, ORDER_GRAD,
};
use crate::constitutive::PointState;
use crate::energy::{external_potentials, LoadData, MaterialParams};
use crate::error::{Error, Result};
use crate::kinematics::{build_kinematics, scalar_gradient, vector_gradient, Kinematics};
use crate::species::Pair;
use crate::tensor::{Mat3, Vec3};

/// Discretized problem: mesh, dof numbering with Dirichlet mask, material
/// and loads.
#[derive(Clone, Debug)]
pub struct Model {
    pub mesh: Mesh,
    pub layout: DofLayout,
    pub params: MaterialParams,
    pub loads: LoadCase,
    facets_by_element: Vec<Vec<usize>>,
}

/// Previous state and step size for incremental (dissipative) functionals.
#[derive(Clone, Copy, Debug)]
pub struct Increment<'a> {
    pub previous: &'a FieldState,
    pub dt: f64,
}

impl Model {
    /// Builds the model with the truncation boundary of the shell fixed.
    pub fn new(mesh: Mesh, params: MaterialParams, loads: LoadCase) -> Result<Model> {
        params.validate()?;
        loads.validate()?;
        let mut layout = DofLayout::new(&mesh);
        layout.fix_truncation_boundary(&mesh);
        let mut facets_by_element = vec![Vec::new(); mesh.elements.len()];
        for (i, f) in mesh.facets.iter().enumerate() {
            facets_by_element[f.element].push(i);
        }
        Ok(Model { mesh, layout, params, loads, facets_by_element })
    }

    pub fn n_dofs(&self) -> usize {
        self.layout.n_dofs()
    }

    pub fn element_dofs(&self, e: usize) -> Vec<usize> {
        let el = &self.mesh.elements[e];
        let mut dofs = Vec::with_capacity(80);
        for &n in &el.nodes {
            dofs.push(self.layout.potential[n]);
            if el.region == Region::Matter {
                dofs.extend_from_slice(&self.layout.order[n].expect("matter node carries order dofs"));
            }
            dofs.extend_from_slice(&self.layout.placement[n]);
        }
        dofs
    }
}

/// Sparse column of the strain-displacement operator `B`.
#[derive(Clone, Copy)]
struct BColumn {
    entries: [(usize, f64); 4],
    len: usize,
}

impl BColumn {
    fn iter(&self) -> impl Iterator<Item = &(usize, f64)> {
        self.entries[..self.len].iter()
    }
}

fn b_columns(region: Region, qp: &QuadPoint) -> Vec<BColumn> {
    let mut cols = Vec::with_capacity(80);
    for a in 0..8 {
        let g = qp.grads[a];
        cols.push(BColumn {
            entries: [(FIELD, -g[0]), (FIELD + 1, -g[1]), (FIELD + 2, -g[2]), (0, 0.0)],
            len: 3,
        });
        if region == Region::Matter {
            for s in 0..2 {
                for c in 0..3 {
                    let o = ORDER_GRAD[s] + 3 * c;
                    cols.push(BColumn {
                        entries: [(ORDER[s] + c, qp.shape[a]), (o, g[0]), (o + 1, g[1]), (o + 2, g[2])],
                        len: 4,
                    });
                }
            }
        }
        for c in 0..3 {
            let o = DEF_GRAD + 3 * c;
            cols.push(BColumn { entries: [(o, g[0]), (o + 1, g[1]), (o + 2, g[2]), (0, 0.0)], len: 3 });
        }
    }
    cols
}

/// Local dof offset of the order component `s, c` of element node `a`.
#[inline]
fn order_local(a: usize, s: usize, c: usize) -> usize {
    10 * a + 1 + 3 * s + c
}

#[inline]
fn placement_local(region: Region, a: usize, c: usize) -> usize {
    match region {
        Region::Matter => 10 * a + 7 + c,
        Region::FreeSpace => 4 * a + 1 + c,
    }
}

#[inline]
fn potential_local(region: Region, a: usize) -> usize {
    match region {
        Region::Matter => 10 * a,
        Region::FreeSpace => 4 * a,
    }
}

/// Field values interpolated at a quadrature point.
pub struct Interpolated {
    pub point: PointState,
    pub potential: f64,
    pub order: Pair<Vec3>,
    pub placement: Vec3,
    pub reference: Vec3,
}

pub fn interpolate(el: &Element, fields: &NodalFields, qp: &QuadPoint) -> Interpolated {
    let pot: [f64; 8] = el.nodes.map(|n| fields.potential[n]);
    let plc: [Vec3; 8] = el.nodes.map(|n| fields.placement[n]);
    let mut out = Interpolated {
        point: PointState {
            electric_field: -scalar_gradient(&pot, &qp.grads),
            def_grad: vector_gradient(&plc, &qp.grads),
            ..Default::default()
        },
        potential: 0.0,
        order: Pair::default(),
        placement: Vec3::ZERO,
        reference: Vec3::ZERO,
    };
    for a in 0..8 {
        out.potential += qp.shape[a] * pot[a];
        out.placement += plc[a] * qp.shape[a];
        out.reference += el.coords[a] * qp.shape[a];
    }
    if el.region == Region::Matter {
        let ord: [Pair<Vec3>; 8] = el.nodes.map(|n| fields.order[n]);
        let tr: [Vec3; 8] = ord.map(|p| p.trans);
        let ci: [Vec3; 8] = ord.map(|p| p.cis);
        out.point.order_grad = Pair::new(vector_gradient(&tr, &qp.grads), vector_gradient(&ci, &qp.grads));
        for a in 0..8 {
            out.order = out.order + ord[a] * qp.shape[a];
        }
        out.point.order = out.order;
    }
    out
}

fn kinematics_at(point: &PointState, element: usize) -> Result<Kinematics> {
    build_kinematics(point.def_grad).map_err(|err| match err {
        Error::NonPositiveJacobian { jacobian, .. } => Error::NonPositiveJacobian { jacobian, element: Some(element) },
        Error::SingularMatrix { det } => Error::NonPositiveJacobian { jacobian: det, element: Some(element) },
        other => other,
    })
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Want {
    Energy,
    Residual,
    Tangent,
}

struct ElementOutput {
    energy: f64,
    residual: Vec<f64>,
    tangent: Option<DMatrix<f64>>,
}

fn element_output(
    model: &Model,
    state: &FieldState,
    increment: Option<&Increment>,
    e: usize,
    want: Want,
) -> Result<ElementOutput> {
    let el = &model.mesh.elements[e];
    let p = &model.params;
    let ndof = if el.region == Region::Matter { 80 } else { 32 };
    let mut energy = 0.0;
    let mut residual = vec![0.0; ndof];
    let mut tangent = (want == Want::Tangent).then(|| DMatrix::zeros(ndof, ndof));
    let t = state.time;

    for qp in &el.quad {
        let ip = interpolate(el, &state.fields, qp);
        let k = kinematics_at(&ip.point, e)?;
        let w = qp.weight;
        let (u, g, h): (f64, Option<LocalVector>, Option<LocalMatrix>) = match el.region {
            Region::Matter => (
                matter_energy(&ip.point, &k, p),
                (want >= Want::Residual).then(|| matter_gradient(&ip.point, &k, p)),
                (want == Want::Tangent).then(|| matter_hessian(&ip.point, &k, p)),
            ),
            Region::FreeSpace => (
                free_space_energy_density(&ip.point, &k, p),
                (want >= Want::Residual).then(|| free_space_gradient(&ip.point, &k, p)),
                (want == Want::Tangent).then(|| free_space_hessian(&ip.point, &k, p)),
            ),
        };
        energy += w * u;
        if let Some(g) = g {
            let cols = b_columns(el.region, qp);
            for (c, col) in cols.iter().enumerate() {
                residual[c] += w * col.iter().map(|&(r, v)| g[r] * v).sum::<f64>();
            }
            if let (Some(h), Some(kt)) = (h, tangent.as_mut()) {
                let mut hb = DMatrix::<f64>::zeros(36, ndof);
                for (c, col) in cols.iter().enumerate() {
                    for &(r, v) in col.iter() {
                        for i in 0..36 {
                            hb[(i, c)] += v * h[(i, r)];
                        }
                    }
                }
                for (d, col) in cols.iter().enumerate() {
                    for c in 0..ndof {
                        let s: f64 = col.iter().map(|&(r, v)| v * hb[(r, c)]).sum();
                        kt[(d, c)] += w * s;
                    }
                }
            }
        }

        if el.region != Region::Matter {
            continue;
        }
        let bulk = model.loads.bulk_at(&model.mesh, &ip.reference, t);
        let data = LoadData { bulk, ..Default::default() };
        energy += w * external_potentials(ip.potential, &ip.order, &ip.placement, &data).bulk;
        if want >= Want::Residual {
            for a in 0..8 {
                let n = qp.shape[a] * w;
                residual[potential_local(el.region, a)] += bulk.free_charge * n;
                for c in 0..3 {
                    residual[order_local(a, 0, c)] -= bulk.electronic.trans[c] * n;
                    residual[order_local(a, 1, c)] -= bulk.electronic.cis[c] * n;
                    residual[placement_local(el.region, a, c)] -= bulk.body_force[c] * n;
                }
            }
        }

        if let Some(inc) = increment {
            if p.damping > 0.0 {
                let prev = interpolate(el, &inc.previous.fields, qp);
                let jac_prev = kinematics_at(&prev.point, e)?.jac;
                let coef = jac_prev * p.damping;
                let rate = (ip.order - prev.order) * (1.0 / inc.dt);
                energy += w * inc.dt * 0.5 * coef * (rate.trans.norm_squared() + rate.cis.norm_squared());
                if want >= Want::Residual {
                    for a in 0..8 {
                        let n = qp.shape[a] * w * coef;
                        for c in 0..3 {
                            residual[order_local(a, 0, c)] += rate.trans[c] * n;
                            residual[order_local(a, 1, c)] += rate.cis[c] * n;
                        }
                    }
                }
                if let Some(kt) = tangent.as_mut() {
                    for a in 0..8 {
                        for b in 0..8 {
                            let v = w * coef / inc.dt * qp.shape[a] * qp.shape[b];
                            for s in 0..2 {
                                for c in 0..3 {
                                    kt[(order_local(a, s, c), order_local(b, s, c))] += v;
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    for &fi in &model.facets_by_element[e] {
        let facet = &model.mesh.facets[fi];
        let Some(sl) = model.loads.surface_at(facet.face, t) else { continue };
        let data = LoadData { surface: sl, ..Default::default() };
        for qp in face_points(&el.coords, facet.face.axis(), facet.face.sign()) {
            let ip = interpolate(el, &state.fields, &qp);
            energy += qp.weight * external_potentials(ip.potential, &ip.order, &ip.placement, &data).surface;
            if want >= Want::Residual {
                for a in 0..8 {
                    let n = qp.shape[a] * qp.weight;
                    residual[potential_local(el.region, a)] += sl.free_charge * n;
                    for c in 0..3 {
                        residual[order_local(a, 0, c)] -= sl.electronic.trans[c] * n;
                        residual[order_local(a, 1, c)] -= sl.electronic.cis[c] * n;
                        residual[placement_local(el.region, a, c)] -= sl.traction[c] * n;
                    }
                }
            }
        }
    }

    Ok(ElementOutput { energy, residual, tangent })
}

fn element_outputs(
    model: &Model,
    state: &FieldState,
    increment: Option<&Increment>,
    want: Want,
) -> Result<Vec<ElementOutput>> {
    (0..model.mesh.elements.len())
        .into_par_iter()
        .map(|e| element_output(model, state, increment, e, want))
        .collect()
}

/// Discrete functional value, gradient and Hessian with respect to all dofs
/// (fixed ones included). With an increment, the functional is
/// `U(x) + dt * P(J_prev, (x - x_prev)/dt)` where `P` is the dissipation
/// potential; subtract `U(x_prev)` to obtain the incremental work.
pub struct Assembled {
    pub energy: f64,
    pub residual: DVector<f64>,
    pub tangent: Option<DMatrix<f64>>,
}

fn assemble(model: &Model, state: &FieldState, increment: Option<&Increment>, want: Want) -> Result<Assembled> {
    let outputs = element_outputs(model, state, increment, want)?;
    let n = model.n_dofs();
    let mut energy = 0.0;
    let mut residual = DVector::zeros(n);
    let mut tangent = (want == Want::Tangent).then(|| DMatrix::zeros(n, n));
    for (e, out) in outputs.iter().enumerate() {
        energy += out.energy;
        if want == Want::Energy {
            continue;
        }
        let dofs = model.element_dofs(e);
        for (i, &gi) in dofs.iter().enumerate() {
            residual[gi] += out.residual[i];
        }
        if let (Some(kt), Some(ke)) = (tangent.as_mut(), out.tangent.as_ref()) {
            for (i, &gi) in dofs.iter().enumerate() {
                for (j, &gj) in dofs.iter().enumerate() {
                    kt[(gi, gj)] += ke[(i, j)];
                }
            }
        }
    }
    Ok(Assembled { energy, residual, tangent })
}

pub fn assemble_residual(model: &Model, state: &FieldState, increment: Option<&Increment>) -> Result<DVector<f64>> {
    Ok(assemble(model, state, increment, Want::Residual)?.residual)
}

pub fn assemble_tangent(model: &Model, state: &FieldState, increment: Option<&Increment>) -> Result<DMatrix<f64>> {
    Ok(assemble(model, state, increment, Want::Tangent)?.tangent.expect("tangent requested"))
}

/// Residual and tangent in one pass.
pub fn assemble_system(
    model: &Model,
    state: &FieldState,
    increment: Option<&Increment>,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let a = assemble(model, state, increment, Want::Tangent)?;
    Ok((a.residual, a.tangent.expect("tangent requested")))
}

/// Discrete potential energy `U`: internal energy of matter and free space
/// plus the potentials of the external loads.
pub fn potential_energy(model: &Model, state: &FieldState) -> Result<f64> {
    Ok(assemble(model, state, None, Want::Energy)?.energy)
}

/// Incremental work functional `U(x) - U(x_prev) + dt * P`.
pub fn incremental_work(model: &Model, state: &FieldState, increment: &Increment) -> Result<f64> {
    let now = assemble(model, state, Some(increment), Want::Energy)?.energy;
    let mut prev = increment.previous.clone();
    prev.time = state.time;
    Ok(now - potential_energy(model, &prev)?)
}

/// Gram matrix `int N_a N_b` over matter on electronic and placement dofs,
/// component-wise.
pub fn assemble_gram(model: &Model) -> DMatrix<f64> {
    weighted_matter_gram(model, None, |_| (1.0, 1.0))
}

/// Consistent mass: electronic inertia on order dofs, mass density on
/// placement dofs, nothing on the potential.
pub fn assemble_mass(model: &Model) -> DMatrix<f64> {
    let p = model.params;
    weighted_matter_gram(model, None, |_| (p.electronic_inertia, p.mass_density))
}

/// Damping matrix `int J gamma0 N_a N_b` on order dofs, with `J` taken from
/// `at`.
pub fn assemble_damping(model: &Model, at: &FieldState) -> Result<DMatrix<f64>> {
    let p = model.params;
    for (e, el) in model.mesh.elements.iter().enumerate() {
        if el.region == Region::Matter {
            for qp in &el.quad {
                kinematics_at(&interpolate(el, &at.fields, qp).point, e)?;
            }
        }
    }
    Ok(weighted_matter_gram(model, Some(at), |jac| (jac * p.damping, 0.0)))
}

fn weighted_matter_gram(model: &Model, at: Option<&FieldState>, coef: impl Fn(f64) -> (f64, f64)) -> DMatrix<f64> {
    let n = model.n_dofs();
    let mut m = DMatrix::zeros(n, n);
    let layout = &model.layout;
    for el in model.mesh.elements.iter().filter(|e| e.region == Region::Matter) {
        for qp in &el.quad {
            let jac = at.map_or(1.0, |s| interpolate(el, &s.fields, qp).point.def_grad.det());
            let (c_order, c_place) = coef(jac);
            for a in 0..8 {
                for b in 0..8 {
                    let v = qp.weight * qp.shape[a] * qp.shape[b];
                    let (na, nb) = (el.nodes[a], el.nodes[b]);
                    let (oa, ob) = (layout.order[na].unwrap(), layout.order[nb].unwrap());
                    for c in 0..6 {
                        m[(oa[c], ob[c])] += c_order * v;
                    }
                    for c in 0..3 {
                        m[(layout.placement[na][c], layout.placement[nb][c])] += c_place * v;
                    }
                }
            }
        }
    }
    m
}

/// Local state at every quadrature point, for post-processing.
pub fn evaluate_points(model: &Model, state: &FieldState) -> Vec<(usize, Interpolated)> {
    let mut out = Vec::new();
    for (e, el) in model.mesh.elements.iter().enumerate() {
        for qp in &el.quad {
            out.push((e, interpolate(el, &state.fields, qp)));
        }
    }
    out
}

/// Writes an affine state `y = y0 - E.X`, order `order`, placement `F X`.
pub fn affine_state(mesh: &Mesh, potential0: f64, field: Vec3, order: Pair<Vec3>, def_grad: Mat3) -> FieldState {
    let mut s = FieldState::reference(mesh);
    for (n, x) in mesh.nodes.iter().enumerate() {
        s.fields.potential[n] = potential0 - field.dot(x);
        s.fields.placement[n] = def_grad.mul_vec(x);
        if mesh.node_in_matter[n] {
            s.fields.order[n] = order;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::super::loads::SurfacePatch;
    use super::super::mesh::{BoxMeshSpec, Face};
    use super::*;
    use crate::constitutive::{electric_flux, electronic_stress_and_sources, total_stress};
    use crate::energy::SurfaceLoads;

    fn cube_model(loads: LoadCase) -> Model {
        let mesh = Mesh::new(BoxMeshSpec::matter_only([1.0; 3], [1; 3])).unwrap();
        Model::new(mesh, MaterialParams::default(), loads).unwrap()
    }

    #[test]
    fn reference_state_has_zero_residual() {
        let mesh = Mesh::new(BoxMeshSpec {
            extents: [1.0; 3],
            cells: [2; 3],
            shell_thickness: [0.5; 3],
            shell_cells: [1; 3],
        })
        .unwrap();
        let model = Model::new(mesh, MaterialParams::default(), LoadCase::none()).unwrap();
        let s = FieldState::reference(&model.mesh);
        assert!(assemble_residual(&model, &s, None).unwrap().amax() < 1e-14);
        assert!(potential_energy(&model, &s).unwrap().abs() < 1e-14);
    }

    #[test]
    fn surface_charge_residual_matches_face_integral() {
        // Bilinear shape functions integrate to a quarter of the face area.
        let loads = LoadCase {
            surface: vec![SurfacePatch {
                faces: vec![Face::ZPlus],
                loads: SurfaceLoads { free_charge: 0.8, ..Default::default() },
            }],
            ..Default::default()
        };
        let model = cube_model(loads);
        let s = FieldState::reference(&model.mesh);
        let r = assemble_residual(&model, &s, None).unwrap();
        for n in 0..8 {
            let want = if model.mesh.nodes[n][2] == 1.0 { 0.2 } else { 0.0 };
            assert!((r[model.layout.potential[n]] - want).abs() < 1e-15);
        }
    }

    #[test]
    fn patch_test_uniform_fields() {
        let mesh = Mesh::new(BoxMeshSpec::matter_only([1.0, 2.0, 1.5], [2, 2, 2])).unwrap();
        let model = Model::new(mesh, MaterialParams { coupling: Pair::new(0.3, 0.1), ..Default::default() }, LoadCase::none()).unwrap();
        let f = Mat3([[1.1, 0.1, 0.0], [0.05, 0.95, 0.02], [0.0, -0.1, 1.05]]);
        let e = Vec3::new(0.3, -0.4, 0.2);
        let y = Pair::new(Vec3::new(0.1, 0.0, -0.2), Vec3::new(0.0, 0.3, 0.1));
        let s = affine_state(&model.mesh, 0.7, e, y, f);
        let k = build_kinematics(f).unwrap();
        let want_pt = PointState { electric_field: e, order: y, def_grad: f, ..Default::default() };
        let d = electric_flux(&y, &e, &k, &model.params).nominal;
        let p = total_stress(&want_pt, &k, &model.params).total;
        let src = electronic_stress_and_sources(&want_pt, &k, &model.params, Pair::default());
        for (_, ip) in evaluate_points(&model, &s) {
            let kk = build_kinematics(ip.point.def_grad).unwrap();
            assert!((electric_flux(&ip.order, &ip.point.electric_field, &kk, &model.params).nominal - d).max_abs() < 1e-13);
            assert!((total_stress(&ip.point, &kk, &model.params).total - p).max_abs() < 1e-13);
            let s2 = electronic_stress_and_sources(&ip.point, &kk, &model.params, Pair::default());
            assert!(s2.stress.trans.max_abs() < 1e-13);
            assert!((s2.energetic_source.trans - src.energetic_source.trans).max_abs() < 1e-13);
        }
    }

    #[test]
    fn unit_cube_mass() {
        let model = cube_model(LoadCase::none());
        let m = assemble_mass(&model);
        let total: f64 = model
            .layout
            .placement
            .iter()
            .map(|d| (0..model.n_dofs()).map(|j| m[(d[0], j)]).sum::<f64>())
            .sum();
        assert!((total - 1.0).abs() < 1e-14);
        assert!((m.clone() - m.transpose()).amax() < 1e-15);
        // No electronic inertia by default.
        for n in 0..8 {
            for d in model.layout.order[n].unwrap() {
                assert!(m.row(d).amax() == 0.0);
            }
        }
    }
}
