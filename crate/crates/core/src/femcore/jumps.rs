//! Flux and traction jumps across the matter/free-space interface.

use super::assembly::{interpolate, Model};
use super::dofs::FieldState;
use super::element::{eval_point, face_points};
use super::mesh::Face;
use crate::constitutive::{electric_flux, free_space_flux, free_space_stress, total_stress};
use crate::error::{Error, Result};
use crate::kinematics::build_kinematics;
use crate::tensor::Vec3;

/// Facet-integrated interface residuals. With `[.] = free - matter` and `N`
/// the outward matter normal, `electric = int [D].N - q_hat` and
/// `mechanical = int -[P].N - t_hat`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FacetJump {
    pub facet: usize,
    pub element: usize,
    pub face: Face,
    pub area: f64,
    pub flux_jump: f64,
    pub surface_charge: f64,
    pub electric: f64,
    pub mechanical: Vec3,
}

pub fn interface_jump_check(model: &Model, state: &FieldState) -> Result<Vec<FacetJump>> {
    let p = &model.params;
    let mut out = Vec::new();
    for (fi, facet) in model.mesh.facets.iter().enumerate() {
        let Some(nb) = facet.neighbor else { continue };
        let el = &model.mesh.elements[facet.element];
        let other = &model.mesh.elements[nb];
        let axis = facet.face.axis();
        let normal = facet.face.normal();
        let loads = model.loads.surface_at(facet.face, state.time).unwrap_or_default();
        let mut jump = FacetJump {
            facet: fi,
            element: facet.element,
            face: facet.face,
            area: 0.0,
            flux_jump: 0.0,
            surface_charge: 0.0,
            electric: 0.0,
            mechanical: Vec3::ZERO,
        };
        for qp in face_points(&el.coords, axis, facet.face.sign()) {
            let mut xi = qp.local;
            xi[axis] = -xi[axis];
            let oqp = eval_point(&other.coords, xi, 1.0)
                .ok_or(Error::NonPositiveJacobian { jacobian: 0.0, element: Some(nb) })?;
            let m = interpolate(el, &state.fields, &qp);
            let f = interpolate(other, &state.fields, &oqp);
            let km = build_kinematics(m.point.def_grad)?;
            let kf = build_kinematics(f.point.def_grad)?;
            let d_m = electric_flux(&m.order, &m.point.electric_field, &km, p).nominal;
            let d_f = free_space_flux(&f.point.electric_field, &kf, p);
            let p_m = total_stress(&m.point, &km, p).total;
            let p_f = free_space_stress(&f.point.electric_field, &kf, p);
            let w = qp.weight;
            jump.area += w;
            jump.flux_jump += w * (d_f - d_m).dot(&normal);
            jump.surface_charge += w * loads.free_charge;
            jump.mechanical += (-(p_f - p_m).mul_vec(&normal) - loads.traction) * w;
        }
        jump.electric = jump.flux_jump - jump.surface_charge;
        out.push(jump);
    }
    Ok(out)
}
