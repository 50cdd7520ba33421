//! Energy densities per unit reference volume, their spatial counterparts,
//! external potentials and kinetic/dissipation densities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::Kinematics;
use crate::species::Pair;
use crate::tensor::{Mat3, Vec3};

/// Material constants. All values are in consistent nondimensional units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaterialParams {
    /// Vacuum permittivity `eps0`.
    pub permittivity: f64,
    /// Reference charge density `omega0` per species.
    pub charge_density: Pair<f64>,
    /// Quadratic order-parameter stiffness `a`.
    pub electronic_stiffness: Pair<f64>,
    /// Order/deformation coupling `beta`.
    pub coupling: Pair<f64>,
    /// Gradient penalty `kappa`.
    pub gradient_penalty: Pair<f64>,
    /// Electronic damping `gamma0`.
    pub damping: f64,
    /// Electronic inertia density.
    pub electronic_inertia: f64,
    /// Mass density.
    pub mass_density: f64,
    /// Neo-Hookean shear modulus `mu`.
    pub shear_modulus: f64,
    /// Neo-Hookean Lame constant `lambda`.
    pub lame_modulus: f64,
    /// Scale of the fictitious free-space elastic energy.
    pub free_space_stiffness: f64,
}

impl Default for MaterialParams {
    fn default() -> Self {
        MaterialParams {
            permittivity: 1.0,
            charge_density: Pair::new(0.5, 0.5),
            electronic_stiffness: Pair::splat(1.0),
            coupling: Pair::splat(0.0),
            gradient_penalty: Pair::splat(0.1),
            damping: 0.0,
            electronic_inertia: 0.0,
            mass_density: 1.0,
            shear_modulus: 1.0,
            lame_modulus: 1.0,
            free_space_stiffness: 1e-6,
        }
    }
}

impl MaterialParams {
    pub fn validate(&self) -> Result<()> {
        let checks: [(&str, f64, bool); 15] = [
            ("permittivity", self.permittivity, self.permittivity > 0.0),
            ("charge_density.trans", self.charge_density.trans, true),
            ("charge_density.cis", self.charge_density.cis, true),
            ("electronic_stiffness.trans", self.electronic_stiffness.trans, self.electronic_stiffness.trans > 0.0),
            ("electronic_stiffness.cis", self.electronic_stiffness.cis, self.electronic_stiffness.cis > 0.0),
            ("coupling.trans", self.coupling.trans, self.coupling.trans >= 0.0),
            ("coupling.cis", self.coupling.cis, self.coupling.cis >= 0.0),
            ("gradient_penalty.trans", self.gradient_penalty.trans, self.gradient_penalty.trans > 0.0),
            ("gradient_penalty.cis", self.gradient_penalty.cis, self.gradient_penalty.cis > 0.0),
            ("damping", self.damping, self.damping >= 0.0),
            ("electronic_inertia", self.electronic_inertia, self.electronic_inertia >= 0.0),
            ("mass_density", self.mass_density, self.mass_density > 0.0),
            ("shear_modulus", self.shear_modulus, self.shear_modulus > 0.0),
            ("lame_modulus", self.lame_modulus, self.lame_modulus >= 0.0),
            ("free_space_stiffness", self.free_space_stiffness, self.free_space_stiffness > 0.0),
        ];
        for (name, value, ok) in checks {
            if !value.is_finite() || !ok {
                return Err(Error::InvalidInput(format!("material parameter `{name}` has invalid value {value}")));
            }
        }
        Ok(())
    }

    /// `pi = sum_s omega0^s y^s`
    pub fn polarization_density(&self, order: &Pair<Vec3>) -> Vec3 {
        order.trans * self.charge_density.trans + order.cis * self.charge_density.cis
    }
}

/// Bulk loads per unit reference volume.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BulkLoads {
    /// Free charge density `q`.
    pub free_charge: f64,
    /// External electronic body load per species.
    pub electronic: Pair<Vec3>,
    /// Mechanical body force.
    pub body_force: Vec3,
}

/// Surface loads per unit reference area.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurfaceLoads {
    /// Surface charge.
    pub free_charge: f64,
    /// Electronic traction per species.
    pub electronic: Pair<Vec3>,
    /// Mechanical traction.
    pub traction: Vec3,
}

impl BulkLoads {
    pub fn scaled(&self, s: f64) -> Self {
        BulkLoads {
            free_charge: self.free_charge * s,
            electronic: self.electronic * s,
            body_force: self.body_force * s,
        }
    }
}

impl SurfaceLoads {
    pub fn scaled(&self, s: f64) -> Self {
        SurfaceLoads {
            free_charge: self.free_charge * s,
            electronic: self.electronic * s,
            traction: self.traction * s,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LoadData {
    pub bulk: BulkLoads,
    pub surface: SurfaceLoads,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExternalPotentials {
    pub bulk: f64,
    pub surface: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KineticDensities {
    pub electronic: f64,
    pub mechanical: f64,
}

/// Electric energy `-1/2 eps0 J |e|^2` written in material quantities as
/// `-1/2 eps0 |K E|^2 / J`.
pub fn electric_energy(nominal: &Vec3, k: &Kinematics, p: &MaterialParams) -> f64 {
    let a = k.cof.mul_vec(nominal);
    -0.5 * p.permittivity * a.norm_squared() * k.inv_jac
}

/// Electronic/electric coupling `-sum_s omega0^s y^s . K . E`.
pub fn electronic_energy(order: &Pair<Vec3>, nominal: &Vec3, k: &Kinematics, p: &MaterialParams) -> f64 {
    -p.polarization_density(order).dot(&k.cof.mul_vec(nominal))
}

/// Compressible neo-Hookean energy.
pub fn neo_hookean(k: &Kinematics, shear: f64, lame: f64) -> f64 {
    let ln_j = k.jac.ln();
    0.5 * shear * (k.def_grad.ddot(&k.def_grad) - 3.0 - 2.0 * ln_j) + 0.5 * lame * ln_j * ln_j
}

/// Local part of the stored energy: neo-Hookean plus order-parameter terms.
pub fn local_mechanical_energy(order: &Pair<Vec3>, k: &Kinematics, p: &MaterialParams) -> f64 {
    let mut w = neo_hookean(k, p.shear_modulus, p.lame_modulus);
    for s in 0..2 {
        let y = order.get(s);
        let fy = k.def_grad.mul_vec(y);
        w += 0.5 * p.electronic_stiffness.get(s) * y.norm_squared()
            + 0.5 * p.coupling.get(s) * fy.norm_squared();
    }
    w
}

/// Nonlocal (gradient) part of the stored energy.
pub fn gradient_energy(grads: &Pair<Mat3>, p: &MaterialParams) -> f64 {
    0.5 * (p.gradient_penalty.trans * grads.trans.ddot(&grads.trans)
        + p.gradient_penalty.cis * grads.cis.ddot(&grads.cis))
}

/// Total stored energy of matter, local plus gradient parts.
pub fn mechanical_energy(order: &Pair<Vec3>, grads: &Pair<Mat3>, k: &Kinematics, p: &MaterialParams) -> f64 {
    local_mechanical_energy(order, k, p) + gradient_energy(grads, p)
}

/// Free-space energy: electric field energy plus a small neo-Hookean term
/// that keeps the surrounding mesh well shaped.
pub fn free_space_energy(nominal: &Vec3, k: &Kinematics, p: &MaterialParams) -> f64 {
    electric_energy(nominal, k, p)
        + p.free_space_stiffness * neo_hookean(k, p.shear_modulus, p.lame_modulus)
}

/// Potentials of the external loads at a point. Surface loads are evaluated
/// as if the point lay on a loaded surface.
pub fn external_potentials(
    potential: f64,
    order: &Pair<Vec3>,
    placement: &Vec3,
    loads: &LoadData,
) -> ExternalPotentials {
    let b = &loads.bulk;
    let s = &loads.surface;
    ExternalPotentials {
        bulk: b.free_charge * potential
            - b.electronic.trans.dot(&order.trans)
            - b.electronic.cis.dot(&order.cis)
            - b.body_force.dot(placement),
        surface: s.free_charge * potential
            - s.electronic.trans.dot(&order.trans)
            - s.electronic.cis.dot(&order.cis)
            - s.traction.dot(placement),
    }
}

pub fn kinetic_densities(order_rate: &Pair<Vec3>, velocity: &Vec3, p: &MaterialParams) -> KineticDensities {
    KineticDensities {
        electronic: 0.5 * p.electronic_inertia * (order_rate.trans.norm_squared() + order_rate.cis.norm_squared()),
        mechanical: 0.5 * p.mass_density * velocity.norm_squared(),
    }
}

/// Rayleigh dissipation `1/2 J gamma0 |rate|^2`, summed over species.
pub fn dissipation_potential(order_rate: &Pair<Vec3>, k: &Kinematics, p: &MaterialParams) -> f64 {
    0.5 * k.jac * p.damping * (order_rate.trans.norm_squared() + order_rate.cis.norm_squared())
}

/// Spatial electric energy density `-1/2 eps0 |e|^2`.
pub fn spatial_electric_energy(spatial: &Vec3, p: &MaterialParams) -> f64 {
    -0.5 * p.permittivity * spatial.norm_squared()
}

/// Spatial electronic energy density `-pi . e`.
pub fn spatial_electronic_energy(order: &Pair<Vec3>, spatial: &Vec3, p: &MaterialParams) -> f64 {
    -p.polarization_density(order).dot(spatial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::{build_kinematics, push_forward_electric};
    use proptest::prelude::*;

    fn params() -> MaterialParams {
        MaterialParams {
            permittivity: 2.0,
            charge_density: Pair::new(0.7, -0.4),
            electronic_stiffness: Pair::new(1.5, 0.8),
            coupling: Pair::new(0.3, 0.6),
            gradient_penalty: Pair::new(0.2, 0.05),
            damping: 0.9,
            electronic_inertia: 0.4,
            mass_density: 1.3,
            shear_modulus: 1.1,
            lame_modulus: 2.5,
            free_space_stiffness: 1e-3,
        }
    }

    fn rotation(axis: Vec3, angle: f64) -> Mat3 {
        let n = axis * (1.0 / axis.norm());
        let w = Mat3([[0.0, -n[2], n[1]], [n[2], 0.0, -n[0]], [-n[1], n[0], 0.0]]);
        Mat3::IDENTITY + w * angle.sin() + (w * w) * (1.0 - angle.cos())
    }

    fn def_grad_strategy() -> impl Strategy<Value = Mat3> {
        proptest::array::uniform9(-0.3..0.3f64)
            .prop_map(|a| {
                Mat3::IDENTITY
                    + Mat3([[a[0], a[1], a[2]], [a[3], a[4], a[5]], [a[6], a[7], a[8]]])
            })
            .prop_filter("J in [0.5, 2]", |f| (0.5..=2.0).contains(&f.det()))
    }

    #[test]
    fn reference_state_values() {
        let k = Kinematics::identity();
        let p = params();
        let e = Vec3::new(1.0, -2.0, 0.5);
        assert!((electric_energy(&e, &k, &p) + 0.5 * 2.0 * 5.25).abs() < 1e-14);
        assert_eq!(neo_hookean(&k, 3.0, 4.0), 0.0);
        let y = Pair::new(Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0));
        // -(0.7 e1 - 0.4 e2) . E
        assert!((electronic_energy(&y, &e, &k, &p) + (0.7 + 0.8)).abs() < 1e-14);
    }

    #[test]
    fn validation_rejects_bad_values() {
        assert!(MaterialParams::default().validate().is_ok());
        let mut p = MaterialParams::default();
        p.permittivity = 0.0;
        assert!(p.validate().is_err());
        let mut p = MaterialParams::default();
        p.damping = f64::NAN;
        assert!(p.validate().is_err());
        let mut p = MaterialParams::default();
        p.mass_density = -1.0;
        let err = p.validate().unwrap_err().to_string();
        assert!(err.contains("mass_density"));
    }

    #[test]
    fn external_potential_values() {
        let loads = LoadData {
            bulk: BulkLoads {
                free_charge: 2.0,
                electronic: Pair::new(Vec3::new(1.0, 0.0, 0.0), Vec3::ZERO),
                body_force: Vec3::new(0.0, 0.0, -1.0),
            },
            surface: SurfaceLoads { free_charge: 0.5, ..Default::default() },
        };
        let y = Pair::new(Vec3::new(3.0, 0.0, 0.0), Vec3::new(1.0, 1.0, 1.0));
        let v = external_potentials(1.5, &y, &Vec3::new(0.0, 0.0, 2.0), &loads);
        assert_eq!(v.bulk, 3.0 - 3.0 + 2.0);
        assert_eq!(v.surface, 0.75);
    }

    proptest! {
        #[test]
        fn electric_energy_forms_agree(f in def_grad_strategy(), e in proptest::array::uniform3(-1.0..1.0f64)) {
            let k = build_kinematics(f).unwrap();
            let p = params();
            let big = Vec3(e);
            let small = push_forward_electric(&big, &k);
            let spatial_form = -0.5 * p.permittivity * k.jac * small.norm_squared();
            let mixed = -0.5 * p.permittivity * big.dot(&(k.inv_def_grad * k.cof).mul_vec(&big));
            let em = electric_energy(&big, &k, &p);
            prop_assert!((em - spatial_form).abs() < 1e-12 * (1.0 + em.abs()));
            prop_assert!((em - mixed).abs() < 1e-12 * (1.0 + em.abs()));
            prop_assert!((spatial_electric_energy(&small, &p) * k.jac - em).abs() < 1e-12 * (1.0 + em.abs()));
        }

        #[test]
        fn electronic_energy_is_spatial_form_times_j(
            f in def_grad_strategy(),
            e in proptest::array::uniform3(-1.0..1.0f64),
            a in proptest::array::uniform3(-1.0..1.0f64),
            b in proptest::array::uniform3(-1.0..1.0f64),
        ) {
            let k = build_kinematics(f).unwrap();
            let p = params();
            let y = Pair::new(Vec3(a), Vec3(b));
            let cm = electronic_energy(&y, &Vec3(e), &k, &p);
            let spatial = spatial_electronic_energy(&y, &push_forward_electric(&Vec3(e), &k), &p);
            prop_assert!((cm - k.jac * spatial).abs() < 1e-12);
        }

        #[test]
        fn stored_and_electric_energies_are_objective(
            f in def_grad_strategy(),
            e in proptest::array::uniform3(-1.0..1.0f64),
            a in proptest::array::uniform3(-1.0..1.0f64),
            angle in -3.0..3.0f64,
        ) {
            // E is a material field and transforms trivially; only F is rotated.
            let p = params();
            let q = rotation(Vec3::new(0.3, -1.0, 0.5), angle);
            let k = build_kinematics(f).unwrap();
            let kq = build_kinematics(q * f).unwrap();
            let y = Pair::new(Vec3(a), Vec3(a) * 0.5);
            let w = local_mechanical_energy(&y, &k, &p);
            let wq = local_mechanical_energy(&y, &kq, &p);
            prop_assert!((w - wq).abs() < 1e-11 * (1.0 + w.abs()));
            let em = electric_energy(&Vec3(e), &k, &p);
            let emq = electric_energy(&Vec3(e), &kq, &p);
            prop_assert!((em - emq).abs() < 1e-11 * (1.0 + em.abs()));
        }

        #[test]
        fn electronic_coupling_is_not_objective_with_fixed_order(
            angle in 0.5..2.5f64,
        ) {
            // With the order parameter held fixed, a superposed rotation changes
            // the coupling energy; the order parameter must co-rotate.
            let p = params();
            let q = rotation(Vec3::new(0.0, 0.0, 1.0), angle);
            let y = Pair::new(Vec3::new(1.0, 0.0, 0.0), Vec3::ZERO);
            let e = Vec3::new(1.0, 0.0, 0.0);
            let c = electronic_energy(&y, &e, &Kinematics::identity(), &p);
            let cq = electronic_energy(&y, &e, &build_kinematics(q).unwrap(), &p);
            prop_assert!((c - cq).abs() > 1e-3);
        }

        #[test]
        fn neo_hookean_vanishes_only_at_rotations(angle in -3.0..3.0f64) {
            let q = rotation(Vec3::new(1.0, 2.0, 3.0), angle);
            prop_assert!(neo_hookean(&build_kinematics(q).unwrap(), 1.0, 2.0).abs() < 1e-13);
        }
    }
}
