//! State functions derived from the energy densities: electric fluxes,
//! electronic stresses and sources, Piola/Cauchy stresses and momenta.

pub mod fd;
pub mod tangent;

use crate::energy::{spatial_electric_energy, spatial_electronic_energy, MaterialParams};
use crate::kinematics::{df_df, dj_df, dk_df, push_forward_electric, Kinematics};
use crate::species::Pair;
use crate::tensor::{Mat3, Vec3};

/// Local state at a material point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PointState {
    /// Nominal electric field `E`.
    pub electric_field: Vec3,
    pub order: Pair<Vec3>,
    pub order_grad: Pair<Mat3>,
    pub def_grad: Mat3,
    pub order_rate: Pair<Vec3>,
    pub velocity: Vec3,
}

impl PointState {
    pub fn reference() -> Self {
        PointState { def_grad: Mat3::IDENTITY, ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElectricState {
    pub nominal_free: Vec3,
    pub nominal_polarization: Vec3,
    pub nominal: Vec3,
    pub spatial_free: Vec3,
    pub spatial_polarization: Vec3,
    pub spatial: Vec3,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElectronicState {
    pub stress: Pair<Mat3>,
    pub spatial_stress: Pair<Mat3>,
    pub energetic_source: Pair<Vec3>,
    pub dissipative_source: Pair<Vec3>,
    pub source: Pair<Vec3>,
    pub interior_body: Pair<Vec3>,
    pub exterior_body: Pair<Vec3>,
    pub body: Pair<Vec3>,
    pub momentum: Pair<Vec3>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StressState {
    pub electric: Mat3,
    pub electronic: Mat3,
    pub mechanical: Mat3,
    pub total: Mat3,
    pub spatial_electric: Mat3,
    pub spatial_electronic: Mat3,
    pub spatial_mechanical: Mat3,
    pub spatial_total: Mat3,
    pub momentum: Vec3,
}

pub fn electric_flux(order: &Pair<Vec3>, nominal_field: &Vec3, k: &Kinematics, p: &MaterialParams) -> ElectricState {
    let e = push_forward_electric(nominal_field, k);
    let pi = p.polarization_density(order);
    let spatial_free = e * p.permittivity;
    let nominal_free = spatial_free.dot_mat(&k.cof);
    let nominal_polarization = pi.dot_mat(&k.cof);
    let nominal = nominal_free + nominal_polarization;
    ElectricState {
        nominal_free,
        nominal_polarization,
        nominal,
        spatial_free,
        spatial_polarization: pi,
        spatial: nominal.dot_mat(&k.inv_cof),
    }
}

pub fn electronic_stress_and_sources(
    point: &PointState,
    k: &Kinematics,
    p: &MaterialParams,
    exterior_body: Pair<Vec3>,
) -> ElectronicState {
    let c = k.right_cauchy_green();
    let e = push_forward_electric(&point.electric_field, k);
    let stress = Pair::new(
        point.order_grad.trans * p.gradient_penalty.trans,
        point.order_grad.cis * p.gradient_penalty.cis,
    );
    let energetic_source = Pair::new(
        point.order.trans * p.electronic_stiffness.trans + c.mul_vec(&point.order.trans) * p.coupling.trans,
        point.order.cis * p.electronic_stiffness.cis + c.mul_vec(&point.order.cis) * p.coupling.cis,
    );
    let dissipative_source = point.order_rate * (k.jac * p.damping);
    let interior_body = Pair::new(
        e * (k.jac * p.charge_density.trans),
        e * (k.jac * p.charge_density.cis),
    );
    ElectronicState {
        stress,
        spatial_stress: stress.map(|s| *s * k.inv_cof),
        energetic_source,
        dissipative_source,
        source: energetic_source + dissipative_source,
        interior_body,
        exterior_body,
        body: interior_body + exterior_body,
        momentum: point.order_rate * p.electronic_inertia,
    }
}

/// First Piola stress of the compressible neo-Hookean energy.
pub fn neo_hookean_stress(k: &Kinematics, shear: f64, lame: f64) -> Mat3 {
    let f_t = k.inv_def_grad.transpose();
    (k.def_grad - f_t) * shear + f_t * (lame * k.jac.ln())
}

pub fn total_stress(point: &PointState, k: &Kinematics, p: &MaterialParams) -> StressState {
    let e = push_forward_electric(&point.electric_field, k);
    let e_s = spatial_electric_energy(&e, p);
    let c_s = spatial_electronic_energy(&point.order, &e, p);
    let pi = p.polarization_density(&point.order);

    let spatial_electric = Mat3::IDENTITY * e_s + e.outer(&(e * p.permittivity));
    let spatial_electronic = Mat3::IDENTITY * c_s + e.outer(&pi);
    let electric = spatial_electric * k.cof;
    let electronic = spatial_electronic * k.cof;

    let mut mechanical = neo_hookean_stress(k, p.shear_modulus, p.lame_modulus);
    for s in 0..2 {
        let y = point.order.get(s);
        mechanical += k.def_grad.mul_vec(y).outer(y) * *p.coupling.get(s);
    }
    let total = electric + electronic + mechanical;
    StressState {
        electric,
        electronic,
        mechanical,
        total,
        spatial_electric,
        spatial_electronic,
        spatial_mechanical: mechanical * k.inv_cof,
        spatial_total: total * k.inv_cof,
        momentum: point.velocity * p.mass_density,
    }
}

/// Stress in the free-space region: electric stress plus the fictitious
/// elastic term.
pub fn free_space_stress(nominal_field: &Vec3, k: &Kinematics, p: &MaterialParams) -> Mat3 {
    let e = push_forward_electric(nominal_field, k);
    let spatial = Mat3::IDENTITY * spatial_electric_energy(&e, p) + e.outer(&(e * p.permittivity));
    spatial * k.cof + neo_hookean_stress(k, p.shear_modulus, p.lame_modulus) * p.free_space_stiffness
}

pub fn free_space_flux(nominal_field: &Vec3, k: &Kinematics, p: &MaterialParams) -> Vec3 {
    (push_forward_electric(nominal_field, k) * p.permittivity).dot_mat(&k.cof)
}

pub fn momenta(order_rate: &Pair<Vec3>, velocity: &Vec3, p: &MaterialParams) -> (Pair<Vec3>, Vec3) {
    (*order_rate * p.electronic_inertia, *velocity * p.mass_density)
}

/// Dual kinetic energy. The electronic term is omitted for massless
/// electronic modes.
pub fn dual_kinetic(order_momentum: &Pair<Vec3>, momentum: &Vec3, p: &MaterialParams) -> f64 {
    let mut t = 0.5 * momentum.norm_squared() / p.mass_density;
    if p.electronic_inertia > 0.0 {
        t += 0.5 * (order_momentum.trans.norm_squared() + order_momentum.cis.norm_squared()) / p.electronic_inertia;
    }
    t
}

/// Electric and electronic nominal stresses obtained by differentiating the
/// stored energies through `dJ/dF`, `df/dF` and `dK/dF`.
pub fn stresses_by_chain_rule(point: &PointState, k: &Kinematics, p: &MaterialParams) -> (Mat3, Mat3) {
    let big_e = point.electric_field;
    let e = push_forward_electric(&big_e, k);
    let de_s = e * (-p.permittivity);
    let weights = Mat3::from_fn(|a, i| big_e[a] * de_s[i]);
    let electric = dj_df(k) * spatial_electric_energy(&e, p) + df_df(k).mat_ddot(&weights) * k.jac;
    let pi = p.polarization_density(&point.order);
    let electronic = dk_df(k).mat_ddot(&pi.outer(&big_e)) * -1.0;
    (electric, electronic)
}

/// Smooth fields prescribed in the current configuration.
pub trait SpatialFields {
    /// Spatial electric field `e = -grad y`; must be a gradient field.
    fn electric_field(&self, x: &Vec3) -> Vec3;
    fn order(&self, x: &Vec3) -> Pair<Vec3>;
    fn def_grad(&self, x: &Vec3) -> Mat3;
}

fn spatial_point(fields: &dyn SpatialFields, x: &Vec3, p: &MaterialParams) -> (StressState, ElectricState, f64) {
    let f = fields.def_grad(x);
    let k = crate::kinematics::build_kinematics(f).expect("manufactured deformation must be orientation preserving");
    let e = fields.electric_field(x);
    let point = PointState {
        electric_field: crate::kinematics::pull_back_electric(&e, &k),
        order: fields.order(x),
        def_grad: f,
        ..Default::default()
    };
    let stress = total_stress(&point, &k, p);
    let flux = electric_flux(&point.order, &point.electric_field, &k, p);
    let c_s = spatial_electronic_energy(&point.order, &e, p);
    (stress, flux, c_s)
}

/// Norm of `div s - div(c_s i + s_mech) - grad e . p - q e` with `q = div d`,
/// all spatial derivatives taken by central differences with step `h`.
pub fn lorentz_identity_residual(fields: &dyn SpatialFields, x: &Vec3, p: &MaterialParams, h: f64) -> f64 {
    let mut div_s = Vec3::ZERO;
    let mut div_rest = Vec3::ZERO;
    let mut div_d = 0.0;
    let mut grad_e = Mat3::ZERO;
    for j in 0..3 {
        let xp = *x + Vec3::unit(j) * h;
        let xm = *x - Vec3::unit(j) * h;
        let (sp, dp, cp) = spatial_point(fields, &xp, p);
        let (sm, dm, cm) = spatial_point(fields, &xm, p);
        let inv = 0.5 / h;
        let rest_p = Mat3::IDENTITY * cp + sp.spatial_mechanical;
        let rest_m = Mat3::IDENTITY * cm + sm.spatial_mechanical;
        div_s += (sp.spatial_total - sm.spatial_total).col(j) * inv;
        div_rest += (rest_p - rest_m).col(j) * inv;
        div_d += (dp.spatial[j] - dm.spatial[j]) * inv;
        let de = (fields.electric_field(&xp) - fields.electric_field(&xm)) * inv;
        for i in 0..3 {
            grad_e[(i, j)] = de[i];
        }
    }
    let e = fields.electric_field(x);
    let pi = p.polarization_density(&fields.order(x));
    (div_s - div_rest - grad_e.mul_vec(&pi) - e * div_d).norm()
}

#[cfg(test)]
mod tests {
    use super::fd::{central_gradient, relative_error};
    use super::*;
    use crate::energy::{
        dissipation_potential, electric_energy, electronic_energy, kinetic_densities, local_mechanical_energy,
        mechanical_energy,
    };
    use crate::kinematics::build_kinematics;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-6;

    fn random_params(rng: &mut impl Rng) -> MaterialParams {
        MaterialParams {
            permittivity: rng.gen_range(0.5..2.0),
            charge_density: Pair::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            electronic_stiffness: Pair::new(rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0)),
            coupling: Pair::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)),
            gradient_penalty: Pair::new(rng.gen_range(0.05..1.0), rng.gen_range(0.05..1.0)),
            damping: rng.gen_range(0.1..2.0),
            electronic_inertia: rng.gen_range(0.1..2.0),
            mass_density: rng.gen_range(0.5..2.0),
            shear_modulus: rng.gen_range(0.5..2.0),
            lame_modulus: rng.gen_range(0.5..5.0),
            free_space_stiffness: 1e-3,
        }
    }

    fn rvec(rng: &mut impl Rng) -> Vec3 {
        Vec3::from_fn(|_| rng.gen_range(-1.0..1.0))
    }

    fn rmat(rng: &mut impl Rng, scale: f64) -> Mat3 {
        Mat3::from_fn(|_, _| rng.gen_range(-scale..scale))
    }

    fn random_point(rng: &mut impl Rng) -> PointState {
        let def_grad = loop {
            let f = Mat3::IDENTITY + rmat(rng, 0.3);
            if (0.5..=2.0).contains(&f.det()) {
                break f;
            }
        };
        PointState {
            electric_field: rvec(rng),
            order: Pair::new(rvec(rng), rvec(rng)),
            order_grad: Pair::new(rmat(rng, 1.0), rmat(rng, 1.0)),
            def_grad,
            order_rate: Pair::new(rvec(rng), rvec(rng)),
            velocity: rvec(rng),
        }
    }

    fn mat_to_vec(m: &Mat3) -> Vec<f64> {
        m.0.iter().flatten().copied().collect()
    }

    fn vec_err(analytic: &[f64], fd: &[f64]) -> f64 {
        relative_error(analytic, fd)
    }

    #[test]
    fn identity_flux() {
        let p = MaterialParams { permittivity: 1.0, ..Default::default() };
        let k = Kinematics::identity();
        let s = electric_flux(&Pair::default(), &Vec3::new(1.0, 0.0, 0.0), &k, &p);
        assert_eq!(s.nominal, Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(s.spatial, Vec3::new(1.0, 0.0, 0.0));
        let z = electric_flux(&Pair::default(), &Vec3::ZERO, &k, &p);
        assert_eq!(z.nominal, Vec3::ZERO);
    }

    #[test]
    fn gradient_penalty_stress() {
        let p = MaterialParams { gradient_penalty: Pair::new(2.0, 1.0), ..Default::default() };
        let mut point = PointState::reference();
        point.order_grad.trans = Vec3::unit(0).outer(&Vec3::unit(1));
        let s = electronic_stress_and_sources(&point, &Kinematics::identity(), &p, Pair::default());
        assert_eq!(s.stress.trans, Vec3::unit(0).outer(&Vec3::unit(1)) * 2.0);
        assert_eq!(s.stress.cis, Mat3::ZERO);
    }

    #[test]
    fn reference_stress_vanishes() {
        let p = MaterialParams::default();
        let s = total_stress(&PointState::reference(), &Kinematics::identity(), &p);
        assert!(s.total.max_abs() < 1e-15);
    }

    #[test]
    fn maxwell_stress_of_unit_field() {
        let p = MaterialParams { permittivity: 1.0, ..Default::default() };
        let point = PointState { electric_field: Vec3::new(1.0, 0.0, 0.0), ..PointState::reference() };
        let s = total_stress(&point, &Kinematics::identity(), &p);
        assert_eq!(s.spatial_electric, Mat3::diagonal(Vec3::new(0.5, -0.5, -0.5)));
    }

    #[test]
    fn momentum_values() {
        let p = MaterialParams { mass_density: 2.0, ..Default::default() };
        let (_, m) = momenta(&Pair::default(), &Vec3::new(0.0, 1.0, 0.0), &p);
        assert_eq!(m, Vec3::new(0.0, 2.0, 0.0));
        assert_eq!(dual_kinetic(&Pair::default(), &Vec3::new(2.0, 0.0, 0.0), &p), 1.0);
        assert_eq!(dual_kinetic(&Pair::default(), &Vec3::ZERO, &p), 0.0);
    }

    #[test]
    fn fluxes_match_fd_of_energies() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let p = random_params(&mut rng);
            let pt = random_point(&mut rng);
            let k = build_kinematics(pt.def_grad).unwrap();
            let flux = electric_flux(&pt.order, &pt.electric_field, &k, &p);
            let fd_e = central_gradient(&pt.electric_field.0, 1e-6, |x| {
                -electric_energy(&Vec3([x[0], x[1], x[2]]), &k, &p)
            });
            let fd_c = central_gradient(&pt.electric_field.0, 1e-6, |x| {
                -electronic_energy(&pt.order, &Vec3([x[0], x[1], x[2]]), &k, &p)
            });
            assert!(vec_err(&flux.nominal_free.0, &fd_e) < TOL);
            assert!(vec_err(&flux.nominal_polarization.0, &fd_c) < TOL);
            assert!((flux.spatial - flux.nominal.dot_mat(&k.inv_cof)).max_abs() < 1e-12);
        }
    }

    #[test]
    fn electronic_quantities_match_fd() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let p = random_params(&mut rng);
            let pt = random_point(&mut rng);
            let k = build_kinematics(pt.def_grad).unwrap();
            let st = electronic_stress_and_sources(&pt, &k, &p, Pair::default());
            for s in 0..2 {
                let fd_p = central_gradient(&mat_to_vec(pt.order_grad.get(s)), 1e-6, |x| {
                    let mut g = pt.order_grad;
                    *g.get_mut(s) = Mat3::from_fn(|i, j| x[3 * i + j]);
                    mechanical_energy(&pt.order, &g, &k, &p)
                });
                assert!(vec_err(&mat_to_vec(st.stress.get(s)), &fd_p) < TOL);

                let fd_sharp = central_gradient(&pt.order.get(s).0, 1e-6, |x| {
                    let mut y = pt.order;
                    *y.get_mut(s) = Vec3([x[0], x[1], x[2]]);
                    local_mechanical_energy(&y, &k, &p)
                });
                assert!(vec_err(&st.energetic_source.get(s).0, &fd_sharp) < TOL);

                let fd_flat = central_gradient(&pt.order_rate.get(s).0, 1e-6, |x| {
                    let mut v = pt.order_rate;
                    *v.get_mut(s) = Vec3([x[0], x[1], x[2]]);
                    dissipation_potential(&v, &k, &p)
                });
                assert!(vec_err(&st.dissipative_source.get(s).0, &fd_flat) < TOL);

                let fd_body = central_gradient(&pt.order.get(s).0, 1e-6, |x| {
                    let mut y = pt.order;
                    *y.get_mut(s) = Vec3([x[0], x[1], x[2]]);
                    -electronic_energy(&y, &pt.electric_field, &k, &p)
                });
                assert!(vec_err(&st.interior_body.get(s).0, &fd_body) < TOL);

                let fd_mom = central_gradient(&pt.order_rate.get(s).0, 1e-6, |x| {
                    let mut v = pt.order_rate;
                    *v.get_mut(s) = Vec3([x[0], x[1], x[2]]);
                    kinetic_densities(&v, &pt.velocity, &p).electronic
                });
                assert!(vec_err(&st.momentum.get(s).0, &fd_mom) < TOL);
            }
        }
    }

    #[test]
    fn stresses_match_fd_of_energies() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let p = random_params(&mut rng);
            let pt = random_point(&mut rng);
            let k = build_kinematics(pt.def_grad).unwrap();
            let st = total_stress(&pt, &k, &p);
            let at = |x: &[f64]| build_kinematics(Mat3::from_fn(|i, j| x[3 * i + j])).unwrap();
            let f0 = mat_to_vec(&pt.def_grad);
            let fd_el = central_gradient(&f0, 1e-6, |x| electric_energy(&pt.electric_field, &at(x), &p));
            let fd_tr = central_gradient(&f0, 1e-6, |x| electronic_energy(&pt.order, &pt.electric_field, &at(x), &p));
            let fd_me = central_gradient(&f0, 1e-6, |x| local_mechanical_energy(&pt.order, &at(x), &p));
            assert!(vec_err(&mat_to_vec(&st.electric), &fd_el) < TOL);
            assert!(vec_err(&mat_to_vec(&st.electronic), &fd_tr) < TOL);
            assert!(vec_err(&mat_to_vec(&st.mechanical), &fd_me) < TOL);
            assert!((st.spatial_total - st.total * k.inv_cof).max_abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_stresses_match_chain_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..100 {
            let p = random_params(&mut rng);
            let pt = random_point(&mut rng);
            let k = build_kinematics(pt.def_grad).unwrap();
            let st = total_stress(&pt, &k, &p);
            let (el, tr) = stresses_by_chain_rule(&pt, &k, &p);
            assert!(vec_err(&mat_to_vec(&st.electric), &mat_to_vec(&el)) < 1e-12);
            assert!(vec_err(&mat_to_vec(&st.electronic), &mat_to_vec(&tr)) < 1e-12);
        }
    }

    #[test]
    fn legendre_duality_of_kinetic_energy() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..100 {
            let p = random_params(&mut rng);
            let v = Pair::new(rvec(&mut rng), rvec(&mut rng));
            let u = rvec(&mut rng);
            let (pv, pu) = momenta(&v, &u, &p);
            let kin = kinetic_densities(&v, &u, &p);
            let lhs = dual_kinetic(&pv, &pu, &p) + kin.electronic + kin.mechanical;
            let rhs = pv.trans.dot(&v.trans) + pv.cis.dot(&v.cis) + pu.dot(&u);
            assert!((lhs - rhs).abs() < 1e-12 * (1.0 + rhs.abs()));
        }
    }

    struct Uniform;

    impl SpatialFields for Uniform {
        fn electric_field(&self, _: &Vec3) -> Vec3 {
            Vec3::new(0.3, -0.2, 0.5)
        }
        fn order(&self, _: &Vec3) -> Pair<Vec3> {
            Pair::new(Vec3::new(0.1, 0.2, 0.3), Vec3::new(-0.2, 0.0, 0.1))
        }
        fn def_grad(&self, _: &Vec3) -> Mat3 {
            Mat3::IDENTITY + Mat3::from_fn(|i, j| 0.05 * (i as f64 - j as f64))
        }
    }

    /// Potential `y = x.A.x / 2 + c x0 x1 x2`, smooth order and deformation.
    struct Polynomial;

    impl SpatialFields for Polynomial {
        fn electric_field(&self, x: &Vec3) -> Vec3 {
            let a = Mat3([[1.0, 0.2, -0.1], [0.2, -0.5, 0.3], [-0.1, 0.3, 0.7]]);
            let c = 0.4;
            -(a.mul_vec(x) + Vec3::new(x[1] * x[2], x[0] * x[2], x[0] * x[1]) * c)
        }
        fn order(&self, x: &Vec3) -> Pair<Vec3> {
            Pair::new(
                Vec3::new(x[0] * x[1], 0.3 * x[2] * x[2], 0.1 + x[0]),
                Vec3::new(0.2 * x[1], x[0] * x[2], -0.4 * x[1] * x[1]),
            )
        }
        fn def_grad(&self, x: &Vec3) -> Mat3 {
            Mat3::IDENTITY + Mat3::from_fn(|i, j| 0.1 * x[(i + j) % 3] * ((i + 2 * j) as f64 - 3.0) / 3.0)
        }
    }

    #[test]
    fn lorentz_identity_uniform_fields() {
        let p = MaterialParams::default();
        assert_eq!(lorentz_identity_residual(&Uniform, &Vec3::new(0.1, 0.2, 0.3), &p, 1e-5), 0.0);
    }

    #[test]
    fn lorentz_identity_polynomial_fields() {
        let p = MaterialParams { coupling: Pair::new(0.4, 0.2), ..Default::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..20 {
            let x = rvec(&mut rng) * 0.5;
            let r = lorentz_identity_residual(&Polynomial, &x, &p, 1e-5);
            assert!(r < 1e-5, "residual {r}");
        }
    }
}
