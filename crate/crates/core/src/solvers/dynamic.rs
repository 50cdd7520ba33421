use nalgebra::{DMatrix, DVector};

use super::newton::{newton, scatter, sub_mat, sub_vec, NewtonReport};
use super::quasistatic::{equilibrate, rate_norms, state_at};
use super::{quad_form, Diagnostics, Frame, Scenario, SolverConfig, Trajectory};
use crate::error::{Error, Result};
use crate::femcore::{
    assemble_damping, assemble_gram, assemble_mass, assemble_system, potential_energy, FieldKind, Model, NodalFields,
};

/// How a dof enters the time-discrete equations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DofRole {
    Fixed,
    /// Second order in time with the given inertia coefficient.
    Massive(f64),
    /// Rate-dependent through damping only.
    FirstOrder,
    /// Instantaneous equilibrium.
    Algebraic,
}

pub fn classify_dofs(model: &Model, dissipative: bool) -> Vec<DofRole> {
    let p = &model.params;
    let layout = &model.layout;
    (0..layout.n_dofs())
        .map(|d| {
            if layout.fixed[d] {
                return DofRole::Fixed;
            }
            match layout.kind[d] {
                FieldKind::Potential => DofRole::Algebraic,
                FieldKind::Electronic if p.electronic_inertia > 0.0 => DofRole::Massive(p.electronic_inertia),
                FieldKind::Electronic if dissipative && p.damping > 0.0 => DofRole::FirstOrder,
                FieldKind::Electronic => DofRole::Algebraic,
                FieldKind::Placement if model.mesh.node_in_matter[layout.node[d]] && p.mass_density > 0.0 => {
                    DofRole::Massive(p.mass_density)
                }
                FieldKind::Placement => DofRole::Algebraic,
            }
        })
        .collect()
}

struct Setup<'a> {
    model: &'a Model,
    cfg: &'a SolverConfig,
    theta: f64,
    dissipative: bool,
    roles: Vec<DofRole>,
    free: Vec<usize>,
    massive: Vec<usize>,
    algebraic: Vec<usize>,
    inertia: DVector<f64>,
}

impl<'a> Setup<'a> {
    fn new(model: &'a Model, cfg: &'a SolverConfig) -> Self {
        let dissipative = cfg.dissipative && model.params.damping > 0.0;
        let roles = classify_dofs(model, dissipative);
        let pick = |f: fn(&DofRole) -> bool| -> Vec<usize> { (0..roles.len()).filter(|&d| f(&roles[d])).collect() };
        let free = pick(|r| *r != DofRole::Fixed);
        let massive = pick(|r| matches!(r, DofRole::Massive(_)));
        let algebraic = pick(|r| *r == DofRole::Algebraic);
        let inertia = DVector::from_iterator(
            roles.len(),
            roles.iter().map(|r| if let DofRole::Massive(c) = r { *c } else { 0.0 }),
        );
        Setup { model, cfg, theta: cfg.integrator().theta(), dissipative, roles, free, massive, algebraic, inertia }
    }

    fn damping(&self, x: &DVector<f64>, t: f64) -> Result<DMatrix<f64>> {
        let n = self.model.n_dofs();
        if self.dissipative {
            assemble_damping(self.model, &state_at(self.model, x, t))
        } else {
            Ok(DMatrix::zeros(n, n))
        }
    }

    /// Residual and tangent at the weighted point and, when it differs, at
    /// the step end.
    fn systems(
        &self,
        x_n: &DVector<f64>,
        x: &DVector<f64>,
        t_n: f64,
        dt: f64,
    ) -> Result<((DVector<f64>, DMatrix<f64>), Option<(DVector<f64>, DMatrix<f64>)>)> {
        let x_th = x_n + (x - x_n) * self.theta;
        let at_theta = assemble_system(self.model, &state_at(self.model, &x_th, t_n + self.theta * dt), None)?;
        let at_end = if self.theta < 1.0 {
            Some(assemble_system(self.model, &state_at(self.model, x, t_n + dt), None)?)
        } else {
            None
        };
        Ok((at_theta, at_end))
    }

    fn initial(&self, sc: &Scenario) -> Result<(DVector<f64>, DVector<f64>, NewtonReport)> {
        let layout = &self.model.layout;
        let mut x = sc.initial.fields.to_vector(layout);
        let mut v = sc.initial.rates.as_ref().map_or_else(|| DVector::zeros(x.len()), |r| r.to_vector(layout));
        for d in 0..v.len() {
            if !matches!(self.roles[d], DofRole::Massive(_)) {
                v[d] = 0.0;
            }
        }
        let rep = equilibrate(self.model, &mut x, &self.algebraic, sc.initial.time, None, self.cfg)?;
        Ok((x, v, rep))
    }

    fn frame(
        &self,
        x: &DVector<f64>,
        rates: &DVector<f64>,
        momenta: Option<&DVector<f64>>,
        t: f64,
        mut diagnostics: Diagnostics,
    ) -> Result<Frame> {
        let layout = &self.model.layout;
        diagnostics.potential = potential_energy(self.model, &state_at(self.model, x, t))?;
        diagnostics.total = diagnostics.kinetic + diagnostics.potential;
        let (pr, fr) = rate_norms(self.model, rates);
        diagnostics.potential_rate = pr;
        diagnostics.free_space_rate = fr;
        let mut state = state_at(self.model, x, t);
        state.rates = Some(NodalFields::from_vector(layout, rates));
        state.momenta = momenta.map(|p| NodalFields::from_vector(layout, p));
        Ok(Frame { state, diagnostics })
    }

    fn load_work(&self, x_n: &DVector<f64>, x: &DVector<f64>, t_n: f64, t: f64) -> Result<f64> {
        if !self.model.loads.is_time_dependent() {
            return Ok(0.0);
        }
        let x_th = x_n + (x - x_n) * self.theta;
        Ok(potential_energy(self.model, &state_at(self.model, &x_th, t))?
            - potential_energy(self.model, &state_at(self.model, &x_th, t_n))?)
    }
}

/// Time stepping of the discrete Lagrangian equations with a one-parameter
/// scheme: midpoint (`theta = 1/2`) or backward Euler (`theta = 1`).
pub fn solve_dynamic_lagrangian(sc: &Scenario, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let su = Setup::new(&sc.model, cfg);
    let model = &sc.model;
    let mass = assemble_mass(model);
    let theta = su.theta;
    let (mut x, mut v, rep) = su.initial(sc)?;
    let t0 = sc.initial.time;
    let mut traj = Trajectory::default();
    let d0 = Diagnostics {
        kinetic: 0.5 * quad_form(&mass, &v),
        newton_iterations: rep.iterations,
        residual_norm: rep.residual,
        ..Default::default()
    };
    traj.frames.push(su.frame(&x, &v, None, t0, d0)?);
    let (mut dissipated, mut external) = (0.0, 0.0);
    let mut t_n = t0;
    let n = model.n_dofs();

    for step in 1..=cfg.n_steps() {
        let t = t0 + cfg.time(step);
        let dt = t - t_n;
        let x_n = x.clone();
        let v_n = v.clone();
        let damping = su.damping(&x_n, t_n)?;
        let mut z = sub_vec(&x_n, &su.free);
        let rep = newton(&mut z, cfg.newton_tol, cfg.max_iter, |z| {
            let mut xt = x_n.clone();
            scatter(&mut xt, &su.free, z);
            let v_th = (&xt - &x_n) / dt;
            let v_end = (&v_th - &v_n * (1.0 - theta)) / theta;
            let ((g_th, k_th), end) = su.systems(&x_n, &xt, t_n, dt)?;
            let (g_end, k_end) = end.as_ref().map_or((&g_th, &k_th), |(g, k)| (g, k));
            let inertial = &mass * (&v_end - &v_n) / dt;
            let friction = &damping * &v_th;
            let mut r = DVector::zeros(n);
            let mut jac = DMatrix::zeros(n, n);
            for &i in &su.free {
                match su.roles[i] {
                    DofRole::Massive(_) | DofRole::FirstOrder => {
                        r[i] = inertial[i] + g_th[i] + friction[i];
                        for &j in &su.free {
                            jac[(i, j)] = mass[(i, j)] / (theta * dt * dt) + theta * k_th[(i, j)] + damping[(i, j)] / dt;
                        }
                    }
                    DofRole::Algebraic => {
                        r[i] = g_end[i];
                        for &j in &su.free {
                            jac[(i, j)] = k_end[(i, j)];
                        }
                    }
                    DofRole::Fixed => unreachable!(),
                }
            }
            Ok((sub_vec(&r, &su.free), sub_mat(&jac, &su.free, &su.free)))
        })?;
        scatter(&mut x, &su.free, &z);
        let v_th = (&x - &x_n) / dt;
        v = (&v_th - &v_n * (1.0 - theta)) / theta;
        for d in 0..n {
            if !matches!(su.roles[d], DofRole::Massive(_)) {
                v[d] = v_th[d];
            }
        }
        dissipated += dt * quad_form(&damping, &v_th);
        external += su.load_work(&x_n, &x, t_n, t)?;
        let diag = Diagnostics {
            kinetic: 0.5 * quad_form(&mass, &v),
            dissipated,
            external_work: external,
            newton_iterations: rep.iterations,
            residual_norm: rep.residual,
            ..Default::default()
        };
        traj.frames.push(su.frame(&x, &v, None, t, diag)?);
        t_n = t;
    }
    Ok(traj)
}

/// Time stepping of the constrained Hamiltonian equations. Momenta are
/// unknowns only on massive dofs; the momenta of the remaining dofs are
/// constrained to vanish.
pub fn solve_dynamic_hamiltonian(sc: &Scenario, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let su = Setup::new(&sc.model, cfg);
    let model = &sc.model;
    let gram = assemble_gram(model);
    let theta = su.theta;
    let n = model.n_dofs();
    let (nf, nm) = (su.free.len(), su.massive.len());
    let (mut x, v0, rep) = su.initial(sc)?;
    // Nodal momentum densities `c v`; the momentum functional is `G p`.
    let mut p = v0.component_mul(&su.inertia);
    let kinetic = |p: &DVector<f64>| {
        let u = velocity(p, &su.inertia);
        0.5 * u.dot(&(&gram * p))
    };
    let t0 = sc.initial.time;
    let mut traj = Trajectory::default();
    let d0 = Diagnostics {
        kinetic: kinetic(&p),
        newton_iterations: rep.iterations,
        residual_norm: rep.residual,
        ..Default::default()
    };
    traj.frames.push(su.frame(&x, &velocity(&p, &su.inertia), Some(&p), t0, d0)?);
    let (mut dissipated, mut external) = (0.0, 0.0);
    let mut t_n = t0;
    let row_of: Vec<usize> = {
        let mut r = vec![usize::MAX; n];
        for (k, &i) in su.massive.iter().enumerate() {
            r[i] = k;
        }
        r
    };

    for step in 1..=cfg.n_steps() {
        let t = t0 + cfg.time(step);
        let dt = t - t_n;
        let x_n = x.clone();
        let p_n = p.clone();
        let damping = su.damping(&x_n, t_n)?;
        let mut z = DVector::zeros(nf + nm);
        z.rows_mut(0, nf).copy_from(&sub_vec(&x_n, &su.free));
        z.rows_mut(nf, nm).copy_from(&sub_vec(&p_n, &su.massive));
        let unpack = |z: &DVector<f64>| {
            let mut xt = x_n.clone();
            scatter(&mut xt, &su.free, &z.rows(0, nf).into_owned());
            let mut pt = DVector::zeros(n);
            scatter(&mut pt, &su.massive, &z.rows(nf, nm).into_owned());
            (xt, pt)
        };
        let rep = newton(&mut z, cfg.newton_tol, cfg.max_iter, |z| {
            let (xt, pt) = unpack(z);
            let p_th = &p_n + (&pt - &p_n) * theta;
            let u_th = velocity(&p_th, &su.inertia);
            let rate = (&xt - &x_n) / dt;
            let ((g_th, k_th), end) = su.systems(&x_n, &xt, t_n, dt)?;
            let (g_end, k_end) = end.as_ref().map_or((&g_th, &k_th), |(g, k)| (g, k));
            let kin = &gram * (&rate - &u_th);
            let mom = &gram * (&pt - &p_n) / dt;
            let fr_mom = &damping * &u_th;
            let fr_first = &damping * &rate;
            let mut r = DVector::zeros(nm + nf);
            let mut jac = DMatrix::zeros(nm + nf, nf + nm);
            for (k, &i) in su.massive.iter().enumerate() {
                r[k] = kin[i];
                for (cj, &j) in su.free.iter().enumerate() {
                    jac[(k, cj)] = gram[(i, j)] / dt;
                }
                for (ck, &j) in su.massive.iter().enumerate() {
                    jac[(k, nf + ck)] = -theta * gram[(i, j)] / su.inertia[j];
                }
            }
            for (ri, &i) in su.free.iter().enumerate() {
                let row = nm + ri;
                match su.roles[i] {
                    DofRole::Massive(_) => {
                        r[row] = mom[i] + g_th[i] + fr_mom[i];
                        for (cj, &j) in su.free.iter().enumerate() {
                            jac[(row, cj)] = theta * k_th[(i, j)];
                        }
                        for (ck, &j) in su.massive.iter().enumerate() {
                            jac[(row, nf + ck)] = gram[(i, j)] / dt + theta * damping[(i, j)] / su.inertia[j];
                        }
                    }
                    DofRole::FirstOrder => {
                        r[row] = g_th[i] + fr_first[i];
                        for (cj, &j) in su.free.iter().enumerate() {
                            jac[(row, cj)] = theta * k_th[(i, j)] + damping[(i, j)] / dt;
                        }
                    }
                    DofRole::Algebraic => {
                        r[row] = g_end[i];
                        for (cj, &j) in su.free.iter().enumerate() {
                            jac[(row, cj)] = k_end[(i, j)];
                        }
                    }
                    DofRole::Fixed => unreachable!(),
                }
            }
            Ok((r, jac))
        })?;
        let (xt, pt) = unpack(&z);
        x = xt;
        p = pt;
        let constraint = (0..n).filter(|&d| row_of[d] == usize::MAX).map(|d| p[d].abs()).fold(0.0, f64::max);
        if constraint > cfg.newton_tol {
            let dof = (0..n).find(|&d| row_of[d] == usize::MAX && p[d].abs() == constraint).unwrap_or(0);
            return Err(Error::ConstraintViolation { dof, magnitude: constraint });
        }
        let rate = (&x - &x_n) / dt;
        let mut v = velocity(&p, &su.inertia);
        for d in 0..n {
            if row_of[d] == usize::MAX {
                v[d] = rate[d];
            }
        }
        dissipated += dt * quad_form(&damping, &rate);
        external += su.load_work(&x_n, &x, t_n, t)?;
        let diag = Diagnostics {
            kinetic: kinetic(&p),
            dissipated,
            external_work: external,
            constraint_residual: constraint,
            newton_iterations: rep.iterations,
            residual_norm: rep.residual,
            ..Default::default()
        };
        traj.frames.push(su.frame(&x, &v, Some(&p), t, diag)?);
        t_n = t;
    }
    Ok(traj)
}

fn velocity(p: &DVector<f64>, inertia: &DVector<f64>) -> DVector<f64> {
    DVector::from_fn(p.len(), |i, _| if inertia[i] > 0.0 { p[i] / inertia[i] } else { 0.0 })
}
