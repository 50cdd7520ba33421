use nalgebra::DVector;

use super::newton::{newton, scatter, sub_mat, sub_vec, NewtonReport};
use super::{quad_form, Diagnostics, Frame, Scenario, SolverConfig, Trajectory};
use crate::error::Result;
use crate::femcore::{
    assemble_damping, assemble_system, potential_energy, FieldKind, FieldState, Increment, Model, NodalFields,
};

/// Newton solve of the static (or incremental) equilibrium over the dofs in
/// `set`, all other dofs held at their values in `x`.
pub(crate) fn equilibrate(
    model: &Model,
    x: &mut DVector<f64>,
    set: &[usize],
    time: f64,
    increment: Option<&Increment>,
    cfg: &SolverConfig,
) -> Result<NewtonReport> {
    let base = x.clone();
    let mut z = sub_vec(x, set);
    let rep = newton(&mut z, cfg.newton_tol, cfg.max_iter, |z| {
        let mut full = base.clone();
        scatter(&mut full, set, z);
        let (r, k) = assemble_system(model, &state_at(model, &full, time), increment)?;
        Ok((sub_vec(&r, set), sub_mat(&k, set, set)))
    })?;
    scatter(x, set, &z);
    Ok(rep)
}

pub(crate) fn state_at(model: &Model, x: &DVector<f64>, time: f64) -> FieldState {
    FieldState { time, fields: NodalFields::from_vector(&model.layout, x), rates: None, momenta: None }
}

pub(crate) fn rate_norms(model: &Model, rates: &DVector<f64>) -> (f64, f64) {
    let layout = &model.layout;
    let mut pot = 0.0_f64;
    let mut free_space = 0.0_f64;
    for (d, kind) in layout.kind.iter().enumerate() {
        match kind {
            FieldKind::Potential => pot = pot.max(rates[d].abs()),
            FieldKind::Placement if !model.mesh.node_in_matter[layout.node[d]] => {
                free_space = free_space.max(rates[d].abs())
            }
            _ => {}
        }
    }
    (pot, free_space)
}

pub fn solve_quasistatic(sc: &Scenario, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let model = &sc.model;
    let layout = &model.layout;
    let dissipative = cfg.dissipative && model.params.damping > 0.0;
    let free = layout.free_dofs();
    let t0 = sc.initial.time;
    let mut x = sc.initial.fields.to_vector(layout);

    // With dissipation the order parameters carry history and start from
    // their initial values; everything else is equilibrated.
    let init_set: Vec<usize> = if dissipative {
        free.iter().copied().filter(|&d| layout.kind[d] != FieldKind::Electronic).collect()
    } else {
        free.clone()
    };
    let rep = equilibrate(model, &mut x, &init_set, t0, None, cfg)?;
    let mut traj = Trajectory::default();
    let u0 = potential_energy(model, &state_at(model, &x, t0))?;
    let mut state = state_at(model, &x, t0);
    state.rates = Some(NodalFields::zeros(model.mesh.n_nodes()));
    traj.frames.push(Frame {
        state,
        diagnostics: Diagnostics {
            potential: u0,
            total: u0,
            newton_iterations: rep.iterations,
            residual_norm: rep.residual,
            ..Default::default()
        },
    });

    let mut dissipated = 0.0;
    let mut external = 0.0;
    let mut t_prev = t0;
    for step in 1..=cfg.n_steps() {
        let t = t0 + cfg.time(step);
        let dt = t - t_prev;
        let x_prev = x.clone();
        let prev = state_at(model, &x_prev, t_prev);
        let inc = Increment { previous: &prev, dt };
        let rep = equilibrate(model, &mut x, &free, t, dissipative.then_some(&inc), cfg)?;
        let rates = (&x - &x_prev) / dt;
        if dissipative {
            dissipated += dt * quad_form(&assemble_damping(model, &prev)?, &rates);
        }
        if model.loads.is_time_dependent() {
            let mid = state_at(model, &((&x + &x_prev) * 0.5), t);
            let mut mid_prev = mid.clone();
            mid_prev.time = t_prev;
            external += potential_energy(model, &mid)? - potential_energy(model, &mid_prev)?;
        }
        let u = potential_energy(model, &state_at(model, &x, t))?;
        let (potential_rate, free_space_rate) = rate_norms(model, &rates);
        let mut state = state_at(model, &x, t);
        state.rates = Some(NodalFields::from_vector(layout, &rates));
        traj.frames.push(Frame {
            state,
            diagnostics: Diagnostics {
                kinetic: 0.0,
                potential: u,
                total: u,
                dissipated,
                external_work: external,
                potential_rate,
                free_space_rate,
                constraint_residual: 0.0,
                newton_iterations: rep.iterations,
                residual_norm: rep.residual,
            },
        });
        t_prev = t;
    }
    Ok(traj)
}
