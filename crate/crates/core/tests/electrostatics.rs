use nalgebra::{DMatrix, DVector};
use photomech_core::energy::MaterialParams;
use photomech_core::femcore::*;
use photomech_core::scenarios::{driven_strip, electrostatic_patch};
use photomech_core::solvers::*;
use photomech_core::Pair;

fn params() -> MaterialParams {
    MaterialParams {
        permittivity: 1.3,
        charge_density: Pair::new(0.8, -0.4),
        electronic_stiffness: Pair::new(2.0, 3.0),
        coupling: Pair::new(0.5, 1.0),
        ..Default::default()
    }
}

#[test]
fn patch_reproduces_surface_charge_jump() {
    let sc = electrostatic_patch(params(), 0.7).unwrap();
    let mut cfg = SolverConfig::new(Formulation::Dirichlet, 1.0, 0.0);
    cfg.newton_tol = 1e-13;
    let traj = solve_quasistatic(&sc, &cfg).unwrap();
    let jumps = interface_jump_check(&sc.model, &traj.last().state).unwrap();
    assert_eq!(jumps.len(), 2);
    for j in &jumps {
        assert!((j.surface_charge.abs() - 0.7 * j.area).abs() < 1e-12);
        assert!(j.electric.abs() < 1e-10, "{j:?}");
    }
}

#[test]
fn frozen_electrostatics_is_one_linear_solve() {
    let mut sc = driven_strip(params(), 0.5).unwrap();
    for n in 0..sc.model.mesh.n_nodes() {
        sc.initial.fields.order[n] = Pair::new(
            photomech_core::Vec3::new(0.1 * n as f64, 0.2, -0.1),
            photomech_core::Vec3::new(0.0, -0.05 * n as f64, 0.3),
        );
    }
    let all: Vec<usize> = (0..sc.model.mesh.n_nodes()).collect();
    sc.model.layout.fix_nodes(&all, FieldKind::Electronic);
    sc.model.layout.fix_nodes(&all, FieldKind::Placement);

    let free = sc.model.layout.free_dofs();
    assert!(free.iter().all(|&d| sc.model.layout.kind[d] == FieldKind::Potential));
    let (r, k) = assemble_system(&sc.model, &sc.initial, None).unwrap();
    let kff = DMatrix::from_fn(free.len(), free.len(), |i, j| k[(free[i], free[j])]);
    let rf = DVector::from_fn(free.len(), |i, _| r[free[i]]);
    let delta = kff.lu().solve(&(-rf)).unwrap();

    let mut cfg = SolverConfig::new(Formulation::Dirichlet, 1.0, 0.0);
    cfg.newton_tol = 1e-13;
    let traj = solve_quasistatic(&sc, &cfg).unwrap();
    let x0 = sc.initial.fields.to_vector(&sc.model.layout);
    let x = traj.last().state.fields.to_vector(&sc.model.layout);
    for (i, &d) in free.iter().enumerate() {
        assert!((x[d] - x0[d] - delta[i]).abs() < 1e-10);
    }
    assert!(traj.last().diagnostics.newton_iterations <= 2);
}
