//! Gradient and Hessian of the internal energy density with respect to the
//! local variables `z = [E, y_t, y_c, Grad y_t, Grad y_c, F]` (36 entries,
//! matrices flattened row-major). These drive the element residual and
//! consistent tangent.

use nalgebra::{SMatrix, SVector};

use super::{electric_flux, electronic_stress_and_sources, free_space_flux, free_space_stress, total_stress, PointState};
use crate::energy::{electric_energy, electronic_energy, free_space_energy, mechanical_energy, MaterialParams};
use crate::kinematics::{push_forward_electric, Kinematics};
use crate::species::Pair;
use crate::tensor::{levi_civita, Mat3, Vec3};

pub const N_LOCAL: usize = 36;
pub const FIELD: usize = 0;
pub const ORDER: [usize; 2] = [3, 6];
pub const ORDER_GRAD: [usize; 2] = [9, 18];
pub const DEF_GRAD: usize = 27;

pub type LocalVector = SVector<f64, N_LOCAL>;
pub type LocalMatrix = SMatrix<f64, N_LOCAL, N_LOCAL>;

#[inline]
fn fi(a: usize, b: usize) -> usize {
    DEF_GRAD + 3 * a + b
}

pub fn pack(point: &PointState) -> LocalVector {
    let mut z = LocalVector::zeros();
    for i in 0..3 {
        z[FIELD + i] = point.electric_field[i];
        for s in 0..2 {
            z[ORDER[s] + i] = point.order.get(s)[i];
            for j in 0..3 {
                z[ORDER_GRAD[s] + 3 * i + j] = point.order_grad.get(s)[(i, j)];
            }
        }
        for j in 0..3 {
            z[fi(i, j)] = point.def_grad[(i, j)];
        }
    }
    z
}

/// Inverse of [`pack`]; rates are copied from `template`.
pub fn unpack(z: &[f64], template: &PointState) -> PointState {
    let v = |o: usize| Vec3([z[o], z[o + 1], z[o + 2]]);
    let m = |o: usize| Mat3::from_fn(|i, j| z[o + 3 * i + j]);
    PointState {
        electric_field: v(FIELD),
        order: Pair::new(v(ORDER[0]), v(ORDER[1])),
        order_grad: Pair::new(m(ORDER_GRAD[0]), m(ORDER_GRAD[1])),
        def_grad: m(DEF_GRAD),
        ..*template
    }
}

/// Internal energy density of matter: electric, electronic and stored parts.
pub fn matter_energy(point: &PointState, k: &Kinematics, p: &MaterialParams) -> f64 {
    electric_energy(&point.electric_field, k, p)
        + electronic_energy(&point.order, &point.electric_field, k, p)
        + mechanical_energy(&point.order, &point.order_grad, k, p)
}

pub fn matter_gradient(point: &PointState, k: &Kinematics, p: &MaterialParams) -> LocalVector {
    let flux = electric_flux(&point.order, &point.electric_field, k, p);
    let tron = electronic_stress_and_sources(point, k, p, Pair::default());
    let stress = total_stress(point, k, p);
    let mut g = LocalVector::zeros();
    for i in 0..3 {
        g[FIELD + i] = -flux.nominal[i];
        for s in 0..2 {
            g[ORDER[s] + i] = tron.energetic_source.get(s)[i] - tron.interior_body.get(s)[i];
            for j in 0..3 {
                g[ORDER_GRAD[s] + 3 * i + j] = tron.stress.get(s)[(i, j)];
            }
        }
        for j in 0..3 {
            g[fi(i, j)] = stress.total[(i, j)];
        }
    }
    g
}

pub fn free_space_gradient(point: &PointState, k: &Kinematics, p: &MaterialParams) -> LocalVector {
    let d = free_space_flux(&point.electric_field, k, p);
    let s = free_space_stress(&point.electric_field, k, p);
    let mut g = LocalVector::zeros();
    for i in 0..3 {
        g[FIELD + i] = -d[i];
        for j in 0..3 {
            g[fi(i, j)] = s[(i, j)];
        }
    }
    g
}

pub fn free_space_energy_density(point: &PointState, k: &Kinematics, p: &MaterialParams) -> f64 {
    free_space_energy(&point.electric_field, k, p)
}

/// `d(K E)_i / dF_cd = e_i K_cd - K_id e_c`.
fn cof_field_derivative(e: &Vec3, k: &Kinematics) -> [[[f64; 3]; 3]; 3] {
    let kk = &k.cof;
    let mut da = [[[0.0; 3]; 3]; 3];
    for (i, plane) in da.iter_mut().enumerate() {
        for (c, row) in plane.iter_mut().enumerate() {
            for (d, v) in row.iter_mut().enumerate() {
                *v = e[i] * kk[(c, d)] - kk[(i, d)] * e[c];
            }
        }
    }
    da
}

/// `dK_ij / dF_cd = f_ji K_cd - K_id f_jc`.
#[inline]
fn dcof(k: &Kinematics, i: usize, j: usize, c: usize, d: usize) -> f64 {
    k.inv_def_grad[(j, i)] * k.cof[(c, d)] - k.cof[(i, d)] * k.inv_def_grad[(j, c)]
}

/// `m_ac = v_i eps_iac`.
fn levi_contract(v: &Vec3) -> Mat3 {
    Mat3::from_fn(|a, c| (0..3).map(|i| v[i] * levi_civita(i, a, c)).sum())
}

/// Hessian of `-1/2 eps0 |K E|^2 / J` in the `E` and `F` blocks.
fn add_electric_hessian(h: &mut LocalMatrix, big_e: &Vec3, k: &Kinematics, eps0: f64) {
    let kk = &k.cof;
    let jinv = k.inv_jac;
    let e = push_forward_electric(big_e, k);
    let a = kk.mul_vec(big_e);
    let aa = a.norm_squared();
    let da = cof_field_derivative(&e, k);
    let c0 = -0.5 * eps0;

    // a . dA/dF_ab
    let a_da = Mat3::from_fn(|x, y| (0..3).map(|i| a[i] * da[i][x][y]).sum());
    let ka = a.dot_mat(kk);
    let ua = levi_contract(&a);
    let ue = levi_contract(big_e);

    for j in 0..3 {
        for l in 0..3 {
            let v: f64 = (0..3).map(|i| kk[(i, j)] * kk[(i, l)]).sum();
            h[(FIELD + j, FIELD + l)] += c0 * 2.0 * v * jinv;
        }
        for c in 0..3 {
            for d in 0..3 {
                let mut v = 0.0;
                for i in 0..3 {
                    v += da[i][c][d] * kk[(i, j)] + a[i] * dcof(k, i, j, c, d);
                }
                let val = c0 * (2.0 * v * jinv - 2.0 * ka[j] * kk[(c, d)] * jinv * jinv);
                h[(FIELD + j, fi(c, d))] += val;
                h[(fi(c, d), FIELD + j)] += val;
            }
        }
    }

    for x in 0..3 {
        for y in 0..3 {
            for c in 0..3 {
                for d in 0..3 {
                    let dd: f64 = (0..3).map(|i| da[i][c][d] * da[i][x][y]).sum();
                    let v = 2.0 * dd * jinv + 2.0 * ua[(x, c)] * ue[(y, d)] * jinv
                        - 2.0 * (a_da[(x, y)] * kk[(c, d)] + a_da[(c, d)] * kk[(x, y)]) * jinv * jinv
                        - aa * dcof(k, x, y, c, d) * jinv * jinv
                        + 2.0 * aa * kk[(x, y)] * kk[(c, d)] * jinv * jinv * jinv;
                    h[(fi(x, y), fi(c, d))] += c0 * v;
                }
            }
        }
    }
}

fn add_neo_hookean_hessian(h: &mut LocalMatrix, k: &Kinematics, shear: f64, lame: f64, scale: f64) {
    let f = &k.inv_def_grad;
    let ln_j = k.jac.ln();
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                for d in 0..3 {
                    let delta = if a == c && b == d { shear } else { 0.0 };
                    let v = delta + (shear - lame * ln_j) * f[(b, c)] * f[(d, a)] + lame * f[(b, a)] * f[(d, c)];
                    h[(fi(a, b), fi(c, d))] += scale * v;
                }
            }
        }
    }
}

pub fn matter_hessian(point: &PointState, k: &Kinematics, p: &MaterialParams) -> LocalMatrix {
    let mut h = LocalMatrix::zeros();
    let big_e = &point.electric_field;
    let kk = &k.cof;
    let e = push_forward_electric(big_e, k);
    add_electric_hessian(&mut h, big_e, k, p.permittivity);

    // Electronic coupling -pi . K . E
    let pi = p.polarization_density(&point.order);
    let da = cof_field_derivative(&e, k);
    let upi = levi_contract(&pi);
    let ue = levi_contract(big_e);
    for s in 0..2 {
        let w = *p.charge_density.get(s);
        for i in 0..3 {
            for j in 0..3 {
                h[(FIELD + j, ORDER[s] + i)] -= w * kk[(i, j)];
                h[(ORDER[s] + i, FIELD + j)] -= w * kk[(i, j)];
            }
            for c in 0..3 {
                for d in 0..3 {
                    h[(ORDER[s] + i, fi(c, d))] -= w * da[i][c][d];
                    h[(fi(c, d), ORDER[s] + i)] -= w * da[i][c][d];
                }
            }
        }
    }
    for j in 0..3 {
        for c in 0..3 {
            for d in 0..3 {
                let v: f64 = (0..3).map(|i| pi[i] * dcof(k, i, j, c, d)).sum();
                h[(FIELD + j, fi(c, d))] -= v;
                h[(fi(c, d), FIELD + j)] -= v;
            }
        }
    }
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                for d in 0..3 {
                    h[(fi(a, b), fi(c, d))] -= upi[(a, c)] * ue[(b, d)];
                }
            }
        }
    }

    // Stored energy
    add_neo_hookean_hessian(&mut h, k, p.shear_modulus, p.lame_modulus, 1.0);
    let f = &k.def_grad;
    let c_right = k.right_cauchy_green();
    for s in 0..2 {
        let y = point.order.get(s);
        let fy = f.mul_vec(y);
        let a = *p.electronic_stiffness.get(s);
        let beta = *p.coupling.get(s);
        let kappa = *p.gradient_penalty.get(s);
        for i in 0..3 {
            for j in 0..3 {
                let delta = if i == j { a } else { 0.0 };
                h[(ORDER[s] + i, ORDER[s] + j)] += delta + beta * c_right[(i, j)];
            }
            for kx in 0..3 {
                for l in 0..3 {
                    let mut v = f[(kx, i)] * y[l];
                    if i == l {
                        v += fy[kx];
                    }
                    h[(ORDER[s] + i, fi(kx, l))] += beta * v;
                    h[(fi(kx, l), ORDER[s] + i)] += beta * v;
                }
            }
        }
        for a_ in 0..3 {
            for b in 0..3 {
                for d in 0..3 {
                    h[(fi(a_, b), fi(a_, d))] += beta * y[b] * y[d];
                }
            }
        }
        for m in 0..9 {
            h[(ORDER_GRAD[s] + m, ORDER_GRAD[s] + m)] += kappa;
        }
    }
    h
}

pub fn free_space_hessian(point: &PointState, k: &Kinematics, p: &MaterialParams) -> LocalMatrix {
    let mut h = LocalMatrix::zeros();
    add_electric_hessian(&mut h, &point.electric_field, k, p.permittivity);
    add_neo_hookean_hessian(&mut h, k, p.shear_modulus, p.lame_modulus, p.free_space_stiffness);
    h
}
