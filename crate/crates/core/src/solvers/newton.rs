//! Damped Newton iteration on an abstract unknown vector.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const MAX_HALVINGS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonReport {
    /// Number of linear solves performed.
    pub iterations: usize,
    pub residual: f64,
}

/// Solves `R(z) = 0` from the initial guess in `z`. `system` returns the
/// residual and its Jacobian. A step whose residual norm exceeds the current
/// one is halved up to [`MAX_HALVINGS`] times; the last evaluable trial is
/// then accepted.
pub fn newton(
    z: &mut DVector<f64>,
    tol: f64,
    max_iter: usize,
    mut system: impl FnMut(&DVector<f64>) -> Result<(DVector<f64>, DMatrix<f64>)>,
) -> Result<NewtonReport> {
    let (mut r, mut jac) = system(z)?;
    let mut it = 0;
    loop {
        let norm = r.norm();
        if !norm.is_finite() {
            return Err(Error::NonConvergence { iterations: it, residual: norm });
        }
        if norm < tol {
            return Ok(NewtonReport { iterations: it, residual: norm });
        }
        if it == max_iter {
            return Err(Error::NonConvergence { iterations: it, residual: norm });
        }
        let delta = jac.clone().lu().solve(&(-&r)).ok_or(Error::SingularTangent)?;
        if delta.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularTangent);
        }
        let mut alpha = 1.0;
        let mut accepted = None;
        let mut last_err = None;
        for k in 0..=MAX_HALVINGS {
            let trial = &*z + &delta * alpha;
            match system(&trial) {
                Ok((rt, jt)) => {
                    let better = rt.norm() <= norm;
                    if better || k == MAX_HALVINGS {
                        accepted = Some((trial, rt, jt));
                        break;
                    }
                    accepted = Some((trial, rt, jt));
                }
                Err(e) => last_err = Some(e),
            }
            alpha *= 0.5;
        }
        match accepted {
            Some((zt, rt, jt)) => {
                *z = zt;
                r = rt;
                jac = jt;
            }
            None => return Err(last_err.unwrap_or(Error::SingularTangent)),
        }
        it += 1;
    }
}

pub(crate) fn sub_vec(v: &DVector<f64>, idx: &[usize]) -> DVector<f64> {
    DVector::from_iterator(idx.len(), idx.iter().map(|&i| v[i]))
}

pub(crate) fn sub_mat(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

pub(crate) fn scatter(x: &mut DVector<f64>, idx: &[usize], vals: &DVector<f64>) {
    for (k, &i) in idx.iter().enumerate() {
        x[i] = vals[k];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_scalar_cubic() {
        let mut z = DVector::from_element(1, 2.0);
        let rep = newton(&mut z, 1e-12, 25, |z| {
            let x = z[0];
            Ok((DVector::from_element(1, x * x * x - 8.0), DMatrix::from_element(1, 1, 3.0 * x * x)))
        })
        .unwrap();
        assert_eq!(rep.iterations, 0);
        let mut z = DVector::from_element(1, 0.5);
        newton(&mut z, 1e-12, 25, |z| {
            let x = z[0];
            Ok((DVector::from_element(1, x * x * x - 8.0), DMatrix::from_element(1, 1, 3.0 * x * x)))
        })
        .unwrap();
        assert!((z[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn line_search_tames_arctan() {
        // Undamped Newton diverges on atan from x0 = 2.
        let mut z = DVector::from_element(1, 2.0);
        newton(&mut z, 1e-12, 50, |z| {
            let x = z[0];
            Ok((DVector::from_element(1, x.atan()), DMatrix::from_element(1, 1, 1.0 / (1.0 + x * x))))
        })
        .unwrap();
        assert!(z[0].abs() < 1e-12);
    }

    #[test]
    fn reports_nonconvergence_and_singularity() {
        let mut z = DVector::from_element(1, 3.0);
        let r = newton(&mut z, 1e-12, 3, |z| {
            Ok((DVector::from_element(1, z[0] * z[0] + 1.0), DMatrix::from_element(1, 1, 2.0 * z[0])))
        });
        assert!(matches!(r, Err(Error::NonConvergence { iterations: 3, .. })));
        let mut z = DVector::from_element(1, 1.0);
        let r = newton(&mut z, 1e-12, 3, |_| Ok((DVector::from_element(1, 1.0), DMatrix::zeros(1, 1))));
        assert!(matches!(r, Err(Error::SingularTangent)));
    }
}
