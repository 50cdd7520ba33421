//! Deformation measures and the push-forward / pull-back of electric and
//! electronic fields.

use crate::error::{Error, Result};
use crate::species::Pair;
use crate::tensor::{boxdot, boxtimes, Mat3, Tensor4, Vec3};

/// Derived measures of a deformation gradient `F`.
///
/// Invariants: `jac > 0`, `cof = jac * inv_def_grad^T`,
/// `inv_cof = inv_jac * def_grad^T`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kinematics {
    /// `F`
    pub def_grad: Mat3,
    /// `J = det F`
    pub jac: f64,
    /// `K = cof F`
    pub cof: Mat3,
    /// `f = F^{-1}`
    pub inv_def_grad: Mat3,
    /// `k = K^{-1}`
    pub inv_cof: Mat3,
    /// `j = 1 / J`
    pub inv_jac: f64,
}

/// Material and spatial electric field at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElectricKinematics {
    /// `E = -Grad y`
    pub nominal: Vec3,
    /// `e = E . f`
    pub spatial: Vec3,
}

/// Order parameters and their material and spatial gradients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElectronicKinematics {
    pub order: Pair<Vec3>,
    pub material_grad: Pair<Mat3>,
    pub spatial_grad: Pair<Mat3>,
}

pub fn build_kinematics(def_grad: Mat3) -> Result<Kinematics> {
    let jac = def_grad.det();
    if !(jac > 0.0) {
        return Err(Error::NonPositiveJacobian { jacobian: jac, element: None });
    }
    let inv_def_grad = def_grad.inv()?;
    let inv_jac = 1.0 / jac;
    Ok(Kinematics {
        def_grad,
        jac,
        cof: inv_def_grad.transpose() * jac,
        inv_def_grad,
        inv_cof: def_grad.transpose() * inv_jac,
        inv_jac,
    })
}

impl Kinematics {
    pub fn identity() -> Self {
        build_kinematics(Mat3::IDENTITY).expect("identity is invertible")
    }

    /// Right Cauchy-Green tensor `C = F^T F`.
    pub fn right_cauchy_green(&self) -> Mat3 {
        self.def_grad.transpose() * self.def_grad
    }

    /// Inverse left Cauchy-Green tensor `f f^T`.
    pub fn inv_left_cauchy_green(&self) -> Mat3 {
        self.inv_def_grad * self.inv_def_grad.transpose()
    }
}

/// `dK/dF = f^T (x) K - K [.] f`, i.e. `dK_kl/dF_mn = f_lk K_mn - K_kn f_lm`.
pub fn dk_df(k: &Kinematics) -> Tensor4 {
    Tensor4::dyad(&k.inv_def_grad.transpose(), &k.cof) - boxdot(&k.cof, &k.inv_def_grad)
}

/// `df/dF = -f [x] f^T`, i.e. `df_kl/dF_mn = -f_km f_nl`.
pub fn df_df(k: &Kinematics) -> Tensor4 {
    -boxtimes(&k.inv_def_grad, &k.inv_def_grad.transpose())
}

/// `dJ/dF = K`.
pub fn dj_df(k: &Kinematics) -> Mat3 {
    k.cof
}

/// `e = E . f`
pub fn push_forward_electric(nominal: &Vec3, k: &Kinematics) -> Vec3 {
    nominal.dot_mat(&k.inv_def_grad)
}

/// `E = e . F`
pub fn pull_back_electric(spatial: &Vec3, k: &Kinematics) -> Vec3 {
    spatial.dot_mat(&k.def_grad)
}

pub fn electric_kinematics(nominal: Vec3, k: &Kinematics) -> ElectricKinematics {
    ElectricKinematics { nominal, spatial: push_forward_electric(&nominal, k) }
}

/// Spatial gradient of an order parameter, `Grad y . f`.
pub fn push_forward_gradient(material: &Mat3, k: &Kinematics) -> Mat3 {
    *material * k.inv_def_grad
}

pub fn pull_back_gradient(spatial: &Mat3, k: &Kinematics) -> Mat3 {
    *spatial * k.def_grad
}

pub fn electronic_kinematics(
    order: Pair<Vec3>,
    material_grad: Pair<Mat3>,
    k: &Kinematics,
) -> ElectronicKinematics {
    ElectronicKinematics {
        order,
        material_grad,
        spatial_grad: material_grad.map(|g| push_forward_gradient(g, k)),
    }
}

/// Gradient of an interpolated scalar, `sum_a v_a grad N_a`.
pub fn scalar_gradient(values: &[f64], shape_grads: &[Vec3]) -> Vec3 {
    assert_eq!(values.len(), shape_grads.len(), "node count mismatch");
    values
        .iter()
        .zip(shape_grads)
        .fold(Vec3::ZERO, |acc, (v, g)| acc + *g * *v)
}

/// Gradient of an interpolated vector, `sum_a v_a (x) grad N_a`.
pub fn vector_gradient(values: &[Vec3], shape_grads: &[Vec3]) -> Mat3 {
    assert_eq!(values.len(), shape_grads.len(), "node count mismatch");
    values
        .iter()
        .zip(shape_grads)
        .fold(Mat3::ZERO, |acc, (v, g)| acc + v.outer(g))
}
