//! Small fixed-size linear algebra for 3-vectors, second-order and
//! fourth-order tensors on R^3.
//!
//! All storage is row-major and stack allocated. Fourth-order tensors are
//! indexed `[i][j][k][l]` and flattened as `27 i + 9 j + 3 k + l`.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative threshold below which a 3x3 matrix is treated as singular.
pub const SINGULAR_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vec3(pub [f64; 3]);

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mat3(pub [[f64; 3]; 3]);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tensor4(pub [f64; 81]);

impl Vec3 {
    pub const ZERO: Vec3 = Vec3([0.0; 3]);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3([x, y, z])
    }

    pub fn unit(i: usize) -> Self {
        let mut v = Vec3::ZERO;
        v.0[i] = 1.0;
        v
    }

    pub fn from_fn(mut f: impl FnMut(usize) -> f64) -> Self {
        Vec3([f(0), f(1), f(2)])
    }

    pub fn dot(&self, other: &Vec3) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn cross(&self, o: &Vec3) -> Vec3 {
        let [a, b, c] = self.0;
        let [x, y, z] = o.0;
        Vec3([b * z - c * y, c * x - a * z, a * y - b * x])
    }

    /// Row-vector product `v . A`, i.e. `(v . A)_j = v_i A_ij`.
    pub fn dot_mat(&self, a: &Mat3) -> Vec3 {
        Vec3::from_fn(|j| (0..3).map(|i| self.0[i] * a.0[i][j]).sum())
    }

    /// Dyadic product `a (x) b`.
    pub fn outer(&self, b: &Vec3) -> Mat3 {
        Mat3::from_fn(|i, j| self.0[i] * b.0[j])
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Vec3 {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::from_fn(|i| self.0[i] + o.0[i])
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::from_fn(|i| self.0[i] - o.0[i])
    }
}

impl SubAssign for Vec3 {
    fn sub_assign(&mut self, o: Vec3) {
        *self = *self - o;
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::from_fn(|i| -self.0[i])
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::from_fn(|i| self.0[i] * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Mat3 {
    pub const ZERO: Mat3 = Mat3([[0.0; 3]; 3]);
    pub const IDENTITY: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = f(i, j);
            }
        }
        Mat3(m)
    }

    pub fn from_rows(rows: [Vec3; 3]) -> Self {
        Mat3([rows[0].0, rows[1].0, rows[2].0])
    }

    pub fn diagonal(d: Vec3) -> Self {
        Mat3::from_fn(|i, j| if i == j { d.0[i] } else { 0.0 })
    }

    pub fn row(&self, i: usize) -> Vec3 {
        Vec3(self.0[i])
    }

    pub fn col(&self, j: usize) -> Vec3 {
        Vec3::from_fn(|i| self.0[i][j])
    }

    pub fn transpose(&self) -> Mat3 {
        Mat3::from_fn(|i, j| self.0[j][i])
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    /// Double contraction `A : B = A_ij B_ij`.
    pub fn ddot(&self, b: &Mat3) -> f64 {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += self.0[i][j] * b.0[i][j];
            }
        }
        s
    }

    pub fn norm(&self) -> f64 {
        self.ddot(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn mul_vec(&self, v: &Vec3) -> Vec3 {
        Vec3::from_fn(|i| (0..3).map(|j| self.0[i][j] * v.0[j]).sum())
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Cofactor matrix `det(A) A^{-T}`, computed from 2x2 minors so it is
    /// defined for singular arguments.
    pub fn cof(&self) -> Mat3 {
        let m = &self.0;
        Mat3::from_fn(|i, j| {
            let (i1, i2) = ((i + 1) % 3, (i + 2) % 3);
            let (j1, j2) = ((j + 1) % 3, (j + 2) % 3);
            m[i1][j1] * m[i2][j2] - m[i1][j2] * m[i2][j1]
        })
    }

    pub fn is_singular(&self) -> bool {
        let scale = self.norm();
        !(self.det().abs() > SINGULAR_TOL * scale * scale * scale)
    }

    pub fn inv(&self) -> Result<Mat3> {
        if self.is_singular() {
            return Err(Error::SingularMatrix { det: self.det() });
        }
        let d = self.det();
        Ok(self.cof().transpose() * (1.0 / d))
    }
}

impl Index<(usize, usize)> for Mat3 {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat3 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.0[i][j]
    }
}

impl Add for Mat3 {
    type Output = Mat3;
    fn add(self, o: Mat3) -> Mat3 {
        Mat3::from_fn(|i, j| self.0[i][j] + o.0[i][j])
    }
}

impl AddAssign for Mat3 {
    fn add_assign(&mut self, o: Mat3) {
        *self = *self + o;
    }
}

impl Sub for Mat3 {
    type Output = Mat3;
    fn sub(self, o: Mat3) -> Mat3 {
        Mat3::from_fn(|i, j| self.0[i][j] - o.0[i][j])
    }
}

impl SubAssign for Mat3 {
    fn sub_assign(&mut self, o: Mat3) {
        *self = *self - o;
    }
}

impl Neg for Mat3 {
    type Output = Mat3;
    fn neg(self) -> Mat3 {
        Mat3::from_fn(|i, j| -self.0[i][j])
    }
}

impl Mul<f64> for Mat3 {
    type Output = Mat3;
    fn mul(self, s: f64) -> Mat3 {
        Mat3::from_fn(|i, j| self.0[i][j] * s)
    }
}

impl Mul<Mat3> for f64 {
    type Output = Mat3;
    fn mul(self, m: Mat3) -> Mat3 {
        m * self
    }
}

impl Mul for Mat3 {
    type Output = Mat3;
    fn mul(self, o: Mat3) -> Mat3 {
        Mat3::from_fn(|i, j| (0..3).map(|k| self.0[i][k] * o.0[k][j]).sum())
    }
}

impl Mul<Vec3> for Mat3 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        self.mul_vec(&v)
    }
}

#[inline]
const fn idx4(i: usize, j: usize, k: usize, l: usize) -> usize {
    27 * i + 9 * j + 3 * k + l
}

impl Tensor4 {
    pub const ZERO: Tensor4 = Tensor4([0.0; 81]);

    pub fn from_fn(mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut t = [0.0; 81];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        t[idx4(i, j, k, l)] = f(i, j, k, l);
                    }
                }
            }
        }
        Tensor4(t)
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.0[idx4(i, j, k, l)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        self.0[idx4(i, j, k, l)] = v;
    }

    /// `(A (x) B)_ijkl = A_ij B_kl`.
    pub fn dyad(a: &Mat3, b: &Mat3) -> Self {
        Tensor4::from_fn(|i, j, k, l| a.0[i][j] * b.0[k][l])
    }

    /// `(T : C)_ij = T_ijkl C_kl`.
    pub fn ddot_mat(&self, c: &Mat3) -> Mat3 {
        Mat3::from_fn(|i, j| {
            let mut s = 0.0;
            for k in 0..3 {
                for l in 0..3 {
                    s += self.get(i, j, k, l) * c.0[k][l];
                }
            }
            s
        })
    }

    /// `(C : T)_kl = C_ij T_ijkl`.
    pub fn mat_ddot(&self, c: &Mat3) -> Mat3 {
        Mat3::from_fn(|k, l| {
            let mut s = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    s += c.0[i][j] * self.get(i, j, k, l);
                }
            }
            s
        })
    }

    /// Swap of the last two slots, `T_ijlk`.
    pub fn transpose_minor_right(&self) -> Self {
        Tensor4::from_fn(|i, j, k, l| self.get(i, j, l, k))
    }

    /// Swap of the pairs, `T_klij`.
    pub fn transpose_major(&self) -> Self {
        Tensor4::from_fn(|i, j, k, l| self.get(k, l, i, j))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl Default for Tensor4 {
    fn default() -> Self {
        Tensor4::ZERO
    }
}

impl Add for Tensor4 {
    type Output = Tensor4;
    fn add(mut self, o: Tensor4) -> Tensor4 {
        for (a, b) in self.0.iter_mut().zip(o.0.iter()) {
            *a += b;
        }
        self
    }
}

impl Sub for Tensor4 {
    type Output = Tensor4;
    fn sub(mut self, o: Tensor4) -> Tensor4 {
        for (a, b) in self.0.iter_mut().zip(o.0.iter()) {
            *a -= b;
        }
        self
    }
}

impl Neg for Tensor4 {
    type Output = Tensor4;
    fn neg(mut self) -> Tensor4 {
        for a in self.0.iter_mut() {
            *a = -*a;
        }
        self
    }
}

impl Mul<f64> for Tensor4 {
    type Output = Tensor4;
    fn mul(mut self, s: f64) -> Tensor4 {
        for a in self.0.iter_mut() {
            *a *= s;
        }
        self
    }
}

/// `(a (x) b)` for vectors, re-exported as a free function for readability in
/// constitutive code.
pub fn dyad(a: &Vec3, b: &Vec3) -> Mat3 {
    a.outer(b)
}

/// `[A [x] B]_ijkl = A_ik B_jl`.
pub fn boxtimes(a: &Mat3, b: &Mat3) -> Tensor4 {
    Tensor4::from_fn(|i, j, k, l| a.0[i][k] * b.0[j][l])
}

/// `[A [.] B]_ijkl = A_il B_jk`.
pub fn boxdot(a: &Mat3, b: &Mat3) -> Tensor4 {
    Tensor4::from_fn(|i, j, k, l| a.0[i][l] * b.0[j][k])
}

/// Levi-Civita symbol.
pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

pub fn det(a: &Mat3) -> f64 {
    a.det()
}

pub fn inv(a: &Mat3) -> Result<Mat3> {
    a.inv()
}

pub fn cof(a: &Mat3) -> Mat3 {
    a.cof()
}
