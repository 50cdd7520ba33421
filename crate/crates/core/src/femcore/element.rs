//! Trilinear hexahedron with 2x2x2 Gauss quadrature.

use crate::tensor::{Mat3, Vec3};

/// Local coordinates of the eight nodes.
pub const NODE_COORDS: [[f64; 3]; 8] = [
    [-1.0, -1.0, -1.0],
    [1.0, -1.0, -1.0],
    [1.0, 1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
    [1.0, -1.0, 1.0],
    [1.0, 1.0, 1.0],
    [-1.0, 1.0, 1.0],
];

pub const GAUSS_1D: [f64; 2] = [-0.577_350_269_189_625_8, 0.577_350_269_189_625_8];

/// Shape function values and their derivatives with respect to local
/// coordinates.
pub fn shape(xi: &Vec3) -> ([f64; 8], [Vec3; 8]) {
    let mut n = [0.0; 8];
    let mut dn = [Vec3::ZERO; 8];
    for a in 0..8 {
        let c = NODE_COORDS[a];
        let f = [0.5 * (1.0 + c[0] * xi[0]), 0.5 * (1.0 + c[1] * xi[1]), 0.5 * (1.0 + c[2] * xi[2])];
        n[a] = f[0] * f[1] * f[2];
        dn[a] = Vec3::new(0.5 * c[0] * f[1] * f[2], 0.5 * c[1] * f[0] * f[2], 0.5 * c[2] * f[0] * f[1]);
    }
    (n, dn)
}

/// Interpolation data at one quadrature point.
#[derive(Clone, Copy, Debug)]
pub struct QuadPoint {
    pub local: Vec3,
    pub shape: [f64; 8],
    /// Material gradients of the shape functions.
    pub grads: [Vec3; 8],
    /// Gauss weight times the volume (or area) Jacobian.
    pub weight: f64,
}

/// Geometric map `dX/dxi` for the given nodal coordinates.
pub fn geometric_jacobian(coords: &[Vec3; 8], dn: &[Vec3; 8]) -> Mat3 {
    let mut j = Mat3::ZERO;
    for a in 0..8 {
        j += coords[a].outer(&dn[a]);
    }
    j
}

/// Evaluates shape data at a local point; `None` if the map is degenerate.
pub fn eval_point(coords: &[Vec3; 8], xi: Vec3, gauss_weight: f64) -> Option<QuadPoint> {
    let (n, dn) = shape(&xi);
    let jg = geometric_jacobian(coords, &dn);
    let det = jg.det();
    if !(det > 0.0) {
        return None;
    }
    let inv = jg.inv().ok()?;
    let mut grads = [Vec3::ZERO; 8];
    for a in 0..8 {
        grads[a] = dn[a].dot_mat(&inv);
    }
    Some(QuadPoint { local: xi, shape: n, grads, weight: gauss_weight * det })
}

pub fn gauss_points() -> impl Iterator<Item = Vec3> {
    (0..8).map(|q| Vec3::new(GAUSS_1D[q & 1], GAUSS_1D[(q >> 1) & 1], GAUSS_1D[(q >> 2) & 1]))
}

/// 2x2 Gauss points on the local face `axis = side`, with the surface
/// measure folded into the weight.
pub fn face_points(coords: &[Vec3; 8], axis: usize, side: f64) -> Vec<QuadPoint> {
    let (t1, t2) = ((axis + 1) % 3, (axis + 2) % 3);
    let mut out = Vec::with_capacity(4);
    for &s in &GAUSS_1D {
        for &t in &GAUSS_1D {
            let mut xi = Vec3::ZERO;
            xi[axis] = side;
            xi[t1] = s;
            xi[t2] = t;
            let (n, dn) = shape(&xi);
            let jg = geometric_jacobian(coords, &dn);
            let area = jg.col(t1).cross(&jg.col(t2)).norm();
            let inv = jg.inv().expect("face of a valid element");
            let mut grads = [Vec3::ZERO; 8];
            for a in 0..8 {
                grads[a] = dn[a].dot_mat(&inv);
            }
            out.push(QuadPoint { local: xi, shape: n, grads, weight: area });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(h: Vec3) -> [Vec3; 8] {
        NODE_COORDS.map(|c| Vec3::new((c[0] + 1.0) * 0.5 * h[0], (c[1] + 1.0) * 0.5 * h[1], (c[2] + 1.0) * 0.5 * h[2]))
    }

    #[test]
    fn partition_of_unity() {
        for xi in gauss_points() {
            let (n, dn) = shape(&xi);
            assert!((n.iter().sum::<f64>() - 1.0).abs() < 1e-15);
            let s = dn.iter().fold(Vec3::ZERO, |a, b| a + *b);
            assert!(s.max_abs() < 1e-15);
        }
    }

    #[test]
    fn volume_and_area_of_box() {
        let c = cube(Vec3::new(2.0, 3.0, 0.5));
        let v: f64 = gauss_points().map(|xi| eval_point(&c, xi, 1.0).unwrap().weight).sum();
        assert!((v - 3.0).abs() < 1e-14);
        let a: f64 = face_points(&c, 2, 1.0).iter().map(|q| q.weight).sum();
        assert!((a - 6.0).abs() < 1e-14);
    }

    #[test]
    fn linear_field_gradient_is_exact() {
        let c = cube(Vec3::new(1.0, 2.0, 1.5));
        let g = Vec3::new(0.3, -1.2, 2.0);
        let vals: Vec<f64> = c.iter().map(|x| 4.0 + g.dot(x)).collect();
        for xi in gauss_points() {
            let q = eval_point(&c, xi, 1.0).unwrap();
            let grad = crate::kinematics::scalar_gradient(&vals, &q.grads);
            assert!((grad - g).max_abs() < 1e-13);
        }
    }
}
