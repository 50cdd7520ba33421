//! Finite-difference helpers for verifying analytic derivatives.

/// Central-difference gradient of a scalar function.
pub fn central_gradient(x: &[f64], h: f64, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
    let mut work = x.to_vec();
    (0..x.len())
        .map(|i| {
            work[i] = x[i] + h;
            let fp = f(&work);
            work[i] = x[i] - h;
            let fm = f(&work);
            work[i] = x[i];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

/// Central-difference Jacobian of a vector function, row `i` holding the
/// derivatives of output `i`.
pub fn central_jacobian(x: &[f64], h: f64, f: impl Fn(&[f64]) -> Vec<f64>) -> Vec<Vec<f64>> {
    let mut work = x.to_vec();
    let mut cols = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        work[i] = x[i] + h;
        let fp = f(&work);
        work[i] = x[i] - h;
        let fm = f(&work);
        work[i] = x[i];
        cols.push(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect::<Vec<_>>());
    }
    let rows = cols.first().map_or(0, Vec::len);
    (0..rows).map(|r| cols.iter().map(|c| c[r]).collect()).collect()
}

/// `|a - b| / max(|b|, 1)` in the Euclidean norm: relative for O(1) and
/// larger references, absolute for small ones.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let scale = b.iter().map(|y| y * y).sum::<f64>().sqrt().max(1.0);
    diff / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_of_quadratic() {
        let g = central_gradient(&[1.0, -2.0], 1e-4, |x| x[0] * x[0] + 3.0 * x[0] * x[1]);
        assert!((g[0] - (2.0 - 6.0)).abs() < 1e-9);
        assert!((g[1] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn jacobian_layout() {
        let j = central_jacobian(&[1.0, 2.0], 1e-5, |x| vec![x[0] * x[1], x[1], 2.0 * x[0]]);
        assert_eq!(j.len(), 3);
        assert!((j[0][0] - 2.0).abs() < 1e-9 && (j[0][1] - 1.0).abs() < 1e-9);
        assert!((j[2][0] - 2.0).abs() < 1e-9 && j[2][1].abs() < 1e-9);
    }
}
