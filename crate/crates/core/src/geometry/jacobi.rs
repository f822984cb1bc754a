//! Gauss–Jacobi rules by the Golub–Welsch eigenvalue method.

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::ln_gamma;

/// Nodes and weights for `∫_{-1}^{1} (1 − x)^α (1 + x)^β g(x) dx`, exact for
/// polynomials of degree `2 npts − 1`.
pub fn gauss_jacobi(npts: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(npts >= 1);
    assert!(alpha > -1.0 && beta > -1.0);
    let ab = alpha + beta;
    let mu0 = ((ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
        - ln_gamma(ab + 2.0))
    .exp();
    let mut jac = DMatrix::<f64>::zeros(npts, npts);
    for k in 0..npts {
        let kf = k as f64;
        let diag = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        jac[(k, k)] = diag;
        if k + 1 < npts {
            let j = kf + 1.0;
            let b2 = if k == 0 {
                4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * j * (j + alpha) * (j + beta) * (j + ab)
                    / ((2.0 * j + ab).powi(2) * (2.0 * j + ab + 1.0) * (2.0 * j + ab - 1.0))
            };
            let off = b2.sqrt();
            jac[(k, k + 1)] = off;
            jac[(k + 1, k)] = off;
        }
    }
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..npts)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Nodes and weights for `∫_0^1 s^p (1 − s)^q g(s) ds`.
pub fn gauss_jacobi_unit(npts: usize, p: f64, q: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_jacobi(npts, q, p);
    let scale = 0.5f64.powf(p + q + 1.0);
    let s = x.iter().map(|&x| 0.5 * (1.0 + x)).collect();
    let w = w.iter().map(|&w| w * scale).collect();
    (s, w)
}

/// Gauss–Legendre on `[-1, 1]`.
pub fn gauss_legendre(npts: usize) -> (Vec<f64>, Vec<f64>) {
    gauss_jacobi(npts, 0.0, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::constants::beta;

    #[test]
    fn legendre_integrates_monomials() {
        let (x, w) = gauss_legendre(6);
        for k in 0..12 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "k={k}: {q} vs {exact}");
        }
    }

    #[test]
    fn unit_interval_beta_moments() {
        for &(p, q) in &[(-0.5, 0.0), (-0.95, 0.5), (0.45, -0.5), (2.3, 0.0)] {
            let (s, w) = gauss_jacobi_unit(5, p, q);
            for k in 0..10 {
                let val: f64 = s.iter().zip(&w).map(|(s, w)| w * s.powi(k)).sum();
                let exact = beta(p + k as f64 + 1.0, q + 1.0);
                assert!((val - exact).abs() < 1e-12 * exact.max(1.0), "p={p} q={q} k={k}");
            }
        }
    }

    #[test]
    fn single_node_rule() {
        let (x, w) = gauss_jacobi(1, 0.3, -0.2);
        assert_eq!(x.len(), 1);
        let mu0 = (1.1 * std::f64::consts::LN_2 + ln_gamma(1.3) + ln_gamma(0.8) - ln_gamma(2.1)).exp();
        assert!((w[0] - mu0).abs() < 1e-14);
    }
}
