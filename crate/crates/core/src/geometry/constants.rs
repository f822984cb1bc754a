//! Closed-form constants of the weighted extension problem.

use statrs::function::gamma::{gamma, ln_gamma};
use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// Zeroth-order coefficient factor: `J = C(n, γ) R` with
/// `C(n, γ) = (n² − 3 − 4nγ + γ²) / (4n(n − 1))`.
pub fn c_n_gamma(n: usize, gamma: f64) -> Result<f64> {
    if n < 2 {
        return Err(invalid("n", format!("needs n >= 2, got {n}")));
    }
    check_gamma(gamma)?;
    let n = n as f64;
    Ok((n * n - 3.0 - 4.0 * n * gamma + gamma * gamma) / (4.0 * n * (n - 1.0)))
}

/// `d_γ = 2^{2γ} Γ(γ) / Γ(−γ)`.
pub fn d_gamma(gamma_: f64) -> Result<f64> {
    check_gamma(gamma_)?;
    Ok(4f64.powf(gamma_) * gamma(gamma_) / gamma(-gamma_))
}

/// Factor turning the weighted Neumann trace `lim y^a ∂_y U` into `(−Δ)^γ f`.
pub fn trace_to_fractional(gamma_: f64) -> Result<f64> {
    Ok(d_gamma(gamma_)? / (2.0 * gamma_))
}

/// Principal-value normalisation making the Fourier symbol exactly `|ξ|^{2γ}`:
/// `4^γ Γ(n/2 + γ) / (π^{n/2} |Γ(−γ)|)`.
pub fn pv_constant(n: usize, gamma_: f64) -> Result<f64> {
    check_gamma(gamma_)?;
    let nf = n as f64;
    Ok(4f64.powf(gamma_) * gamma(nf / 2.0 + gamma_) / (PI.powf(nf / 2.0) * gamma(-gamma_).abs()))
}

/// Constant of the extension Poisson kernel `p y^{2γ} / (|x|² + y²)^{(n+2γ)/2}`.
pub fn poisson_kernel_constant(n: usize, gamma_: f64) -> Result<f64> {
    check_gamma(gamma_)?;
    let nf = n as f64;
    Ok(gamma((nf + 2.0 * gamma_) / 2.0) / (PI.powf(nf / 2.0) * gamma(gamma_)))
}

pub fn beta(a: f64, b: f64) -> f64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

/// Surface area of the unit sphere `S^{k}` in `R^{k+1}`.
pub fn sphere_area(k: usize) -> f64 {
    let m = (k + 1) as f64;
    2.0 * PI.powf(m / 2.0) / gamma(m / 2.0)
}

/// `∮_{S^{m−1}} |y|^a dσ` for the last coordinate `y` on the unit sphere of `R^m`.
pub fn weighted_sphere_measure(m: usize, a: f64) -> f64 {
    assert!(m >= 2);
    sphere_area(m - 2) * beta((1.0 + a) / 2.0, (m as f64 - 1.0) / 2.0)
}

/// `∫_{B_1} |y|^a dx` in `R^m`.
pub fn weighted_ball_measure(m: usize, a: f64) -> f64 {
    weighted_sphere_measure(m, a) / (m as f64 + a)
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(invalid("gamma", format!("must lie in (0,1), got {gamma}")));
    }
    Ok(())
}

pub(crate) fn check_weight(a: f64) -> Result<()> {
    if !(a > -1.0 && a < 1.0) {
        return Err(invalid("a", format!("weight exponent must lie in (-1,1), got {a}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_n_gamma_substitution() {
        assert!((c_n_gamma(2, 0.5).unwrap() + 11.0 / 32.0).abs() < 1e-15);
        assert!((c_n_gamma(3, 0.5).unwrap() - 1.0 / 96.0).abs() < 1e-15);
        for n in 2..6 {
            let nf = n as f64;
            let near0 = c_n_gamma(n, 1e-12).unwrap();
            assert!((near0 - (nf * nf - 3.0) / (4.0 * nf * (nf - 1.0))).abs() < 1e-10);
        }
        assert!(c_n_gamma(1, 0.5).is_err());
        assert!(c_n_gamma(3, 1.0).is_err());
    }

    #[test]
    fn d_gamma_values() {
        assert!((d_gamma(0.5).unwrap() + 1.0).abs() < 1e-12);
        // Γ(γ) ~ 1/γ and Γ(−γ) ~ −1/γ near zero
        assert!((d_gamma(1e-7).unwrap() + 1.0).abs() < 1e-5);
        let mut prev = d_gamma(0.005).unwrap();
        for i in 1..100 {
            let g = 0.005 + 0.0099 * i as f64;
            let d = d_gamma(g).unwrap();
            assert!(d.is_finite());
            assert!((d - prev).abs() < 0.1, "jump at {g}");
            prev = d;
        }
        assert_eq!(d_gamma(0.3).unwrap().to_bits(), d_gamma(0.3).unwrap().to_bits());
    }

    #[test]
    fn gamma_at_negative_half() {
        assert!((gamma(-0.5) + 2.0 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn pv_constant_half_laplacian() {
        assert!((pv_constant(1, 0.5).unwrap() - 1.0 / PI).abs() < 1e-14);
    }

    #[test]
    fn sphere_measures() {
        assert!((weighted_sphere_measure(2, 0.0) - 2.0 * PI).abs() < 1e-13);
        assert!((weighted_sphere_measure(3, 0.0) - 4.0 * PI).abs() < 1e-13);
        assert!((weighted_ball_measure(2, 1.0) - 4.0 / 3.0).abs() < 1e-13);
        assert!((weighted_ball_measure(3, 0.0) - 4.0 * PI / 3.0).abs() < 1e-13);
    }
}
