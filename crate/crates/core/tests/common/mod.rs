//! Shared oracles for the integration and acceptance tests.
#![allow(dead_code)]

use std::sync::Arc;

use fraclab::geometry::ScalarFn;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Smooth bump `exp(1 − 1/(1 − |x|²))` supported in the unit ball.
pub fn bump(x: &[f64]) -> f64 {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    if r2 >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r2)).exp()
    }
}

/// `x₁² − y²/(1 + a)`, a closed-form solution of `Div(|y|^a ∇U) = 0`.
pub fn quadratic_solution(a: f64) -> ScalarFn {
    Arc::new(move |p: &[f64]| p[0] * p[0] - p[p.len() - 1].powi(2) / (1.0 + a))
}

/// `(−Δ)^γ f(0)` in one dimension from the Fourier symbol `|ξ|^{2γ}` on the
/// periodic box `[-period/2, period/2)` with `samples` points.
pub fn fourier_fractional_at_origin(f: impl Fn(f64) -> f64, gamma: f64, period: f64, samples: usize) -> f64 {
    let dx = period / samples as f64;
    // sample so that index 0 is x = 0
    let mut buf: Vec<Complex<f64>> = (0..samples)
        .map(|i| {
            let x = if i < samples / 2 { i as f64 * dx } else { (i as f64 - samples as f64) * dx };
            Complex::new(f(x), 0.0)
        })
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(samples).process(&mut buf);
    let mut total = 0.0;
    for (k, c) in buf.iter().enumerate() {
        let kk = if k <= samples / 2 { k as f64 } else { k as f64 - samples as f64 };
        let xi = 2.0 * std::f64::consts::PI * kk / period;
        total += c.re * xi.abs().powf(2.0 * gamma);
    }
    total / samples as f64
}

/// `max |u − v|` over two equally long slices.
pub fn max_diff(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Observed orders `log2(e_k / e_{k+1})` for errors at halving spacings.
pub fn orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}
