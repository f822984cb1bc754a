//! Conformal charts `e^{2φ}` with `φ = ε(q0² − q0 q_y)/2`: the solve with
//! the curvature term in 2D and the almost-monotonicity constant as ε shrinks.

use std::sync::Arc;

use fraclab::frequency::{almost_monotonicity_fit, frequency_profile, FrequencySettings};
use fraclab::geometry::{MetricChart, ScalarFn, WeightedGrid};
use fraclab::solver::{solve_perturbed, ExtensionProblem};

fn main() -> fraclab::Result<()> {
    let a = 0.5;
    let exact: ScalarFn = Arc::new(move |p: &[f64]| p[0] * p[0] - p[2] * p[2] / (1.0 + a));
    for eps in [1e-1, 1e-2, 1e-3] {
        let phi: ScalarFn = Arc::new(move |q: &[f64]| eps * 0.5 * (q[0] * q[0] - q[1] * q[2]));
        let grid = WeightedGrid::new(2, 1.0 / 32.0, 1.0, 1.0, a, false)?;
        let p = ExtensionProblem::with_exact_boundary(grid, (1.0 - a) / 2.0, exact.clone())?.with_chart(MetricChart::conformal(3, phi));
        let sol = solve_perturbed(&p)?;
        let s = FrequencySettings::for_solution(&sol)?;
        let prof = frequency_profile(&sol, &[0.0, 0.0], 0.5, 0.8, 20, true, &s)?;
        println!("eps = {eps:.0e}: {} scales, C* = {:.4e}", prof.len(), almost_monotonicity_fit(&prof).c_star);
    }
    Ok(())
}
