//! Frequency profile of a solved field: monotonicity, the doubling ratio
//! and the log-derivative identity, with a model member for comparison.

use std::sync::Arc;

use fraclab::frequency::{almost_monotonicity_fit, doubling_report, frequency_profile, monotonicity_report, FrequencySettings};
use fraclab::geometry::{ScalarFn, WeightedGrid};
use fraclab::poly::solutions::model_poly;
use fraclab::solver::{solve, ExtensionProblem};

fn main() -> fraclab::Result<()> {
    let a = 0.2;
    let member = model_poly(3, a)?;
    let s = FrequencySettings::for_member(&member);
    let prof = frequency_profile(&member, &[0.0], 1.0, 0.5, 4, false, &s)?;
    println!("degree-3 member: N = {:?}", prof.frequencies());
    let rep = doubling_report(&prof);
    println!("  H(2r)/H(r) = {:?}, identity residuals {:?}", rep.ratios, rep.identity_residuals);

    let q = member.poly.clone();
    let exact: ScalarFn = Arc::new(move |p: &[f64]| 0.3 + 0.5 * p[0] + q.eval(p));
    let grid = WeightedGrid::new(1, 1.0 / 64.0, 1.0, 1.0, a, false)?;
    let sol = solve(&ExtensionProblem::with_exact_boundary(grid, (1.0 - a) / 2.0, exact)?)?;
    let s = FrequencySettings::for_solution(&sol)?;
    let prof = frequency_profile(&sol, &[0.1], 0.8, 0.7, 8, true, &s)?;
    println!("solved field at x = 0.1 ({} scales below 10h dropped)", prof.truncated);
    for (r, n) in prof.radii.iter().zip(prof.frequencies()) {
        println!("  r = {r:.4}  N = {n:.6}");
    }
    println!(
        "  monotonicity violations at 1e-3: {}, fitted C* = {:.3e}",
        monotonicity_report(&prof, 1e-3).violations.len(),
        almost_monotonicity_fit(&prof).c_star
    );
    Ok(())
}
