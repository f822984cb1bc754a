//! The fractional Laplacian of a smooth bump by two routes: the Neumann
//! trace of the extension and the principal-value integral.

use std::sync::Arc;

use fraclab::geometry::constants::trace_to_fractional;
use fraclab::geometry::{ScalarFn, WeightedGrid};
use fraclab::solver::fractional::{frac_laplacian_pv, poisson_extension, PoissonOptions, PvOptions, Tail};
use fraclab::solver::{neumann_trace_with, solve, ExtensionProblem, TraceMethod};

fn bump(x: &[f64]) -> f64 {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    if r2 >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r2)).exp()
    }
}

fn main() -> fraclab::Result<()> {
    let h = 1.0 / 32.0;
    for gamma in [0.25, 0.5, 0.75] {
        let opts = PoissonOptions::default();
        let e: ScalarFn = Arc::new(move |q: &[f64]| poisson_extension(&bump, gamma, q, &opts).unwrap_or(f64::NAN));
        let grid = WeightedGrid::new(1, h, 2.0, 2.0, 1.0 - 2.0 * gamma, false)?;
        let sol = solve(&ExtensionProblem::with_exact_boundary(grid, gamma, e)?)?;
        let tr = neumann_trace_with(&sol, TraceMethod::FluxBalance)?;
        let k = trace_to_fractional(gamma)?;
        let g = sol.grid();
        println!("gamma = {gamma}");
        for i in (0..g.nodes_per_level()).step_by(8) {
            let x = g.node_coords(g.node_index(g.trace_level(), i))[0];
            if x.abs() > 0.5 + 1e-12 {
                continue;
            }
            let pv = frac_laplacian_pv(&bump, gamma, &[x], Tail::CompactSupport { radius: 1.0 }, &PvOptions::default())?;
            println!("  x={x:+.3}  extension {:+.6}  principal value {pv:+.6}", k * tr.values[i]);
        }
    }
    Ok(())
}
