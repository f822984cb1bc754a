//! Solves the flat extension problem with the data of `x1^2 - y^2/(1+a)`
//! and reports the nodal error under refinement.

use std::sync::Arc;

use fraclab::geometry::{ScalarFn, WeightedGrid};
use fraclab::solver::{solve, ExtensionProblem};

fn main() -> fraclab::Result<()> {
    for a in [-0.5, 0.0, 0.5] {
        let exact: ScalarFn = Arc::new(move |p: &[f64]| p[0] * p[0] - p[1] * p[1] / (1.0 + a));
        let mut last: Option<f64> = None;
        for h in [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0] {
            let grid = WeightedGrid::new(1, h, 1.0, 1.0, a, false)?;
            let sol = solve(&ExtensionProblem::with_exact_boundary(grid, (1.0 - a) / 2.0, exact.clone())?)?;
            let g = sol.grid();
            let err = (0..g.num_nodes()).map(|i| (sol.values()[i] - exact(&g.node_coords(i))).abs()).fold(0.0, f64::max);
            let order = last.map(|e| format!("{:.2}", (e / err).log2())).unwrap_or_else(|| "-".into());
            println!("a={a:+.1} h=1/{:<3} CG iterations {:4}  max error {err:.3e}  order {order}", (1.0 / h) as usize, sol.report.iterations);
            last = Some(err);
        }
    }
    Ok(())
}
