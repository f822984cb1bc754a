//! Finite-volume solver for the weighted extension problem.

pub mod assemble;
pub mod dump;
pub mod field;
pub mod fractional;
pub mod problem;
pub mod sparse;
pub mod trace;

use std::sync::Arc;

pub use assemble::{assemble, LinearSystem, NodeKind};
pub use field::{EnergyIdentity, SolutionField};
pub use fractional::{
    frac_laplacian_extension, frac_laplacian_extension_with, frac_laplacian_pv, poisson_extension, ExtensionFractional, PoissonOptions, PvOptions, Tail,
};
pub use problem::{ExtensionProblem, LateralCondition, TopCondition};
pub use sparse::{CgReport, CsrMatrix};
pub use trace::{neumann_trace, neumann_trace_with, NeumannTrace, TraceBranch, TraceMethod};

use crate::error::Result;

/// Solves an assembled system with preconditioned conjugate gradients.
pub fn solve_system(problem: Arc<ExtensionProblem>, system: &LinearSystem, tol: f64, max_iter: usize) -> Result<SolutionField> {
    let g = &problem.grid;
    let npl = g.nodes_per_level();
    // start from the trace data continued constantly in y
    let x0: Vec<f64> = system.unknown_nodes.iter().map(|&node| problem.boundary[node % npl]).collect();
    let (x, report) = sparse::pcg(&system.matrix, &system.rhs, x0, tol, max_iter)?;
    let values = system.scatter(&x);
    SolutionField::new(problem, values, report)
}

/// Assembles and solves. Doubled grids are solved on the upper half and
/// reflected, so the result is exactly even in `y`.
pub fn solve(problem: &ExtensionProblem) -> Result<SolutionField> {
    if !problem.grid.doubled() {
        return solve_unreduced(problem);
    }
    let mut half = problem.clone();
    half.grid = problem.grid.upper_half();
    let upper = solve_unreduced(&half)?;
    let g = &problem.grid;
    let npl = g.nodes_per_level();
    let t = g.trace_level();
    let values = (0..g.num_nodes())
        .map(|node| {
            let level = node / npl;
            upper.values()[level.abs_diff(t) * npl + node % npl]
        })
        .collect();
    SolutionField::new(Arc::new(problem.clone()), values, upper.report.clone())
}

/// Assembles and solves on the grid as given, without the even reduction.
pub fn solve_unreduced(problem: &ExtensionProblem) -> Result<SolutionField> {
    let system = assemble(problem)?;
    solve_system(Arc::new(problem.clone()), &system, problem.tol, problem.max_iter)
}

/// Solves `−Div_g(ϱ^a ∇_g U) + ϱ^a C(n, γ) R U = 0` on the problem's chart.
pub fn solve_perturbed(problem: &ExtensionProblem) -> Result<SolutionField> {
    solve(&problem.clone().with_zeroth_order(true))
}
