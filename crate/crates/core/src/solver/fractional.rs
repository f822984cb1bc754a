//! Fractional Laplacians by the extension route and by the singular integral.

use crate::error::{invalid, Result};
use crate::geometry::constants::{check_gamma, poisson_kernel_constant, pv_constant, sphere_area, trace_to_fractional};
use crate::geometry::jacobi::{gauss_jacobi_unit, gauss_legendre};
use crate::geometry::quadrature::unit_sphere_rule;
use crate::solver::field::SolutionField;
use crate::solver::problem::ExtensionProblem;
use crate::solver::trace::{neumann_trace_with, NeumannTrace, TraceMethod};
use crate::solver::solve;

/// Result of the extension route.
#[derive(Debug, Clone)]
pub struct ExtensionFractional {
    pub field: SolutionField,
    pub trace: NeumannTrace,
    /// `P_{2γ} f` at every trace node.
    pub values: Vec<f64>,
}

/// Solves the extension problem and returns `(d_γ / 2γ) · lim y^a ∂_y U`,
/// with the trace taken from the discrete flux balance.
pub fn frac_laplacian_extension(problem: &ExtensionProblem) -> Result<ExtensionFractional> {
    frac_laplacian_extension_with(problem, TraceMethod::FluxBalance)
}

pub fn frac_laplacian_extension_with(problem: &ExtensionProblem, method: TraceMethod) -> Result<ExtensionFractional> {
    let field = solve(problem)?;
    let trace = neumann_trace_with(&field, method)?;
    let k = trace_to_fractional(problem.gamma)?;
    let values = trace.values.iter().map(|v| k * v).collect();
    Ok(ExtensionFractional { field, trace, values })
}

/// Behaviour of `f` far from the evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    /// `f = 0` outside the ball of this radius about the origin.
    CompactSupport { radius: f64 },
    /// Beyond `cutoff` from `x` the samples average to `mean`.
    MeanValue { mean: f64, cutoff: f64 },
}

/// Quadrature parameters for the principal-value route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvOptions {
    /// Radius splitting the Taylor-remainder part from the direct part.
    pub delta: f64,
    pub inner_points: usize,
    pub panel_width: f64,
    pub panel_points: usize,
    /// Exactness degree of the direction rule on `S^{n−1}`.
    pub sphere_degree: usize,
}

impl Default for PvOptions {
    fn default() -> Self {
        PvOptions { delta: 0.25, inner_points: 24, panel_width: 0.25, panel_points: 12, sphere_degree: 40 }
    }
}

/// `C PV∫ (f(x) − f(ξ)) / |x − ξ|^{n+2γ} dξ` with the symbol-normalising `C`.
///
/// The integral is symmetrised to `½ ∫ (2f(x) − f(x+z) − f(x−z)) |z|^{−n−2γ} dz`,
/// whose numerator vanishes to second order, and integrated in polar form.
pub fn frac_laplacian_pv(
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    gamma: f64,
    x: &[f64],
    tail: Tail,
    opts: &PvOptions,
) -> Result<f64> {
    check_gamma(gamma)?;
    let n = x.len();
    if n == 0 {
        return Err(invalid("x", "empty evaluation point"));
    }
    if !(opts.delta > 0.0 && opts.panel_width > 0.0) || opts.inner_points == 0 || opts.panel_points == 0 {
        return Err(invalid("opts", "radii and point counts must be positive"));
    }
    let (dirs, dw) = unit_sphere_rule(n, 0.0, opts.sphere_degree);
    let fx = f(x);
    let second_difference = |rho: f64| -> f64 {
        let mut s = 0.0;
        let mut plus = vec![0.0; n];
        let mut minus = vec![0.0; n];
        for (d, w) in dirs.iter().zip(&dw) {
            for i in 0..n {
                plus[i] = x[i] + rho * d[i];
                minus[i] = x[i] - rho * d[i];
            }
            s += w * 0.5 * (2.0 * fx - f(&plus) - f(&minus));
        }
        s
    };
    let (outer, tail_value) = match tail {
        Tail::CompactSupport { radius } => {
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt() + radius;
            (r.max(opts.delta), fx * sphere_area(n - 1) * r.max(opts.delta).powf(-2.0 * gamma) / (2.0 * gamma))
        }
        Tail::MeanValue { mean, cutoff } => {
            if cutoff <= opts.delta {
                return Err(invalid("cutoff", "tail cutoff must exceed the inner radius"));
            }
            (cutoff, (fx - mean) * sphere_area(n - 1) * cutoff.powf(-2.0 * gamma) / (2.0 * gamma))
        }
    };
    let e = 2.0 * gamma;
    // inner: ∫_0^δ ρ^{1−2γ} [D(ρ) / ρ²] dρ with a Jacobi rule for ρ^{1−2γ}
    let (s, w) = gauss_jacobi_unit(opts.inner_points, 1.0 - e, 0.0);
    let d = opts.delta;
    let inner: f64 = s
        .iter()
        .zip(&w)
        .map(|(&s, &w)| {
            let rho = d * s;
            w * second_difference(rho) / (rho * rho)
        })
        .sum::<f64>()
        * d.powf(2.0 - e);
    // outer: Gauss–Legendre panels on [δ, R]
    let (gx, gw) = gauss_legendre(opts.panel_points);
    let panels = ((outer - d) / opts.panel_width).ceil().max(0.0) as usize;
    let mut middle = 0.0;
    for p in 0..panels {
        let lo = d + p as f64 * (outer - d) / panels as f64;
        let hi = d + (p + 1) as f64 * (outer - d) / panels as f64;
        let (c, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        for (&t, &wt) in gx.iter().zip(&gw) {
            let rho = c + r * t;
            middle += r * wt * rho.powf(-1.0 - e) * second_difference(rho);
        }
    }
    Ok(pv_constant(n, gamma)? * (inner + middle + tail_value))
}

/// Options for evaluating the Poisson extension of compactly supported data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonOptions {
    /// `f` vanishes outside `[-R, R]^n`.
    pub support: f64,
    pub panels: usize,
    pub panel_points: usize,
}

impl Default for PoissonOptions {
    fn default() -> Self {
        PoissonOptions { support: 1.0, panels: 32, panel_points: 8 }
    }
}

/// `U(x, y) = p ∫ y^{2γ} f(ξ) / (|x − ξ|² + y²)^{(n+2γ)/2} dξ`, the bounded
/// solution of the flat extension problem; `point = (x, y)` with `y > 0`.
pub fn poisson_extension(f: &dyn Fn(&[f64]) -> f64, gamma: f64, point: &[f64], opts: &PoissonOptions) -> Result<f64> {
    let n = point.len() - 1;
    let y = point[n].abs();
    if y == 0.0 {
        return Ok(f(&point[..n]));
    }
    let c = poisson_kernel_constant(n, gamma)?;
    let (gx, gw) = gauss_legendre(opts.panel_points);
    let width = 2.0 * opts.support / opts.panels as f64;
    let nodes: Vec<(f64, f64)> = (0..opts.panels)
        .flat_map(|p| {
            let mid = -opts.support + (p as f64 + 0.5) * width;
            gx.iter().zip(&gw).map(move |(&t, &w)| (mid + 0.5 * width * t, 0.5 * width * w)).collect::<Vec<_>>()
        })
        .collect();
    let k = nodes.len();
    let mut idx = vec![0usize; n];
    let mut xi = vec![0.0; n];
    let mut total = 0.0;
    loop {
        let mut w = 1.0;
        let mut r2 = y * y;
        for d in 0..n {
            let (p, wd) = nodes[idx[d]];
            xi[d] = p;
            w *= wd;
            r2 += (point[d] - p).powi(2);
        }
        total += w * f(&xi) * r2.powf(-(n as f64 + 2.0 * gamma) / 2.0);
        let mut d = 0;
        while d < n {
            idx[d] += 1;
            if idx[d] < k {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
        if d == n {
            break;
        }
    }
    Ok(c * y.powf(2.0 * gamma) * total)
}
