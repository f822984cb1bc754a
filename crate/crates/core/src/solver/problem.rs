//! Boundary value problems for the weighted extension equation.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Result};
use crate::geometry::chart::{MetricChart, ScalarFn};
use crate::geometry::constants::{c_n_gamma, check_gamma};
use crate::geometry::grid::WeightedGrid;

/// Condition on the lateral faces `|x_i| = L`.
#[derive(Clone)]
pub enum LateralCondition {
    Dirichlet(ScalarFn),
    /// Zero weighted flux.
    Neumann,
    Periodic,
}

/// Condition on the top face `|y| = Y`.
#[derive(Clone)]
pub enum TopCondition {
    /// Zero weighted flux (default).
    Neumann,
    Dirichlet(ScalarFn),
}

impl LateralCondition {
    pub fn zero_dirichlet() -> Self {
        LateralCondition::Dirichlet(Arc::new(|_: &[f64]| 0.0))
    }

    pub fn tag(&self) -> &'static str {
        match self {
            LateralCondition::Dirichlet(_) => "dirichlet",
            LateralCondition::Neumann => "neumann",
            LateralCondition::Periodic => "periodic",
        }
    }
}

impl TopCondition {
    pub fn tag(&self) -> &'static str {
        match self {
            TopCondition::Dirichlet(_) => "dirichlet",
            TopCondition::Neumann => "neumann",
        }
    }
}

/// `−Div(ϱ^a ∇_g U) + ϱ^a J U = ϱ^a F` above the box with `U = f` on `{y = 0}`.
#[derive(Clone)]
pub struct ExtensionProblem {
    pub grid: WeightedGrid,
    pub chart: MetricChart,
    pub gamma: f64,
    /// Trace values on the `y = 0` row, indexed like a grid level.
    pub boundary: Vec<f64>,
    pub zeroth_order: bool,
    pub lateral: LateralCondition,
    pub top: TopCondition,
    /// Weight-free source `F`.
    pub source: Option<ScalarFn>,
    pub tol: f64,
    pub max_iter: usize,
}

impl fmt::Debug for ExtensionProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExtensionProblem")
            .field("grid", &self.grid)
            .field("chart", &self.chart)
            .field("gamma", &self.gamma)
            .field("zeroth_order", &self.zeroth_order)
            .field("lateral", &self.lateral.tag())
            .field("top", &self.top.tag())
            .field("tol", &self.tol)
            .finish()
    }
}

impl ExtensionProblem {
    /// The grid's weight must equal `1 − 2γ`.
    pub fn new(grid: WeightedGrid, gamma: f64, boundary: Vec<f64>) -> Result<Self> {
        check_gamma(gamma)?;
        if (grid.a() - (1.0 - 2.0 * gamma)).abs() > 1e-14 {
            return Err(invalid("gamma", format!("grid weight {} differs from 1 − 2γ = {}", grid.a(), 1.0 - 2.0 * gamma)));
        }
        if boundary.len() != grid.nodes_per_level() {
            return Err(invalid("boundary", format!("expected {} trace values, got {}", grid.nodes_per_level(), boundary.len())));
        }
        if let Some(i) = boundary.iter().position(|v| !v.is_finite()) {
            return Err(invalid("boundary", format!("trace value at node {i} is not finite")));
        }
        let m = grid.m();
        Ok(ExtensionProblem {
            grid,
            chart: MetricChart::flat(m),
            gamma,
            boundary,
            zeroth_order: false,
            lateral: LateralCondition::Neumann,
            top: TopCondition::Neumann,
            source: None,
            tol: 1e-10,
            max_iter: 20_000,
        })
    }

    /// Samples `f` on the trace row.
    pub fn from_fn(grid: WeightedGrid, gamma: f64, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let t = grid.trace_level();
        let boundary = (0..grid.nodes_per_level())
            .map(|x| {
                let p = grid.node_coords(grid.node_index(t, x));
                f(&p[..grid.n()])
            })
            .collect();
        Self::new(grid, gamma, boundary)
    }

    /// Uses `exact` on the trace row and as Dirichlet data on lateral and top faces.
    pub fn with_exact_boundary(grid: WeightedGrid, gamma: f64, exact: ScalarFn) -> Result<Self> {
        let e = exact.clone();
        let p = Self::from_fn(grid, gamma, move |x: &[f64]| {
            let mut q = x.to_vec();
            q.push(0.0);
            e(&q)
        })?;
        Ok(p.with_lateral(LateralCondition::Dirichlet(exact.clone())).with_top(TopCondition::Dirichlet(exact)))
    }

    pub fn a(&self) -> f64 {
        1.0 - 2.0 * self.gamma
    }

    pub fn with_chart(mut self, chart: MetricChart) -> Self {
        self.chart = chart;
        self
    }

    pub fn with_zeroth_order(mut self, on: bool) -> Self {
        self.zeroth_order = on;
        self
    }

    pub fn with_lateral(mut self, c: LateralCondition) -> Self {
        self.lateral = c;
        self
    }

    pub fn with_top(mut self, c: TopCondition) -> Self {
        self.top = c;
        self
    }

    pub fn with_source(mut self, f: ScalarFn) -> Self {
        self.source = Some(f);
        self
    }

    pub fn with_tolerance(mut self, tol: f64, max_iter: usize) -> Self {
        self.tol = tol;
        self.max_iter = max_iter;
        self
    }

    /// `C(n, γ)` when the zeroth-order term is on.
    pub(crate) fn zeroth_order_factor(&self) -> Result<f64> {
        if !self.zeroth_order {
            return Ok(0.0);
        }
        c_n_gamma(self.grid.n(), self.gamma)
    }
}
