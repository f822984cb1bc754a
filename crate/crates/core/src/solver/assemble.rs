//! Flux-form finite-volume assembly of `−Div(ϱ^a ∇_g U) + ϱ^a J U`.
//!
//! Every node owns the cell between the midpoints to its neighbours. A face in
//! an x direction carries `∫_cell |y|^a dy · (cross section) / h`; a face in y
//! carries `(cross section) / ∫_{y_l}^{y_{l+1}} |y|^{−a} dy`, the harmonic mean
//! of the weight between the two levels. Curved charts multiply each face by
//! `√det g / g_dd · (ϱ/|y|)^a` at the face midpoint (diagonal metrics only).

use rayon::prelude::*;

use crate::error::{invalid, LabError, Result};
use crate::geometry::chart::metric_scalar_curvature;
use crate::geometry::grid::{abs_power_integral, WeightedGrid, YLayout};
use crate::solver::problem::{ExtensionProblem, LateralCondition, TopCondition};
use crate::solver::sparse::CsrMatrix;

/// Role of a grid node in the linear system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeKind {
    Unknown(usize),
    Dirichlet(f64),
    /// Periodic copy of another node.
    Alias(usize),
}

/// Geometric coefficients shared by assembly, energy and flux evaluation.
pub struct Stencil<'a> {
    pub problem: &'a ExtensionProblem,
    grid: &'a WeightedGrid,
    periodic: bool,
    half_cells: bool,
    /// `∫_cell |y|^a dy` per level.
    cell_weight: Vec<f64>,
    /// `∫_{y_l}^{y_{l+1}} |y|^{−a} dy` per level gap.
    gap_resistance: Vec<f64>,
    curvature_factor: f64,
}

impl<'a> Stencil<'a> {
    pub fn new(problem: &'a ExtensionProblem) -> Result<Self> {
        let grid = &problem.grid;
        if problem.chart.dim() != grid.m() {
            return Err(invalid("chart", "chart dimension differs from the grid"));
        }
        let a = grid.a();
        let ys = grid.y_levels();
        let cell_weight = (0..ys.len())
            .map(|l| {
                let (lo, hi) = cell_range(grid, l);
                abs_power_integral(lo, hi, a)
            })
            .collect();
        let gap_resistance = ys.windows(2).map(|w| abs_power_integral(w[0], w[1], -a)).collect();
        let periodic = matches!(problem.lateral, LateralCondition::Periodic);
        Ok(Stencil {
            problem,
            grid,
            periodic,
            half_cells: !periodic,
            cell_weight,
            gap_resistance,
            curvature_factor: problem.zeroth_order_factor()?,
        })
    }

    pub fn grid(&self) -> &WeightedGrid {
        self.grid
    }

    fn width(&self, i: usize) -> f64 {
        let h = self.grid.h();
        if self.half_cells && (i == 0 || i + 1 == self.grid.nx()) {
            0.5 * h
        } else {
            h
        }
    }

    fn cross_section(&self, xm: &[usize], skip: Option<usize>) -> f64 {
        xm.iter().enumerate().filter(|(d, _)| Some(*d) != skip).map(|(_, &i)| self.width(i)).product()
    }

    fn metric_factor(&self, p: &[f64], dir: usize) -> Result<f64> {
        let chart = &self.problem.chart;
        if chart.is_flat() {
            return Ok(chart.weight_correction(p, self.grid.a()));
        }
        let g = chart.diagonal_metric(p).ok_or_else(|| {
            invalid("chart", "assembly supports diagonal metrics only")
        })?;
        if g.iter().any(|&v| v <= 0.0) {
            return Err(LabError::NotPositiveDefinite { point: p.to_vec() });
        }
        let sqrt_det: f64 = g.iter().product::<f64>().sqrt();
        Ok(sqrt_det / g[dir] * chart.weight_correction(p, self.grid.a()))
    }

    /// Conductance of the x-face between `xm` and `xm + e_dim` at `level`.
    pub fn kx(&self, xm: &[usize], level: usize, dim: usize) -> Result<f64> {
        let h = self.grid.h();
        let mut p: Vec<f64> = xm.iter().map(|&i| self.grid.x_coord(i)).collect();
        p[dim] += 0.5 * h;
        p.push(self.grid.level_y(level));
        let base = self.cross_section(xm, Some(dim)) * self.cell_weight[level] / h;
        Ok(base * self.metric_factor(&p, dim)?)
    }

    /// Conductance of the y-face between `level` and `level + 1`.
    pub fn ky(&self, xm: &[usize], level: usize) -> Result<f64> {
        let mut p: Vec<f64> = xm.iter().map(|&i| self.grid.x_coord(i)).collect();
        p.push(0.5 * (self.grid.level_y(level) + self.grid.level_y(level + 1)));
        let base = self.cross_section(xm, None) / self.gap_resistance[level];
        Ok(base * self.metric_factor(&p, self.grid.n())?)
    }

    /// Area factor of the `y = 0` face below a trace node, metric included.
    pub fn trace_area(&self, xm: &[usize]) -> Result<f64> {
        let mut p: Vec<f64> = xm.iter().map(|&i| self.grid.x_coord(i)).collect();
        p.push(0.0);
        Ok(self.cross_section(xm, None) * self.metric_factor(&p, self.grid.n())?)
    }

    /// `∫_cell ϱ^a dvol_g` for the node's cell.
    pub fn mass(&self, xm: &[usize], level: usize) -> f64 {
        let base = self.cross_section(xm, None) * self.cell_weight[level];
        let chart = &self.problem.chart;
        if chart.is_flat() {
            return base;
        }
        let mut p: Vec<f64> = xm.iter().map(|&i| self.grid.x_coord(i)).collect();
        p.push(self.grid.level_y(level));
        base * chart.sqrt_det(&p) * chart.weight_correction(&p, self.grid.a())
    }

    /// `J = C(n, γ) R` at a node.
    pub fn zeroth_order(&self, p: &[f64]) -> Result<f64> {
        if self.curvature_factor == 0.0 {
            return Ok(0.0);
        }
        Ok(self.curvature_factor * metric_scalar_curvature(&self.problem.chart, p)?)
    }

    /// Canonical node of an x multi-index after periodic wrapping.
    fn canonical(&self, xm: &mut [usize]) {
        if self.periodic {
            let last = self.grid.nx() - 1;
            xm.iter_mut().filter(|i| **i == last).for_each(|i| *i = 0);
        }
    }

    /// Neighbours of a node: `(node, conductance)` over all faces.
    pub fn neighbours(&self, node: usize) -> Result<Vec<(usize, f64)>> {
        let g = self.grid;
        let npl = g.nodes_per_level();
        let level = node / npl;
        let mut xm = g.x_multi(node % npl);
        // periodic copies behave like their canonical node
        self.canonical(&mut xm);
        let nx = g.nx();
        let mut out = Vec::with_capacity(2 * g.m());
        for d in 0..g.n() {
            // + direction
            if xm[d] + 1 < nx {
                let k = self.kx(&xm, level, d)?;
                let mut q = xm.clone();
                q[d] += 1;
                self.canonical(&mut q);
                out.push((g.node_index(level, g.x_flat(&q)), k));
            }
            // − direction
            if xm[d] > 0 {
                let mut q = xm.clone();
                q[d] -= 1;
                let k = self.kx(&q, level, d)?;
                out.push((g.node_index(level, g.x_flat(&q)), k));
            } else if self.periodic {
                let mut q = xm.clone();
                q[d] = nx - 2;
                let k = self.kx(&q, level, d)?;
                out.push((g.node_index(level, g.x_flat(&q)), k));
            }
        }
        let xf = g.x_flat(&xm);
        if level + 1 < g.num_levels() {
            out.push((g.node_index(level + 1, xf), self.ky(&xm, level)?));
        }
        if level > 0 {
            out.push((g.node_index(level - 1, xf), self.ky(&xm, level - 1)?));
        }
        Ok(out)
    }
}

/// Signed y-range of the cell owned by a storage level.
pub fn cell_range(grid: &WeightedGrid, level: usize) -> (f64, f64) {
    let t = grid.trace_level();
    let (j, sign) = if level >= t { (level - t, 1.0) } else { (t - level, -1.0) };
    let h = grid.h();
    let top = grid.y_top();
    let (lo, hi) = match (grid.layout(), j) {
        (YLayout::Aligned, 0) => (if grid.doubled() { -0.5 * h } else { 0.0 }, 0.5 * h),
        (YLayout::HalfOffset, 0) => (0.0, 0.0),
        (YLayout::Aligned, j) => ((j as f64 - 0.5) * h, ((j as f64 + 0.5) * h).min(top)),
        (YLayout::HalfOffset, j) => ((j as f64 - 1.0) * h, j as f64 * h),
    };
    if j == 0 || sign > 0.0 {
        (lo, hi)
    } else {
        (-hi, -lo)
    }
}

/// Classifies every node as unknown, Dirichlet or periodic alias.
pub fn classify_nodes(problem: &ExtensionProblem) -> Vec<NodeKind> {
    let g = &problem.grid;
    let npl = g.nodes_per_level();
    let t = g.trace_level();
    let nx = g.nx();
    let last_level = g.num_levels() - 1;
    let mut next = 0;
    (0..g.num_nodes())
        .map(|node| {
            let level = node / npl;
            let xf = node % npl;
            let xm = g.x_multi(xf);
            let on_side = xm.iter().any(|&i| i == 0 || i + 1 == nx);
            if level == t {
                return NodeKind::Dirichlet(problem.boundary[xf]);
            }
            if let LateralCondition::Dirichlet(f) = &problem.lateral {
                if on_side {
                    return NodeKind::Dirichlet(f(&g.node_coords(node)));
                }
            }
            if let TopCondition::Dirichlet(f) = &problem.top {
                if level == last_level || (g.doubled() && level == 0) {
                    return NodeKind::Dirichlet(f(&g.node_coords(node)));
                }
            }
            if matches!(problem.lateral, LateralCondition::Periodic) && xm.iter().any(|&i| i + 1 == nx) {
                let canon: Vec<usize> = xm.iter().map(|&i| if i + 1 == nx { 0 } else { i }).collect();
                return NodeKind::Alias(g.node_index(level, g.x_flat(&canon)));
            }
            next += 1;
            NodeKind::Unknown(next - 1)
        })
        .collect()
}

/// Assembled linear system together with its node bookkeeping.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub kinds: Vec<NodeKind>,
    /// Node index of every unknown.
    pub unknown_nodes: Vec<usize>,
}

impl LinearSystem {
    /// Full nodal vector from a vector of unknowns.
    pub fn scatter(&self, x: &[f64]) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .kinds
            .iter()
            .map(|k| match *k {
                NodeKind::Unknown(i) => x[i],
                NodeKind::Dirichlet(v) => v,
                NodeKind::Alias(_) => 0.0,
            })
            .collect();
        for i in 0..v.len() {
            if let NodeKind::Alias(c) = self.kinds[i] {
                v[i] = v[c];
            }
        }
        v
    }
}

/// Builds the symmetric system for the unknown nodes; Dirichlet neighbours are
/// moved to the right-hand side.
pub fn assemble(problem: &ExtensionProblem) -> Result<LinearSystem> {
    let stencil = Stencil::new(problem)?;
    let kinds = classify_nodes(problem);
    let unknown_nodes: Vec<usize> =
        kinds.iter().enumerate().filter(|(_, k)| matches!(k, NodeKind::Unknown(_))).map(|(i, _)| i).collect();
    let g = &problem.grid;
    let npl = g.nodes_per_level();
    let rows: Vec<(Vec<(usize, f64)>, f64)> = unknown_nodes
        .par_iter()
        .map(|&node| -> Result<(Vec<(usize, f64)>, f64)> {
            let NodeKind::Unknown(row) = kinds[node] else { unreachable!() };
            let mut entries = Vec::with_capacity(2 * g.m() + 1);
            let mut diag = 0.0;
            let mut rhs = 0.0;
            for (q, k) in stencil.neighbours(node)? {
                diag += k;
                match kinds[q] {
                    NodeKind::Unknown(col) => entries.push((col, -k)),
                    NodeKind::Dirichlet(v) => rhs += k * v,
                    NodeKind::Alias(c) => match kinds[c] {
                        NodeKind::Unknown(col) => entries.push((col, -k)),
                        NodeKind::Dirichlet(v) => rhs += k * v,
                        NodeKind::Alias(_) => unreachable!("aliases point at canonical nodes"),
                    },
                }
            }
            let level = node / npl;
            let xm = g.x_multi(node % npl);
            let needs_point = stencil.curvature_factor != 0.0 || problem.source.is_some();
            if needs_point {
                let p = g.node_coords(node);
                let mass = stencil.mass(&xm, level);
                diag += mass * stencil.zeroth_order(&p)?;
                if let Some(src) = &problem.source {
                    rhs += mass * src(&p);
                }
            }
            if diag <= 0.0 {
                return Err(LabError::IndefiniteSystem(format!(
                    "diagonal {diag:e} at node {:?}; refine the grid or drop the zeroth-order term",
                    g.node_coords(node)
                )));
            }
            entries.push((row, diag));
            Ok((entries, rhs))
        })
        .collect::<Result<_>>()?;
    let (entries, rhs): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    Ok(LinearSystem { matrix: CsrMatrix::from_rows(entries), rhs, kinds, unknown_nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn laplace_reduction_is_five_point() {
        let g = WeightedGrid::new(1, 0.25, 1.0, 1.0, 0.0, false).unwrap();
        let p = ExtensionProblem::from_fn(g.clone(), 0.5, |_| 0.0)
            .unwrap()
            .with_lateral(LateralCondition::zero_dirichlet())
            .with_top(TopCondition::Dirichlet(Arc::new(|_: &[f64]| 0.0)));
        let sys = assemble(&p).unwrap();
        assert_eq!(sys.matrix.nrows, 7 * 3);
        assert!(sys.matrix.is_symmetric(0.0));
        // interior unknown at x = 0, y = 0.5
        let node = g.node_index(2, 4);
        let NodeKind::Unknown(r) = sys.kinds[node] else { panic!() };
        let row: Vec<(usize, f64)> = sys.matrix.row(r).collect();
        assert_eq!(row.len(), 5);
        for (c, v) in row {
            assert_eq!(v, if c == r { 4.0 } else { -1.0 });
        }
    }

    #[test]
    fn row_sums_vanish_for_neumann_interior() {
        let g = WeightedGrid::new(2, 0.125, 1.0, 1.0, 0.4, false).unwrap();
        let p = ExtensionProblem::from_fn(g, 0.3, |_| 1.0).unwrap();
        let sys = assemble(&p).unwrap();
        let kinds = &sys.kinds;
        let mut checked = 0;
        for (r, &node) in sys.unknown_nodes.iter().enumerate() {
            let touches_dirichlet = Stencil::new(&p)
                .unwrap()
                .neighbours(node)
                .unwrap()
                .iter()
                .any(|(q, _)| matches!(kinds[*q], NodeKind::Dirichlet(_)));
            if !touches_dirichlet {
                let s: f64 = sys.matrix.row(r).map(|e| e.1).sum();
                assert!(s.abs() < 1e-12);
                checked += 1;
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn periodic_aliases() {
        let g = WeightedGrid::new(1, 0.25, 1.0, 1.0, 0.0, false).unwrap();
        let p = ExtensionProblem::from_fn(g.clone(), 0.5, |_| 0.0).unwrap().with_lateral(LateralCondition::Periodic);
        let sys = assemble(&p).unwrap();
        assert_eq!(sys.matrix.nrows, 8 * 4);
        assert!(sys.matrix.is_symmetric(1e-15));
        assert!(matches!(sys.kinds[g.node_index(1, 8)], NodeKind::Alias(a) if a == g.node_index(1, 0)));
    }

    #[test]
    fn strongly_negative_zeroth_order_is_rejected() {
        use crate::geometry::chart::MetricChart;
        let g = WeightedGrid::new(2, 0.25, 1.0, 1.0, 0.0, false).unwrap();
        let chart = MetricChart::flat(3).with_curvature(Arc::new(|_: &[f64]| 1e6));
        // C(2, 1/2) < 0, so a huge positive curvature gives a negative mass term
        let p = ExtensionProblem::from_fn(g, 0.5, |_| 1.0).unwrap().with_chart(chart).with_zeroth_order(true);
        assert!(matches!(assemble(&p), Err(LabError::IndefiniteSystem(_))));
    }
}
