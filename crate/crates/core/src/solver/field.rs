//! Solved extension fields: interpolation, gradients and energies.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::Result;
use crate::field::ScalarField;
use crate::geometry::grid::WeightedGrid;
use crate::solver::assemble::{NodeKind, Stencil};
use crate::solver::problem::ExtensionProblem;
use crate::solver::sparse::CgReport;

/// Nodal solution of an [`ExtensionProblem`].
#[derive(Debug, Clone)]
pub struct SolutionField {
    problem: Arc<ExtensionProblem>,
    values: Vec<f64>,
    /// Node-wise gradients, `m` entries per node.
    gradients: Vec<f64>,
    pub report: CgReport,
    /// Discrete `∫ ϱ^a |∇U|²` from the face conductances.
    pub energy: f64,
}

/// Both sides of the discrete divergence theorem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyIdentity {
    pub dirichlet_energy: f64,
    /// `Σ M J U²` over unknown nodes.
    pub zeroth_order: f64,
    /// `Σ U_D · flux` over Dirichlet nodes.
    pub boundary_flux: f64,
    /// `Σ M F U` over unknown nodes.
    pub source_work: f64,
}

impl EnergyIdentity {
    pub fn relative_gap(&self) -> f64 {
        let lhs = self.dirichlet_energy + self.zeroth_order;
        let rhs = self.boundary_flux + self.source_work;
        (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE)
    }
}

impl SolutionField {
    pub(crate) fn new(problem: Arc<ExtensionProblem>, values: Vec<f64>, report: CgReport) -> Result<Self> {
        let gradients = node_gradients(&problem.grid, &values, matches!(problem.lateral, crate::solver::LateralCondition::Periodic));
        let mut field = SolutionField { problem, values, gradients, report, energy: 0.0 };
        field.energy = field.dirichlet_energy()?;
        Ok(field)
    }

    /// Wraps given nodal values without solving; used to probe trace and
    /// frequency code on prescribed profiles.
    pub fn from_values(problem: ExtensionProblem, values: Vec<f64>) -> Result<Self> {
        if values.len() != problem.grid.num_nodes() {
            return Err(crate::error::invalid("values", "length differs from the node count"));
        }
        Self::new(Arc::new(problem), values, CgReport::default())
    }

    pub fn problem(&self) -> &ExtensionProblem {
        &self.problem
    }

    pub fn grid(&self) -> &WeightedGrid {
        &self.problem.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn node_gradient(&self, node: usize) -> &[f64] {
        let m = self.grid().m();
        &self.gradients[node * m..(node + 1) * m]
    }

    fn dirichlet_energy(&self) -> Result<f64> {
        let st = Stencil::new(&self.problem)?;
        let kinds = crate::solver::assemble::classify_nodes(&self.problem);
        let parts: Vec<f64> = (0..self.values.len())
            .into_par_iter()
            .map(|i| -> Result<f64> {
                if matches!(kinds[i], NodeKind::Alias(_)) {
                    return Ok(0.0);
                }
                Ok(st.neighbours(i)?.iter().map(|&(q, k)| k * (self.values[i] - self.values[q]).powi(2)).sum::<f64>())
            })
            .collect::<Result<_>>()?;
        Ok(0.5 * ordered_sum(&parts))
    }

    /// Evaluates both sides of `Σ k (ΔU)² + Σ M J U² = Σ U_D flux + Σ M F U`.
    pub fn energy_identity(&self) -> Result<EnergyIdentity> {
        let p = &self.problem;
        let st = Stencil::new(p)?;
        let kinds = crate::solver::assemble::classify_nodes(p);
        let g = &p.grid;
        let npl = g.nodes_per_level();
        let terms: Vec<[f64; 3]> = (0..self.values.len())
            .into_par_iter()
            .map(|i| -> Result<[f64; 3]> {
                let u = self.values[i];
                match kinds[i] {
                    NodeKind::Alias(_) => Ok([0.0; 3]),
                    NodeKind::Dirichlet(_) => {
                        let flux: f64 = st.neighbours(i)?.iter().map(|&(q, k)| k * (u - self.values[q])).sum();
                        Ok([0.0, u * flux, 0.0])
                    }
                    NodeKind::Unknown(_) => {
                        let xm = g.x_multi(i % npl);
                        let mass = st.mass(&xm, i / npl);
                        let pt = g.node_coords(i);
                        let j = st.zeroth_order(&pt)?;
                        let f = p.source.as_ref().map_or(0.0, |s| s(&pt));
                        Ok([mass * j * u * u, 0.0, mass * f * u])
                    }
                }
            })
            .collect::<Result<_>>()?;
        let col = |c: usize| ordered_sum(&terms.iter().map(|t| t[c]).collect::<Vec<_>>());
        Ok(EnergyIdentity {
            dirichlet_energy: self.energy,
            zeroth_order: col(0),
            boundary_flux: col(1),
            source_work: col(2),
        })
    }

    /// Largest `|U(x, −y) − U(x, y)|` on a doubled grid, 0 otherwise.
    pub fn evenness_defect(&self) -> f64 {
        self.grid()
            .pairing_table()
            .iter()
            .map(|&(a, b)| (self.values[a] - self.values[b]).abs())
            .fold(0.0, f64::max)
    }

    /// `(min U, max U)` over nodes of the inner half box `|x_i| ≤ L/2`, `|y| ≤ Y/2`.
    pub fn inner_half_box_range(&self) -> (f64, f64) {
        let g = self.grid();
        let (lx, ly) = (0.5 * g.half_width() + 1e-12, 0.5 * g.y_extent() + 1e-12);
        (0..g.num_nodes())
            .filter(|&i| {
                let p = g.node_coords(i);
                p[..g.n()].iter().all(|x| x.abs() <= lx) && p[g.n()].abs() <= ly
            })
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| (lo.min(self.values[i]), hi.max(self.values[i])))
    }

    /// Corner nodes and multilinear weights of the cell containing `p`, and
    /// the sign of the y-component under reflection onto the half grid.
    fn corners(&self, p: &[f64]) -> (Vec<(usize, f64)>, f64) {
        let g = self.grid();
        let n = g.n();
        let h = g.h();
        let mut cell = Vec::with_capacity(n + 1);
        for &x in &p[..n] {
            let s = ((x + g.half_width()) / h).clamp(0.0, (g.nx() - 1) as f64);
            let i = (s.floor() as usize).min(g.nx() - 2);
            cell.push((i, s - i as f64));
        }
        let (y, sign) = if g.doubled() || p[n] >= 0.0 { (p[n], 1.0) } else { (-p[n], -1.0) };
        let last = g.num_levels() - 1;
        let y = y.clamp(g.level_y(0), g.level_y(last));
        // first guess from the uniform spacing, then correct by a step
        let t = g.trace_level() as f64;
        let guess = match g.layout() {
            crate::geometry::YLayout::Aligned => t + (y / h).floor(),
            crate::geometry::YLayout::HalfOffset => t + (y / h + 0.5).floor() - if y < 0.0 { 1.0 } else { 0.0 },
        };
        let mut l = (guess.max(0.0) as usize).min(last - 1);
        while l > 0 && g.level_y(l) > y {
            l -= 1;
        }
        while l + 1 < last && g.level_y(l + 1) <= y {
            l += 1;
        }
        let (y0, y1) = (g.level_y(l), g.level_y(l + 1));
        cell.push((l, ((y - y0) / (y1 - y0)).clamp(0.0, 1.0)));
        let m = n + 1;
        let npl = g.nodes_per_level();
        let mut out = Vec::with_capacity(1 << m);
        let mut xm = vec![0usize; n];
        for corner in 0..(1usize << m) {
            let mut w = 1.0;
            for (d, &(i, t)) in cell.iter().enumerate() {
                let up = corner >> d & 1 == 1;
                w *= if up { t } else { 1.0 - t };
                if d < n {
                    xm[d] = i + usize::from(up);
                }
            }
            if w != 0.0 {
                let level = cell[n].0 + (corner >> n & 1);
                out.push((level * npl + g.x_flat(&xm), w));
            }
        }
        (out, sign)
    }

    /// Multilinear interpolation; points below the half grid are reflected.
    pub fn interpolate(&self, p: &[f64]) -> f64 {
        self.corners(p).0.iter().map(|&(i, w)| w * self.values[i]).sum()
    }

    /// Interpolated node gradients; the y component flips under reflection.
    pub fn interpolate_gradient(&self, p: &[f64]) -> Vec<f64> {
        self.interpolate_with_gradient(p).1
    }

    pub fn interpolate_with_gradient(&self, p: &[f64]) -> (f64, Vec<f64>) {
        let m = self.grid().m();
        let (corners, sign) = self.corners(p);
        let mut v = 0.0;
        let mut grad = vec![0.0; m];
        for &(i, w) in &corners {
            v += w * self.values[i];
            for (d, gd) in grad.iter_mut().enumerate() {
                *gd += w * self.gradients[i * m + d];
            }
        }
        grad[m - 1] *= sign;
        (v, grad)
    }
}

impl ScalarField for SolutionField {
    fn dim(&self) -> usize {
        self.grid().m()
    }
    fn value(&self, p: &[f64]) -> f64 {
        self.interpolate(p)
    }
    fn gradient(&self, p: &[f64]) -> Vec<f64> {
        self.interpolate_gradient(p)
    }
    fn value_and_gradient(&self, p: &[f64]) -> (f64, Vec<f64>) {
        self.interpolate_with_gradient(p)
    }
    fn check_ball(&self, center: &[f64], r: f64) -> Result<()> {
        self.grid().check_ball(center, r)
    }
    fn resolution(&self) -> Option<f64> {
        Some(self.grid().h())
    }
}

/// Sum in a fixed order independent of the thread count.
pub(crate) fn ordered_sum(v: &[f64]) -> f64 {
    v.iter().sum()
}

fn node_gradients(g: &WeightedGrid, u: &[f64], periodic: bool) -> Vec<f64> {
    let m = g.m();
    let n = g.n();
    let nx = g.nx();
    let npl = g.nodes_per_level();
    let h = g.h();
    let levels = g.num_levels();
    let t = g.trace_level();
    let mut out = vec![0.0; u.len() * m];
    out.par_chunks_mut(m).enumerate().for_each(|(node, grad)| {
        let level = node / npl;
        let xf = node % npl;
        let xm = g.x_multi(xf);
        let stride = |d: usize| nx.pow(d as u32);
        for d in 0..n {
            let i = xm[d];
            let s = stride(d);
            grad[d] = if i > 0 && i + 1 < nx {
                (u[node + s] - u[node - s]) / (2.0 * h)
            } else if periodic {
                // node nx−1 duplicates node 0
                let (plus, minus) = if i == 0 { (node + s, node + (nx - 2) * s) } else { (node + s - (nx - 1) * s, node - s) };
                (u[plus] - u[minus]) / (2.0 * h)
            } else if i == 0 {
                (u[node + s] - u[node]) / h
            } else {
                (u[node] - u[node - s]) / h
            };
        }
        let y = g.level_y(level);
        grad[n] = if level == t && !g.doubled() {
            0.0
        } else if level > 0 && level + 1 < levels {
            let (ym, yp) = (g.level_y(level - 1), g.level_y(level + 1));
            let (dm, dp) = (y - ym, yp - y);
            let (um, u0, up) = (u[node - npl], u[node], u[node + npl]);
            (dm * dm * (up - u0) + dp * dp * (u0 - um)) / (dm * dp * (dm + dp))
        } else if level == 0 {
            (u[node + npl] - u[node]) / (g.level_y(1) - y)
        } else {
            (u[node] - u[node - npl]) / (y - g.level_y(level - 1))
        };
    });
    out
}
