//! Weighted quadrature on spheres and balls centred on `{y = 0}`.
//!
//! The polar variable is the last coordinate `t = y / r`; the factor
//! `|t|^a (1 − t²)^{(m−3)/2}` is absorbed by a Gauss–Jacobi rule in `s = t²`,
//! and the remaining `S^{m−2}` directions use the same construction without
//! weight. Mirror nodes `±t` carry identical weights.

use crate::error::{invalid, LabError, Result};
use crate::geometry::chart::MetricChart;
use crate::geometry::grid::WeightedGrid;
use crate::geometry::jacobi::gauss_jacobi_unit;

/// Highest polynomial degree the rules are built for.
pub const MAX_ORDER: usize = 64;

/// Unit-sphere rule on `S^{m−1}` for `∮ |y|^a Q dσ`, exact for deg Q ≤ `degree`.
pub fn unit_sphere_rule(m: usize, a: f64, degree: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    assert!(m >= 1);
    if m == 1 {
        return (vec![vec![-1.0], vec![1.0]], vec![1.0, 1.0]);
    }
    let npts = degree / 2 + 1;
    let (s, w) = gauss_jacobi_unit(npts, (a - 1.0) / 2.0, (m as f64 - 3.0) / 2.0);
    let (inner_nodes, inner_w) = unit_sphere_rule(m - 1, 0.0, degree);
    let mut nodes = Vec::with_capacity(2 * npts * inner_nodes.len());
    let mut weights = Vec::with_capacity(nodes.capacity());
    for (&si, &wi) in s.iter().zip(&w) {
        let t = si.sqrt();
        let c = (1.0 - si).max(0.0).sqrt();
        for sign in [-1.0, 1.0] {
            for (om, &wo) in inner_nodes.iter().zip(&inner_w) {
                let mut p: Vec<f64> = om.iter().map(|o| c * o).collect();
                p.push(sign * t);
                nodes.push(p);
                weights.push(0.5 * wi * wo);
            }
        }
    }
    (nodes, weights)
}

/// A quadrature rule with nodes in ambient coordinates.
#[derive(Debug, Clone)]
pub struct WeightedQuadrature {
    pub center: Vec<f64>,
    pub radius: f64,
    /// Ambient node positions.
    pub points: Vec<Vec<f64>>,
    /// Node positions relative to the centre, divided by the radius.
    pub unit_points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// Declared polynomial exactness degree.
    pub degree: usize,
}

/// Rule on the sphere `∂B_r(center)`.
pub type SphereQuadrature = WeightedQuadrature;

impl WeightedQuadrature {
    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }

    /// Multiplies every weight by the metric surface element and the `ϱ^a/|y|^a`
    /// correction of `chart` (sphere rules only).
    pub fn apply_chart_sphere(mut self, chart: &MetricChart, a: f64) -> Self {
        if chart.is_flat() && chart.weight_correction(&self.center, a) == 1.0 {
            return self;
        }
        for ((p, u), w) in self.points.iter().zip(&self.unit_points).zip(self.weights.iter_mut()) {
            *w *= chart.surface_factor(p, u) * chart.weight_correction(p, a);
        }
        self
    }

    /// Multiplies every weight by `√det g` and the `ϱ^a/|y|^a` correction (ball rules).
    pub fn apply_chart_ball(mut self, chart: &MetricChart, a: f64) -> Self {
        if chart.is_flat() {
            return self;
        }
        for (p, w) in self.points.iter().zip(self.weights.iter_mut()) {
            *w *= chart.sqrt_det(p) * chart.weight_correction(p, a);
        }
        self
    }
}

fn check_center(m: usize, center: &[f64], r: f64, order: usize) -> Result<Vec<f64>> {
    if order < 2 {
        return Err(invalid("order", format!("quadrature order must be >= 2, got {order}")));
    }
    if order > MAX_ORDER {
        return Err(LabError::OrderTooLarge { order, max: MAX_ORDER });
    }
    if !(r > 0.0) {
        return Err(invalid("r", format!("radius must be positive, got {r}")));
    }
    let mut c = center.to_vec();
    match c.len() {
        l if l == m - 1 => c.push(0.0),
        l if l == m => {
            if c[m - 1] != 0.0 {
                return Err(invalid("center", "centres must lie on {y = 0}"));
            }
        }
        _ => return Err(invalid("center", format!("expected {} coordinates", m - 1))),
    }
    Ok(c)
}

/// Sphere rule in `R^m` without domain checks.
pub fn sphere_rule(m: usize, a: f64, center: &[f64], r: f64, order: usize) -> Result<SphereQuadrature> {
    let c = check_center(m, center, r, order)?;
    let (unit, w) = unit_sphere_rule(m, a, order);
    let scale = r.powf(m as f64 - 1.0 + a);
    let points = unit.iter().map(|u| c.iter().zip(u).map(|(ci, ui)| ci + r * ui).collect()).collect();
    Ok(WeightedQuadrature {
        center: c,
        radius: r,
        points,
        unit_points: unit,
        weights: w.iter().map(|w| w * scale).collect(),
        degree: order,
    })
}

/// Solid-ball rule in `R^m` without domain checks.
pub fn ball_rule(m: usize, a: f64, center: &[f64], r: f64, order: usize) -> Result<WeightedQuadrature> {
    let c = check_center(m, center, r, order)?;
    let (unit, w) = unit_sphere_rule(m, a, order);
    let (rho, wr) = gauss_jacobi_unit(order / 2 + 1, m as f64 - 1.0 + a, 0.0);
    let scale = r.powf(m as f64 + a);
    let mut points = Vec::with_capacity(unit.len() * rho.len());
    let mut unit_points = Vec::with_capacity(points.capacity());
    let mut weights = Vec::with_capacity(points.capacity());
    for (&p, &wp) in rho.iter().zip(&wr) {
        for (u, &wu) in unit.iter().zip(&w) {
            let up: Vec<f64> = u.iter().map(|x| p * x).collect();
            points.push(c.iter().zip(&up).map(|(ci, ui)| ci + r * ui).collect());
            unit_points.push(up);
            weights.push(wp * wu * scale);
        }
    }
    Ok(WeightedQuadrature { center: c, radius: r, points, unit_points, weights, degree: order })
}

/// Sphere rule for `∮_{∂B_r} |y|^a Q dσ` with the ball checked against the grid box.
pub fn sphere_quadrature(grid: &WeightedGrid, center: &[f64], r: f64, order: usize) -> Result<SphereQuadrature> {
    grid.check_ball(center, r)?;
    sphere_rule(grid.m(), grid.a(), center, r, order)
}

/// Ball rule for `∫_{B_r} |y|^a Q dx` with the ball checked against the grid box.
pub fn ball_quadrature(grid: &WeightedGrid, center: &[f64], r: f64, order: usize) -> Result<WeightedQuadrature> {
    grid.check_ball(center, r)?;
    ball_rule(grid.m(), grid.a(), center, r, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::constants::{beta, weighted_ball_measure, weighted_sphere_measure};
    use std::f64::consts::PI;

    #[test]
    fn circle_examples() {
        let g = WeightedGrid::new(1, 0.125, 2.0, 2.0, 0.0, false).unwrap();
        let q = sphere_quadrature(&g, &[0.0], 1.0, 8).unwrap();
        assert!((q.integrate(|_| 1.0) - 2.0 * PI).abs() < 1e-12);
        assert!((q.integrate(|p| p[1] * p[1]) - PI).abs() < 1e-12);
        let b = ball_quadrature(&g, &[0.0], 1.0, 8).unwrap();
        assert!((b.integrate(|_| 1.0) - PI).abs() < 1e-12);
    }

    #[test]
    fn weighted_circle_matches_beta() {
        for &a in &[-0.9, -0.5, 0.0, 0.5, 0.9] {
            let q = sphere_rule(2, a, &[0.0], 1.0, 4).unwrap();
            let exact = 2.0 * beta((1.0 + a) / 2.0, 0.5);
            assert!((q.integrate(|_| 1.0) - exact).abs() < 1e-12);
        }
        let b = ball_rule(2, 1.0 - 1e-12, &[0.0], 1.0, 4).unwrap();
        assert!((b.integrate(|_| 1.0) - 4.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn closed_forms_all_dimensions() {
        for m in 2..=4 {
            for &a in &[-0.9, -0.5, 0.0, 0.5, 0.9] {
                let s = sphere_rule(m, a, &vec![0.0; m - 1], 1.0, 6).unwrap();
                let b = ball_rule(m, a, &vec![0.0; m - 1], 1.0, 6).unwrap();
                let es = weighted_sphere_measure(m, a);
                let eb = weighted_ball_measure(m, a);
                assert!((s.integrate(|_| 1.0) - es).abs() < 1e-10 * es);
                assert!((b.integrate(|_| 1.0) - eb).abs() < 1e-10 * eb);
            }
        }
    }

    #[test]
    fn mirror_weights_are_equal() {
        let q = sphere_rule(3, -0.4, &[0.0, 0.0], 0.7, 10).unwrap();
        for (i, p) in q.unit_points.iter().enumerate() {
            let mut mirror = p.clone();
            mirror[2] = -mirror[2];
            let j = q.unit_points.iter().position(|u| *u == mirror).expect("mirror node");
            assert_eq!(q.weights[i], q.weights[j]);
        }
    }

    #[test]
    fn domain_and_order_errors() {
        let g = WeightedGrid::new(1, 0.125, 1.0, 1.0, 0.0, false).unwrap();
        assert!(matches!(sphere_quadrature(&g, &[0.5], 0.6, 4), Err(LabError::BallOutsideDomain { .. })));
        assert!(matches!(sphere_quadrature(&g, &[0.0], 0.5, 200), Err(LabError::OrderTooLarge { .. })));
        assert!(sphere_quadrature(&g, &[0.0], 0.5, 1).is_err());
    }
}
