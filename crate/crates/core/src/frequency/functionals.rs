//! Weighted height, energy and frequency functionals on boundary-centred balls.

use crate::error::{invalid, Result};
use crate::field::ScalarField;
use crate::geometry::chart::{metric_scalar_curvature, MetricChart};
use crate::geometry::quadrature::{ball_rule, sphere_rule, WeightedQuadrature};
use crate::poly::solutions::HomogeneousSolution;
use crate::solver::field::SolutionField;

/// Radial scaling convention of `H`, `D` and `I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Plain integrals `∮ ϱ^a U²`, `∫ ϱ^a |∇U|²`.
    #[default]
    Unnormalized,
    /// Integrals divided by `r^{n+a}`, so that `H ~ r^{2d}` for degree-d members.
    Model,
}

/// Everything the functionals need besides the field.
#[derive(Debug, Clone)]
pub struct FrequencySettings {
    pub a: f64,
    pub chart: MetricChart,
    /// `C(n, γ)` when the zeroth-order term enters `I`, else 0.
    pub curvature_factor: f64,
    /// Quadrature exactness degree.
    pub order: usize,
    pub normalization: Normalization,
}

impl FrequencySettings {
    pub fn flat(m: usize, a: f64) -> Self {
        FrequencySettings {
            a,
            chart: MetricChart::flat(m),
            curvature_factor: 0.0,
            order: 24,
            normalization: Normalization::Unnormalized,
        }
    }

    /// Flat settings exact for a polynomial member.
    pub fn for_member(p: &HomogeneousSolution) -> Self {
        let order = (2 * p.degree as usize + 4).clamp(8, crate::geometry::quadrature::MAX_ORDER);
        FrequencySettings { order, ..Self::flat(p.nvars, p.a()) }
    }

    /// Settings matching a solved field's weight, chart and zeroth-order term.
    pub fn for_solution(s: &SolutionField) -> Result<Self> {
        let p = s.problem();
        Ok(FrequencySettings {
            a: p.grid.a(),
            chart: p.chart.clone(),
            curvature_factor: p.zeroth_order_factor()?,
            order: 24,
            normalization: Normalization::Unnormalized,
        })
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn m(&self) -> usize {
        self.chart.dim()
    }

    /// Factor applied to raw integrals at radius `r`.
    pub fn scale_factor(&self, r: f64) -> f64 {
        match self.normalization {
            Normalization::Unnormalized => 1.0,
            Normalization::Model => r.powf(-(self.m() as f64 - 1.0 + self.a)),
        }
    }

    pub(crate) fn sphere(&self, center: &[f64], r: f64) -> Result<WeightedQuadrature> {
        Ok(sphere_rule(self.m(), self.a, center, r, self.order)?.apply_chart_sphere(&self.chart, self.a))
    }

    pub(crate) fn ball(&self, center: &[f64], r: f64) -> Result<WeightedQuadrature> {
        Ok(ball_rule(self.m(), self.a, center, r, self.order)?.apply_chart_ball(&self.chart, self.a))
    }
}

/// `H`, `D`, `I` at one centre and radius, and `N = r I / H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Functionals {
    pub r: f64,
    pub h: f64,
    pub d: f64,
    pub i: f64,
}

impl Functionals {
    pub fn n(&self) -> f64 {
        self.r * self.i / self.h
    }
}

pub(crate) fn boundary_point(u: &(impl ScalarField + ?Sized), x: &[f64]) -> Result<Vec<f64>> {
    let m = u.dim();
    match x.len() {
        l if l + 1 == m => {
            let mut c = x.to_vec();
            c.push(0.0);
            Ok(c)
        }
        l if l == m && x[m - 1] == 0.0 => Ok(x.to_vec()),
        _ => Err(invalid("center", format!("expected a point of {{y = 0}} with {} coordinates", m - 1))),
    }
}

/// `H = ∮_{∂B_r} ϱ^a (U − c)²`, with `c = 0` unless `subtract` is given.
pub fn functional_h(
    u: &(impl ScalarField + ?Sized),
    x: &[f64],
    r: f64,
    s: &FrequencySettings,
    subtract: Option<f64>,
) -> Result<f64> {
    let c = boundary_point(u, x)?;
    u.check_ball(&c, r)?;
    let off = subtract.unwrap_or(0.0);
    Ok(s.scale_factor(r) * s.sphere(&c, r)?.integrate(|p| (u.value(p) - off).powi(2)))
}

/// `D = ∫_{B_r} ϱ^a |∇U|_g²`.
pub fn functional_d(u: &(impl ScalarField + ?Sized), x: &[f64], r: f64, s: &FrequencySettings) -> Result<f64> {
    Ok(functionals(u, x, r, s, None)?.d)
}

/// `I = ∫_{B_r} ϱ^a (|∇U|_g² + J (U − c)²)`.
pub fn functional_i(
    u: &(impl ScalarField + ?Sized),
    x: &[f64],
    r: f64,
    s: &FrequencySettings,
    subtract: Option<f64>,
) -> Result<f64> {
    Ok(functionals(u, x, r, s, subtract)?.i)
}

/// All three functionals in one pass over the quadrature nodes.
pub fn functionals(
    u: &(impl ScalarField + ?Sized),
    x: &[f64],
    r: f64,
    s: &FrequencySettings,
    subtract: Option<f64>,
) -> Result<Functionals> {
    if s.m() != u.dim() {
        return Err(invalid("settings", "chart dimension differs from the field"));
    }
    let c = boundary_point(u, x)?;
    u.check_ball(&c, r)?;
    let off = subtract.unwrap_or(0.0);
    let h = s.sphere(&c, r)?.integrate(|p| (u.value(p) - off).powi(2));
    let ball = s.ball(&c, r)?;
    let flat = s.chart.is_flat();
    let mut d = 0.0;
    let mut j = 0.0;
    for (p, w) in ball.points.iter().zip(&ball.weights) {
        let (v, g) = u.value_and_gradient(p);
        d += w * if flat { g.iter().map(|x| x * x).sum() } else { s.chart.co_norm_sq(p, &g) };
        if s.curvature_factor != 0.0 {
            j += w * s.curvature_factor * metric_scalar_curvature(&s.chart, p)? * (v - off).powi(2);
        }
    }
    let k = s.scale_factor(r);
    Ok(Functionals { r, h: k * h, d: k * d, i: k * (d + j) })
}

/// `∫_{B_r} ϱ^a U²`.
pub fn ball_l2(u: &(impl ScalarField + ?Sized), x: &[f64], r: f64, s: &FrequencySettings) -> Result<f64> {
    let c = boundary_point(u, x)?;
    u.check_ball(&c, r)?;
    Ok(s.ball(&c, r)?.integrate(|p| u.value(p).powi(2)))
}
