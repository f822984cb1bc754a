//! Tangent maps `T_{x,s} U(ξ) = (U(x + sξ) − U(x)) / ‖U − U(x)‖_{∂B_s}`.

use crate::error::{LabError, Result};
use crate::field::ScalarField;
use crate::frequency::functionals::boundary_point;
use crate::geometry::quadrature::sphere_rule;

/// Recentred, rescaled field with unit weighted norm on the unit sphere.
///
/// The norm is `(s^{−(n+a)} ∮_{∂B_s(x)} |y|^a (U − U(x))²)^{1/2}`, taken in the
/// flat coordinate measure.
pub struct TangentMap<'a, U: ScalarField + ?Sized> {
    inner: &'a U,
    pub center: Vec<f64>,
    pub scale: f64,
    pub offset: f64,
    pub norm: f64,
}

/// Builds the tangent map, or [`LabError::ConstantAtScale`] when `U` is
/// constant on the sphere of radius `s`.
pub fn tangent_map<'a, U: ScalarField + ?Sized>(
    u: &'a U,
    x: &[f64],
    s: f64,
    a: f64,
    order: usize,
) -> Result<TangentMap<'a, U>> {
    let center = boundary_point(u, x)?;
    u.check_ball(&center, s)?;
    let offset = u.value(&center);
    let rule = sphere_rule(u.dim(), a, &center, s, order)?;
    let scale = s.powf(-(u.dim() as f64 - 1.0 + a));
    let sub = scale * rule.integrate(|p| (u.value(p) - offset).powi(2));
    let raw = scale * rule.integrate(|p| u.value(p).powi(2));
    if !(sub > 1e-24 * raw.max(f64::MIN_POSITIVE)) {
        return Err(LabError::ConstantAtScale);
    }
    Ok(TangentMap { inner: u, center, scale: s, offset, norm: sub.sqrt() })
}

impl<U: ScalarField + ?Sized> TangentMap<'_, U> {
    fn map(&self, xi: &[f64]) -> Vec<f64> {
        self.center.iter().zip(xi).map(|(c, x)| c + self.scale * x).collect()
    }

    /// Values on a uniform lattice of the unit ball (`k` points per axis);
    /// returns `(ξ, T(ξ))` pairs for lattice points inside the ball.
    pub fn resample(&self, k: usize) -> Vec<(Vec<f64>, f64)> {
        let m = self.dim();
        let step = if k > 1 { 2.0 / (k - 1) as f64 } else { 0.0 };
        let mut out = Vec::new();
        let mut idx = vec![0usize; m];
        loop {
            let xi: Vec<f64> = idx.iter().map(|&i| -1.0 + i as f64 * step).collect();
            if xi.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
                let v = self.value(&xi);
                out.push((xi, v));
            }
            let mut d = 0;
            while d < m {
                idx[d] += 1;
                if idx[d] < k {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
            if d == m {
                return out;
            }
        }
    }
}

impl<U: ScalarField + ?Sized> ScalarField for TangentMap<'_, U> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, xi: &[f64]) -> f64 {
        (self.inner.value(&self.map(xi)) - self.offset) / self.norm
    }
    fn gradient(&self, xi: &[f64]) -> Vec<f64> {
        let k = self.scale / self.norm;
        self.inner.gradient(&self.map(xi)).into_iter().map(|g| k * g).collect()
    }
    fn value_and_gradient(&self, xi: &[f64]) -> (f64, Vec<f64>) {
        let (v, g) = self.inner.value_and_gradient(&self.map(xi));
        let k = self.scale / self.norm;
        ((v - self.offset) / self.norm, g.into_iter().map(|g| k * g).collect())
    }
    fn check_ball(&self, center: &[f64], r: f64) -> Result<()> {
        let c = self.map(&boundary_point(self, center)?);
        self.inner.check_ball(&c, r * self.scale)
    }
    fn resolution(&self) -> Option<f64> {
        self.inner.resolution().map(|h| h / self.scale)
    }
}
