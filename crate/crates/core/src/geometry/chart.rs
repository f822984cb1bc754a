//! Single-chart metrics `g_ij(x, y)` with a defining function for the boundary.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{invalid, LabError, Result};

pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
/// Returns the metric at a point as an `m × m` row-major array.
pub type MetricFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
enum Metric {
    Flat,
    Conformal(ScalarFn),
    General(MetricFn),
}

/// A metric chart on a box around the boundary `{y = 0}`.
#[derive(Clone)]
pub struct MetricChart {
    m: usize,
    metric: Metric,
    curvature: Option<ScalarFn>,
    defining: Option<ScalarFn>,
    bounds: (f64, f64),
    fd_step: f64,
}

impl fmt::Debug for MetricChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.metric {
            Metric::Flat => "flat",
            Metric::Conformal(_) => "conformal",
            Metric::General(_) => "general",
        };
        f.debug_struct("MetricChart")
            .field("m", &self.m)
            .field("metric", &kind)
            .field("analytic_curvature", &self.curvature.is_some())
            .field("bounds", &self.bounds)
            .finish()
    }
}

/// Finite-difference step for curvature: `sqrt(h)` clipped to `[1e-3, 1e-1]`.
pub fn curvature_step(h: f64) -> f64 {
    h.sqrt().clamp(1e-3, 1e-1)
}

impl MetricChart {
    pub fn flat(m: usize) -> Self {
        MetricChart {
            m,
            metric: Metric::Flat,
            curvature: Some(Arc::new(|_: &[f64]| 0.0)),
            defining: None,
            bounds: (1.0, 1.0),
            fd_step: 0.05,
        }
    }

    /// `g = e^{2φ} δ`. Curvature is computed by finite differences unless
    /// supplied with [`MetricChart::with_curvature`].
    pub fn conformal(m: usize, phi: ScalarFn) -> Self {
        MetricChart {
            m,
            metric: Metric::Conformal(phi),
            curvature: None,
            defining: None,
            bounds: (0.0, f64::INFINITY),
            fd_step: 0.05,
        }
    }

    pub fn general(m: usize, g: MetricFn) -> Self {
        MetricChart {
            m,
            metric: Metric::General(g),
            curvature: None,
            defining: None,
            bounds: (0.0, f64::INFINITY),
            fd_step: 0.05,
        }
    }

    pub fn with_curvature(mut self, r: ScalarFn) -> Self {
        self.curvature = Some(r);
        self
    }

    pub fn with_defining_function(mut self, rho: ScalarFn) -> Self {
        self.defining = Some(rho);
        self
    }

    /// Declared ellipticity bounds `[λ, Λ]` for the metric eigenvalues.
    pub fn with_bounds(mut self, lambda: f64, big_lambda: f64) -> Self {
        self.bounds = (lambda, big_lambda);
        self
    }

    pub fn with_fd_step(mut self, step: f64) -> Self {
        self.fd_step = step;
        self
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn is_flat(&self) -> bool {
        matches!(self.metric, Metric::Flat)
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    /// Metric matrix at a point.
    pub fn metric(&self, p: &[f64]) -> DMatrix<f64> {
        match &self.metric {
            Metric::Flat => DMatrix::identity(self.m, self.m),
            Metric::Conformal(phi) => DMatrix::identity(self.m, self.m) * (2.0 * phi(p)).exp(),
            Metric::General(g) => DMatrix::from_row_slice(self.m, self.m, &g(p)),
        }
    }

    /// Diagonal of the metric when it is diagonal, `None` otherwise.
    pub fn diagonal_metric(&self, p: &[f64]) -> Option<Vec<f64>> {
        match &self.metric {
            Metric::Flat => Some(vec![1.0; self.m]),
            Metric::Conformal(phi) => Some(vec![(2.0 * phi(p)).exp(); self.m]),
            Metric::General(_) => {
                let g = self.metric(p);
                let scale = g.amax();
                for i in 0..self.m {
                    for j in 0..self.m {
                        if i != j && g[(i, j)].abs() > 1e-12 * scale {
                            return None;
                        }
                    }
                }
                Some((0..self.m).map(|i| g[(i, i)]).collect())
            }
        }
    }

    pub fn defining_function(&self, p: &[f64]) -> f64 {
        match &self.defining {
            Some(rho) => rho(p),
            None => p[self.m - 1].abs(),
        }
    }

    /// `(ϱ / |y|)^a`, the factor converting `|y|^a` into `ϱ^a`.
    pub fn weight_correction(&self, p: &[f64], a: f64) -> f64 {
        let y = p[self.m - 1].abs();
        match &self.defining {
            None => 1.0,
            Some(_) if y == 0.0 || a == 0.0 => 1.0,
            Some(rho) => (rho(p) / y).powf(a),
        }
    }

    pub fn sqrt_det(&self, p: &[f64]) -> f64 {
        match &self.metric {
            Metric::Flat => 1.0,
            Metric::Conformal(phi) => (self.m as f64 * phi(p)).exp(),
            Metric::General(_) => self.metric(p).determinant().sqrt(),
        }
    }

    /// `|v|²_g = g^{ij} v_i v_j` for a covector `v`.
    pub fn co_norm_sq(&self, p: &[f64], v: &[f64]) -> f64 {
        match &self.metric {
            Metric::Flat => v.iter().map(|x| x * x).sum(),
            Metric::Conformal(phi) => (-2.0 * phi(p)).exp() * v.iter().map(|x| x * x).sum::<f64>(),
            Metric::General(_) => {
                let g = self.metric(p);
                let gi = g.try_inverse().expect("metric must be invertible");
                let mut s = 0.0;
                for i in 0..self.m {
                    for j in 0..self.m {
                        s += gi[(i, j)] * v[i] * v[j];
                    }
                }
                s
            }
        }
    }

    /// Ratio of the metric surface element to the Euclidean one on a
    /// hypersurface with Euclidean unit normal `normal`.
    pub fn surface_factor(&self, p: &[f64], normal: &[f64]) -> f64 {
        if self.is_flat() {
            return 1.0;
        }
        self.sqrt_det(p) * self.co_norm_sq(p, normal).sqrt()
    }

    /// Checks symmetry, the declared eigenvalue bounds and the defining
    /// function on a regular sample of the box `[-L, L]^n × [-Y, Y]`.
    pub fn validate(&self, half_width: f64, y_extent: f64, samples_per_axis: usize) -> Result<()> {
        let m = self.m;
        let k = samples_per_axis.max(2);
        let total = k.pow(m as u32);
        for idx in 0..total {
            let mut p = vec![0.0; m];
            let mut rest = idx;
            for (d, pd) in p.iter_mut().enumerate() {
                let t = (rest % k) as f64 / (k - 1) as f64;
                rest /= k;
                let ext = if d + 1 == m { y_extent } else { half_width };
                *pd = -ext + 2.0 * ext * t;
            }
            let g = self.metric(&p);
            for i in 0..m {
                for j in 0..i {
                    if (g[(i, j)] - g[(j, i)]).abs() > 1e-12 * g.amax() {
                        return Err(LabError::NotPositiveDefinite { point: p });
                    }
                }
            }
            let eig = SymmetricEigen::new(g).eigenvalues;
            let (lo, hi) = (eig.min(), eig.max());
            if lo <= 0.0 {
                return Err(LabError::NotPositiveDefinite { point: p });
            }
            if lo < self.bounds.0 - 1e-12 || hi > self.bounds.1 + 1e-12 {
                return Err(invalid(
                    "chart",
                    format!("metric eigenvalues [{lo}, {hi}] leave the declared bounds at {p:?}"),
                ));
            }
            let rho = self.defining_function(&p);
            let y = p[m - 1];
            if y != 0.0 && rho <= 0.0 {
                return Err(invalid("chart", format!("defining function not positive at {p:?}")));
            }
        }
        // |∇ϱ| = 1 on the boundary, measured in the chart metric
        for idx in 0..k.pow((m - 1) as u32) {
            let mut p = vec![0.0; m];
            let mut rest = idx;
            for pd in p.iter_mut().take(m - 1) {
                *pd = -half_width + 2.0 * half_width * (rest % k) as f64 / (k - 1) as f64;
                rest /= k;
            }
            if self.defining_function(&p).abs() > 1e-10 {
                return Err(invalid("chart", format!("defining function nonzero on boundary at {p:?}")));
            }
            let step = 1e-6;
            let mut up = p.clone();
            up[m - 1] = step;
            let mut grad = vec![0.0; m];
            grad[m - 1] = self.defining_function(&up) / step;
            for d in 0..m - 1 {
                let (mut a, mut b) = (up.clone(), up.clone());
                a[d] += step;
                b[d] -= step;
                grad[d] = (self.defining_function(&a) - self.defining_function(&b)) / (2.0 * step);
            }
            let norm = self.co_norm_sq(&p, &grad).sqrt();
            if (norm - 1.0).abs() > 1e-4 {
                return Err(invalid("chart", format!("|∇ϱ| = {norm} on the boundary at {p:?}")));
            }
        }
        Ok(())
    }
}

fn d1(f: &dyn Fn(f64) -> f64, h: f64) -> f64 {
    (-f(2.0 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2.0 * h)) / (12.0 * h)
}

fn shifted(p: &[f64], dir: usize, t: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    q[dir] += t;
    q
}

/// Christoffel symbols `Γ^k_{ij}` at `p`, flattened as `k * m² + i * m + j`.
fn christoffel(chart: &MetricChart, p: &[f64], h: f64) -> Result<Vec<f64>> {
    let m = chart.m;
    let g = chart.metric(p);
    let gi = g.clone().try_inverse().ok_or_else(|| LabError::NotPositiveDefinite { point: p.to_vec() })?;
    // dg[l][i][j] = ∂_l g_ij
    let mut dg = vec![0.0; m * m * m];
    for l in 0..m {
        let mats: Vec<DMatrix<f64>> =
            [-2.0, -1.0, 1.0, 2.0].iter().map(|&s| chart.metric(&shifted(p, l, s * h))).collect();
        for i in 0..m {
            for j in 0..m {
                dg[(l * m + i) * m + j] = (-mats[3][(i, j)] + 8.0 * mats[2][(i, j)]
                    - 8.0 * mats[1][(i, j)]
                    + mats[0][(i, j)])
                    / (12.0 * h);
            }
        }
    }
    let mut gamma = vec![0.0; m * m * m];
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                let mut s = 0.0;
                for l in 0..m {
                    s += gi[(k, l)]
                        * (dg[(i * m + j) * m + l] + dg[(j * m + i) * m + l] - dg[(l * m + i) * m + j]);
                }
                gamma[(k * m + i) * m + j] = 0.5 * s;
            }
        }
    }
    Ok(gamma)
}

/// Scalar curvature at `p`: the analytic callable when present, the conformal
/// change formula for conformal charts, otherwise nested fourth-order
/// differences of the metric with the chart's step.
pub fn metric_scalar_curvature(chart: &MetricChart, p: &[f64]) -> Result<f64> {
    if p.len() != chart.m {
        return Err(invalid("point", format!("expected {} coordinates", chart.m)));
    }
    if let Some(r) = &chart.curvature {
        return Ok(r(p));
    }
    match &chart.metric {
        Metric::Flat => return Ok(0.0),
        Metric::Conformal(phi) => return Ok(conformal_curvature(chart.m, phi.as_ref(), p, chart.fd_step)),
        Metric::General(_) => {}
    }
    let m = chart.m;
    let h = chart.fd_step;
    let g = chart.metric(p);
    if SymmetricEigen::new(g.clone()).eigenvalues.min() <= 0.0 {
        return Err(LabError::NotPositiveDefinite { point: p.to_vec() });
    }
    let gi = g.try_inverse().ok_or_else(|| LabError::NotPositiveDefinite { point: p.to_vec() })?;
    let gam = christoffel(chart, p, h)?;
    let at = |k: usize, i: usize, j: usize| gam[(k * m + i) * m + j];
    // dgam[l][k][i][j] = ∂_l Γ^k_ij
    let mut dgam = vec![0.0; m * m * m * m];
    for l in 0..m {
        let shifted_gammas: Vec<Vec<f64>> = [-2.0, -1.0, 1.0, 2.0]
            .iter()
            .map(|&s| christoffel(chart, &shifted(p, l, s * h), h))
            .collect::<Result<_>>()?;
        for c in 0..m * m * m {
            let v = [shifted_gammas[0][c], shifted_gammas[1][c], shifted_gammas[2][c], shifted_gammas[3][c]];
            dgam[l * m * m * m + c] = (-v[3] + 8.0 * v[2] - 8.0 * v[1] + v[0]) / (12.0 * h);
        }
    }
    let d = |l: usize, k: usize, i: usize, j: usize| dgam[((l * m + k) * m + i) * m + j];
    let mut r = 0.0;
    for i in 0..m {
        for j in 0..m {
            let mut ric = 0.0;
            for k in 0..m {
                ric += d(k, k, i, j) - d(j, k, i, k);
                for l in 0..m {
                    ric += at(k, k, l) * at(l, i, j) - at(k, j, l) * at(l, i, k);
                }
            }
            r += gi[(i, j)] * ric;
        }
    }
    Ok(r)
}

/// Curvature of `e^{2φ} δ` from `φ` alone (conformal change formula),
/// with derivatives of `φ` by fourth-order differences.
pub fn conformal_curvature(m: usize, phi: &dyn Fn(&[f64]) -> f64, p: &[f64], h: f64) -> f64 {
    let mut lap = 0.0;
    let mut grad_sq = 0.0;
    for d in 0..m {
        let f = |t: f64| phi(&shifted(p, d, t));
        grad_sq += d1(&f, h).powi(2);
        lap += (-f(2.0 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2.0 * h)) / (12.0 * h * h);
    }
    let mf = m as f64;
    -(-2.0 * phi(p)).exp() * (2.0 * (mf - 1.0) * lap + (mf - 2.0) * (mf - 1.0) * grad_sq)
}
