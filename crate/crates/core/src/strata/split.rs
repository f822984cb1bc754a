//! Split of boundary singular points by whether the tangent polynomial is harmonic.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::field::ScalarField;
use crate::geometry::quadrature::{ball_rule, unit_sphere_rule};
use crate::poly::polynomial::monomials_of_degree;
use crate::poly::FloatPoly;

#[derive(Debug, Clone, PartialEq)]
pub struct SplitOptions {
    /// Blow-up scale of the tangent fit.
    pub scale: f64,
    pub d_max: usize,
    /// Threshold on `‖ΔP‖/‖P‖`.
    pub tau_harm: f64,
    /// Fits with relative residual above this are left unclassified.
    pub max_residual: f64,
    pub order: usize,
}

impl Default for SplitOptions {
    fn default() -> Self {
        SplitOptions { scale: 0.05, d_max: 4, tau_harm: 1e-3, max_residual: 0.1, order: 16 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitClass {
    /// Harmonic tangent polynomial.
    Horizontal,
    /// Non-harmonic tangent polynomial.
    Nonlocal,
    /// Degree ambiguous, fit poor or field constant; never assigned.
    Unclassified,
}

#[derive(Debug, Clone)]
pub struct SplitSample {
    pub point: Vec<f64>,
    pub degree: Option<usize>,
    /// Relative least-squares residual per degree `1..=d_max`.
    pub residuals: Vec<f64>,
    pub polynomial: Option<FloatPoly>,
    /// `‖ΔP‖/‖P‖` on the unit sphere; `NaN` when unclassified.
    pub ratio: f64,
    pub class: SplitClass,
}

#[derive(Debug, Clone)]
pub struct BoundarySplit {
    pub samples: Vec<SplitSample>,
}

impl BoundarySplit {
    pub fn points(&self, class: SplitClass) -> Vec<Vec<f64>> {
        self.samples.iter().filter(|s| s.class == class).map(|s| s.point.clone()).collect()
    }

    pub fn count(&self, class: SplitClass) -> usize {
        self.samples.iter().filter(|s| s.class == class).count()
    }
}

/// Fits `f(x + sξ) − f(x)` on the unit ball by homogeneous polynomials of each
/// degree `1..=d_max`, keeps the best degree unless another fits within a
/// factor two, and compares `‖ΔP‖` with `‖P‖` on the unit sphere.
pub fn boundary_split(f: &(impl ScalarField + ?Sized), samples: &[Vec<f64>], opts: &SplitOptions) -> Result<BoundarySplit> {
    let n = f.dim();
    if opts.d_max == 0 || !(opts.scale > 0.0) {
        return Err(invalid("split", "need d_max >= 1 and a positive scale"));
    }
    if samples.iter().any(|p| p.len() != n) {
        return Err(invalid("samples", "dimension differs from the field"));
    }
    let rule = ball_rule(n, 0.0, &vec![0.0; n], 1.0, opts.order.max(2 * opts.d_max))?;
    let (sphere, sw) = unit_sphere_rule(n, 0.0, 2 * opts.d_max);
    let samples = samples.par_iter().map(|x| classify(f, x, &rule.unit_points, &rule.weights, &sphere, &sw, opts)).collect();
    Ok(BoundarySplit { samples })
}

fn sphere_norm(p: &FloatPoly, nodes: &[Vec<f64>], w: &[f64]) -> f64 {
    nodes.iter().zip(w).map(|(x, w)| w * p.eval(x).powi(2)).sum::<f64>().sqrt()
}

fn classify(
    f: &(impl ScalarField + ?Sized),
    x: &[f64],
    nodes: &[Vec<f64>],
    weights: &[f64],
    sphere: &[Vec<f64>],
    sw: &[f64],
    opts: &SplitOptions,
) -> SplitSample {
    let n = x.len();
    let f0 = f.value(x);
    let sq: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let t: Vec<f64> = nodes
        .iter()
        .zip(&sq)
        .map(|(xi, s)| {
            let p: Vec<f64> = x.iter().zip(xi).map(|(a, b)| a + opts.scale * b).collect();
            s * (f.value(&p) - f0)
        })
        .collect();
    let norm2: f64 = t.iter().map(|v| v * v).sum();
    let unclassified = |residuals: Vec<f64>| SplitSample {
        point: x.to_vec(),
        degree: None,
        residuals,
        polynomial: None,
        ratio: f64::NAN,
        class: SplitClass::Unclassified,
    };
    if !(norm2 > 0.0) {
        return unclassified(Vec::new());
    }
    let rhs = DVector::from_vec(t);
    let mut fits = Vec::new();
    for d in 1..=opts.d_max {
        let mons = monomials_of_degree(n, d as u32);
        let a = DMatrix::from_fn(nodes.len(), mons.len(), |i, j| {
            sq[i] * mons[j].iter().zip(&nodes[i]).map(|(&e, v)| v.powi(e as i32)).product::<f64>()
        });
        let c = a.clone().svd(true, true).solve(&rhs, 1e-13).expect("SVD with both factors");
        let res = (&a * &c - &rhs).norm_squared() / norm2;
        let poly = FloatPoly::from_terms(n, mons.into_iter().zip(c.iter().copied()));
        fits.push((res, poly));
    }
    let residuals: Vec<f64> = fits.iter().map(|(r, _)| *r).collect();
    let mut order: Vec<usize> = (0..fits.len()).collect();
    order.sort_by(|&a, &b| residuals[a].total_cmp(&residuals[b]));
    let best = order[0];
    let ambiguous = order.len() > 1 && residuals[order[1]] <= 2.0 * residuals[best] + 1e-12;
    if ambiguous || residuals[best] > opts.max_residual {
        return unclassified(residuals);
    }
    let p = fits.swap_remove(best).1;
    let ratio = sphere_norm(&p.laplacian(), sphere, sw) / sphere_norm(&p, sphere, sw);
    let class = if ratio < opts.tau_harm { SplitClass::Horizontal } else { SplitClass::Nonlocal };
    SplitSample { point: x.to_vec(), degree: Some(best + 1), residuals, polynomial: Some(p), ratio, class }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FnField;

    #[test]
    fn harmonic_and_nonharmonic_quadratics() {
        let saddle = FnField { dim: 2, f: |p: &[f64]| p[0] * p[0] - p[1] * p[1], grad: |p: &[f64]| vec![2.0 * p[0], -2.0 * p[1]] };
        let s = boundary_split(&saddle, &[vec![0.0, 0.0]], &SplitOptions::default()).unwrap();
        assert_eq!(s.samples[0].class, SplitClass::Horizontal);
        assert_eq!(s.samples[0].degree, Some(2));
        assert!(s.samples[0].ratio < 1e-10);
        let sheet = FnField { dim: 2, f: |p: &[f64]| p[0] * p[0], grad: |p: &[f64]| vec![2.0 * p[0], 0.0] };
        let s = boundary_split(&sheet, &[vec![0.0, 0.3]], &SplitOptions::default()).unwrap();
        assert_eq!(s.samples[0].class, SplitClass::Nonlocal);
        // ΔP = 2 against ‖ξ₁²‖ = √(3π/4) on the circle
        assert!((s.samples[0].ratio - (32.0f64 / 3.0).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn constant_field_is_unclassified() {
        let c = FnField { dim: 1, f: |_: &[f64]| 1.0, grad: |_: &[f64]| vec![0.0] };
        let s = boundary_split(&c, &[vec![0.0]], &SplitOptions::default()).unwrap();
        assert_eq!(s.samples[0].class, SplitClass::Unclassified);
    }
}
