//! Scalar fields on `R^m` with gradients.

use crate::error::Result;
use crate::poly::polynomial::FloatPoly;
use crate::poly::solutions::HomogeneousSolution;

pub trait ScalarField: Sync {
    fn dim(&self) -> usize;

    fn value(&self, p: &[f64]) -> f64;

    fn gradient(&self, p: &[f64]) -> Vec<f64>;

    fn value_and_gradient(&self, p: &[f64]) -> (f64, Vec<f64>) {
        (self.value(p), self.gradient(p))
    }

    /// Fails when the ball cannot be evaluated (e.g. it leaves a grid).
    fn check_ball(&self, _center: &[f64], _r: f64) -> Result<()> {
        Ok(())
    }

    /// Grid spacing of sampled fields, `None` for analytic ones.
    fn resolution(&self) -> Option<f64> {
        None
    }
}

impl ScalarField for FloatPoly {
    fn dim(&self) -> usize {
        self.nvars()
    }
    fn value(&self, p: &[f64]) -> f64 {
        self.eval(p)
    }
    fn gradient(&self, p: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.nvars()];
        self.eval_with_gradient(p, &mut g);
        g
    }
    fn value_and_gradient(&self, p: &[f64]) -> (f64, Vec<f64>) {
        let mut g = vec![0.0; self.nvars()];
        let v = self.eval_with_gradient(p, &mut g);
        (v, g)
    }
}

impl ScalarField for HomogeneousSolution {
    fn dim(&self) -> usize {
        self.nvars
    }
    fn value(&self, p: &[f64]) -> f64 {
        self.poly.eval(p)
    }
    fn gradient(&self, p: &[f64]) -> Vec<f64> {
        ScalarField::gradient(&self.poly, p)
    }
    fn value_and_gradient(&self, p: &[f64]) -> (f64, Vec<f64>) {
        ScalarField::value_and_gradient(&self.poly, p)
    }
}

/// A field given by closures for the value and the gradient.
pub struct FnField<F, G> {
    pub dim: usize,
    pub f: F,
    pub grad: G,
}

impl<F, G> ScalarField for FnField<F, G>
where
    F: Fn(&[f64]) -> f64 + Sync,
    G: Fn(&[f64]) -> Vec<f64> + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, p: &[f64]) -> f64 {
        (self.f)(p)
    }
    fn gradient(&self, p: &[f64]) -> Vec<f64> {
        (self.grad)(p)
    }
}

/// `U(x_+ + t ξ)`: the field seen at scale `t` around a boundary point.
pub struct Rescaled<'a, U: ScalarField + ?Sized> {
    pub inner: &'a U,
    pub center: Vec<f64>,
    pub scale: f64,
}

impl<U: ScalarField + ?Sized> Rescaled<'_, U> {
    fn map(&self, p: &[f64]) -> Vec<f64> {
        p.iter().enumerate().map(|(i, &x)| self.center.get(i).copied().unwrap_or(0.0) + self.scale * x).collect()
    }
}

impl<U: ScalarField + ?Sized> ScalarField for Rescaled<'_, U> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, p: &[f64]) -> f64 {
        self.inner.value(&self.map(p))
    }
    fn gradient(&self, p: &[f64]) -> Vec<f64> {
        self.inner.gradient(&self.map(p)).into_iter().map(|g| g * self.scale).collect()
    }
    fn check_ball(&self, center: &[f64], r: f64) -> Result<()> {
        let c = self.map(center);
        self.inner.check_ball(&c[..c.len().min(self.dim())], r * self.scale)
    }
    fn resolution(&self) -> Option<f64> {
        self.inner.resolution().map(|h| h / self.scale)
    }
}
