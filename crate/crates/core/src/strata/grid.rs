//! Fields sampled on uniform boxes, restrictions and coordinate slices.

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::field::ScalarField;

/// Nodes `lo + i h`, `i ∈ [0, counts)` per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxGrid {
    pub lo: Vec<f64>,
    pub h: f64,
    pub counts: Vec<usize>,
}

impl BoxGrid {
    /// The box `[lo, lo + (counts − 1) h]` covering `[lo, hi]`.
    pub fn new(lo: &[f64], hi: &[f64], h: f64) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(invalid("box", "corner dimensions differ or are empty"));
        }
        if !(h > 0.0) {
            return Err(invalid("h", "must be positive"));
        }
        let counts: Vec<usize> = lo
            .iter()
            .zip(hi)
            .map(|(l, u)| ((u - l) / h - 1e-9).ceil().max(1.0) as usize + 1)
            .collect();
        Ok(BoxGrid { lo: lo.to_vec(), h, counts })
    }

    /// `[-w, w]^dim` shifted by `offset · h` (an offset keeps nodes off
    /// coordinate hyperplanes).
    pub fn centered(dim: usize, half_width: f64, h: f64, offset: f64) -> Result<Self> {
        let lo = vec![-half_width + offset * h; dim];
        let hi = vec![half_width + offset * h; dim];
        Self::new(&lo, &hi, h)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn num_cells(&self) -> usize {
        self.counts.iter().map(|c| c - 1).product()
    }

    pub fn node_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.counts).rev().fold(0, |acc, (&i, &c)| acc * c + i)
    }

    pub fn node_multi(&self, mut flat: usize) -> Vec<usize> {
        self.counts
            .iter()
            .map(|&c| {
                let i = flat % c;
                flat /= c;
                i
            })
            .collect()
    }

    pub fn coords(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().zip(&self.lo).map(|(&i, l)| l + i as f64 * self.h).collect()
    }

    /// Lower-corner multi-index of cell `flat`.
    pub fn cell_multi(&self, mut flat: usize) -> Vec<usize> {
        self.counts
            .iter()
            .map(|&c| {
                let i = flat % (c - 1);
                flat /= c - 1;
                i
            })
            .collect()
    }

    pub fn cell_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.counts).rev().fold(0, |acc, (&i, &c)| acc * (c - 1) + i)
    }

    /// Node indices of the `2^d` corners of a cell, bit `i` of the corner
    /// number selecting the upper end along axis `i`.
    pub fn cell_corners(&self, cell: &[usize]) -> Vec<usize> {
        let d = self.dim();
        (0..1usize << d)
            .map(|b| {
                let idx: Vec<usize> = (0..d).map(|i| cell[i] + ((b >> i) & 1)).collect();
                self.node_index(&idx)
            })
            .collect()
    }

    pub fn cell_center(&self, cell: &[usize]) -> Vec<f64> {
        cell.iter().zip(&self.lo).map(|(&i, l)| l + (i as f64 + 0.5) * self.h).collect()
    }
}

/// Values and gradients of a field at the nodes of a box.
#[derive(Debug, Clone)]
pub struct GriddedField {
    pub grid: BoxGrid,
    pub values: Vec<f64>,
    /// Row-major `num_nodes × dim`.
    pub gradients: Vec<f64>,
}

impl GriddedField {
    pub fn sample(u: &(impl ScalarField + ?Sized), grid: BoxGrid) -> Result<Self> {
        if u.dim() != grid.dim() {
            return Err(invalid("grid", "dimension differs from the field"));
        }
        let d = grid.dim();
        let vg: Vec<(f64, Vec<f64>)> =
            (0..grid.num_nodes()).into_par_iter().map(|i| u.value_and_gradient(&grid.coords(&grid.node_multi(i)))).collect();
        let mut values = Vec::with_capacity(vg.len());
        let mut gradients = Vec::with_capacity(vg.len() * d);
        for (v, g) in vg {
            values.push(v);
            gradients.extend(g);
        }
        Ok(GriddedField { grid, values, gradients })
    }

    pub fn gradient(&self, node: usize) -> &[f64] {
        let d = self.grid.dim();
        &self.gradients[node * d..(node + 1) * d]
    }
}

/// `x ↦ U(x, 0)` on the boundary `R^n`.
pub struct BoundaryRestriction<'a, U: ScalarField + ?Sized>(pub &'a U);

impl<U: ScalarField + ?Sized> ScalarField for BoundaryRestriction<'_, U> {
    fn dim(&self) -> usize {
        self.0.dim() - 1
    }
    fn value(&self, p: &[f64]) -> f64 {
        let mut q = p.to_vec();
        q.push(0.0);
        self.0.value(&q)
    }
    fn gradient(&self, p: &[f64]) -> Vec<f64> {
        self.value_and_gradient(p).1
    }
    fn value_and_gradient(&self, p: &[f64]) -> (f64, Vec<f64>) {
        let mut q = p.to_vec();
        q.push(0.0);
        let (v, mut g) = self.0.value_and_gradient(&q);
        g.pop();
        (v, g)
    }
}

/// Restriction to the affine 2-plane `base + s e_i + t e_j`.
pub struct PlaneSlice<'a, U: ScalarField + ?Sized> {
    pub field: &'a U,
    pub base: Vec<f64>,
    pub axes: (usize, usize),
}

impl<U: ScalarField + ?Sized> PlaneSlice<'_, U> {
    fn lift(&self, p: &[f64]) -> Vec<f64> {
        let mut q = self.base.clone();
        q[self.axes.0] += p[0];
        q[self.axes.1] += p[1];
        q
    }
}

impl<U: ScalarField + ?Sized> ScalarField for PlaneSlice<'_, U> {
    fn dim(&self) -> usize {
        2
    }
    fn value(&self, p: &[f64]) -> f64 {
        self.field.value(&self.lift(p))
    }
    fn gradient(&self, p: &[f64]) -> Vec<f64> {
        self.value_and_gradient(p).1
    }
    fn value_and_gradient(&self, p: &[f64]) -> (f64, Vec<f64>) {
        let (v, g) = self.field.value_and_gradient(&self.lift(p));
        (v, vec![g[self.axes.0], g[self.axes.1]])
    }
}
