//! Compressed sparse rows and a Jacobi-preconditioned conjugate gradient.
//!
//! Reductions are split into fixed-size chunks whose partial sums are added in
//! chunk order, so results do not depend on the number of threads.

use rayon::prelude::*;

use crate::error::{LabError, Result};

const CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub nrows: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from per-row `(column, value)` lists; duplicate columns are summed.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let nrows = rows.len();
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            let mut last: Option<usize> = None;
            for (c, v) in row {
                if last == Some(c) {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                    last = Some(c);
                }
            }
            row_ptr.push(cols.len());
        }
        CsrMatrix { nrows, row_ptr, cols, vals }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (self.cols[k], self.vals[k]))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|e| e.0 == j).map_or(0.0, |e| e.1)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.nrows).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        y.par_chunks_mut(CHUNK).enumerate().for_each(|(c, ys)| {
            let base = c * CHUNK;
            for (k, yi) in ys.iter_mut().enumerate() {
                let i = base + k;
                let mut s = 0.0;
                for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                    s += self.vals[p] * x[self.cols[p]];
                }
                *yi = s;
            }
        });
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.nrows).all(|i| self.row(i).all(|(j, v)| (self.get(j, i) - v).abs() <= tol * v.abs().max(1.0)))
    }
}

/// Deterministic parallel dot product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let partial: Vec<f64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum())
        .collect();
    partial.iter().sum()
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CgReport {
    pub iterations: usize,
    /// Final relative residual `‖b − Ax‖ / ‖b‖`.
    pub residual: f64,
    pub history: Vec<f64>,
}

/// Solves `A x = b` from `x0`; stops at relative residual `tol`.
pub fn pcg(a: &CsrMatrix, b: &[f64], x0: Vec<f64>, tol: f64, max_iter: usize) -> Result<(Vec<f64>, CgReport)> {
    let n = a.nrows;
    let diag = a.diagonal();
    if let Some(i) = diag.iter().position(|&d| d <= 0.0) {
        return Err(LabError::IndefiniteSystem(format!("nonpositive diagonal at row {i}")));
    }
    let inv: Vec<f64> = diag.iter().map(|d| 1.0 / d).collect();
    let mut x = x0;
    let mut ax = vec![0.0; n];
    a.matvec(&x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, ax)| b - ax).collect();
    let bnorm = dot(b, b).sqrt();
    let scale = if bnorm > 0.0 { bnorm } else { 1.0 };
    let mut history = vec![dot(&r, &r).sqrt() / scale];
    if history[0] <= tol || n == 0 {
        return Ok((x, CgReport { iterations: 0, residual: history[0], history }));
    }
    let mut z: Vec<f64> = r.iter().zip(&inv).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 1..=max_iter {
        a.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(LabError::IndefiniteSystem(format!("nonpositive curvature p·Ap = {pap:e} at iteration {it}")));
        }
        let alpha = rz / pap;
        x.par_iter_mut().zip(p.par_iter()).for_each(|(x, p)| *x += alpha * p);
        r.par_iter_mut().zip(ap.par_iter()).for_each(|(r, ap)| *r -= alpha * ap);
        let res = dot(&r, &r).sqrt() / scale;
        history.push(res);
        if res <= tol {
            return Ok((x, CgReport { iterations: it, residual: res, history }));
        }
        z.par_iter_mut().zip(r.par_iter().zip(inv.par_iter())).for_each(|(z, (r, d))| *z = r * d);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.par_iter_mut().zip(z.par_iter()).for_each(|(p, z)| *p = z + beta * *p);
    }
    let residual = *history.last().unwrap();
    Err(LabError::NoConvergence { iterations: max_iter, residual, history })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplace_1d(n: usize) -> CsrMatrix {
        CsrMatrix::from_rows(
            (0..n)
                .map(|i| {
                    let mut row = vec![(i, 2.0)];
                    if i > 0 {
                        row.push((i - 1, -1.0));
                    }
                    if i + 1 < n {
                        row.push((i + 1, -1.0));
                    }
                    row
                })
                .collect(),
        )
    }

    #[test]
    fn solves_tridiagonal() {
        let a = laplace_1d(50);
        let b = vec![1.0; 50];
        let (x, rep) = pcg(&a, &b, vec![0.0; 50], 1e-12, 500).unwrap();
        let mut ax = vec![0.0; 50];
        a.matvec(&x, &mut ax);
        assert!(ax.iter().zip(&b).all(|(p, q)| (p - q).abs() < 1e-9));
        assert!(rep.iterations <= 50);
        assert!(a.is_symmetric(0.0));
    }

    #[test]
    fn reports_non_convergence_and_indefiniteness() {
        let a = laplace_1d(100);
        let err = pcg(&a, &vec![1.0; 100], vec![0.0; 100], 1e-14, 3).unwrap_err();
        assert!(matches!(err, LabError::NoConvergence { iterations: 3, ref history, .. } if history.len() == 4));
        let neg = CsrMatrix::from_rows(vec![vec![(0, 1.0), (1, 2.0)], vec![(0, 2.0), (1, 1.0)]]);
        assert!(matches!(pcg(&neg, &[1.0, -1.0], vec![0.0; 2], 1e-12, 10), Err(LabError::IndefiniteSystem(_))));
    }

    #[test]
    fn dot_is_thread_independent() {
        let v: Vec<f64> = (0..100_000).map(|i| ((i as f64) * 0.37).sin()).collect();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| dot(&v, &v));
        let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(|| dot(&v, &v));
        assert_eq!(one.to_bits(), many.to_bits());
    }
}
