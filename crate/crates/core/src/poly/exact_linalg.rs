//! Exact row reduction over the rationals.

use num_rational::BigRational;
use num_traits::{One, Zero};

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(rows: &mut [Vec<BigRational>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = BigRational::one() / rows[r][col].clone();
        for v in rows[r].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for j in 0..ncols {
                    let t = rows[r][j].clone() * f.clone();
                    rows[i][j] = rows[i][j].clone() - t;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

/// Basis of `{v : A v = 0}`.
pub fn nullspace(mut rows: Vec<Vec<BigRational>>, ncols: usize) -> Vec<Vec<BigRational>> {
    let pivots = rref(&mut rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); ncols];
            v[f] = BigRational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -rows[r][f].clone();
            }
            v
        })
        .collect()
}

/// Orthonormalises float vectors (modified Gram–Schmidt), dropping dependent ones.
pub fn orthonormalize(vs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &out {
                let d: f64 = w.iter().zip(u).map(|(a, b)| a * b).sum();
                w.iter_mut().zip(u).for_each(|(a, b)| *a -= d * b);
            }
        }
        let norm = w.iter().map(|a| a * a).sum::<f64>().sqrt();
        let scale = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-10 * scale.max(1e-300) {
            out.push(w.iter().map(|a| a / norm).collect());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn nullspace_of_rank_one() {
        let ns = nullspace(vec![vec![q(1), q(2), q(3)]], 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!((v[0].clone() + q(2) * v[1].clone() + q(3) * v[2].clone()).is_zero());
        }
    }

    #[test]
    fn orthonormal_output() {
        let b = orthonormalize(&[vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0], vec![0.0, 1.0, 1.0]]);
        assert_eq!(b.len(), 2);
        let d: f64 = b[0].iter().zip(&b[1]).map(|(a, b)| a * b).sum();
        assert!(d.abs() < 1e-15);
    }
}
