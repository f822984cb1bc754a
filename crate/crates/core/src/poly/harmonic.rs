//! Homogeneous harmonic polynomials on the boundary `R^n`.

use nalgebra::DMatrix;
use num_rational::BigRational;

use crate::geometry::quadrature::unit_sphere_rule;
use crate::poly::exact_linalg::nullspace;
use crate::poly::polynomial::{monomials_of_degree, ExactPoly, FloatPoly};
use crate::poly::scalar::Coefficient;
use crate::poly::solutions::{Family, HomogeneousSolution};

/// Exact basis of the kernel of `Δ` on homogeneous polynomials of degree `d`.
pub fn harmonic_kernel(n: usize, d: u32) -> Vec<ExactPoly> {
    let monos = monomials_of_degree(n, d);
    let lower = if d >= 2 { monomials_of_degree(n, d - 2) } else { Vec::new() };
    let images: Vec<ExactPoly> =
        monos.iter().map(|e| ExactPoly::monomial(e.clone(), BigRational::from_int(1)).laplacian()).collect();
    let rows: Vec<Vec<BigRational>> =
        lower.iter().map(|e| images.iter().map(|p| p.coefficient(e)).collect()).collect();
    let ns = if rows.is_empty() {
        (0..monos.len())
            .map(|i| (0..monos.len()).map(|j| BigRational::from_int(i64::from(i == j))).collect())
            .collect()
    } else {
        nullspace(rows, monos.len())
    };
    ns.into_iter()
        .map(|v| ExactPoly::from_terms(n, monos.iter().cloned().zip(v)))
        .collect()
}

/// Dimension `binom(n+d−1, d) − binom(n+d−3, d−2)` of the harmonic space.
pub fn harmonic_dimension(n: usize, d: u32) -> usize {
    use crate::poly::polynomial::binomial;
    let n = n as u64;
    let d = d as u64;
    let all = binomial(n + d - 1, d);
    let lower = if d >= 2 { binomial(n + d - 3, d - 2) } else { 0 };
    (all - lower) as usize
}

/// Basis of degree-`d` harmonic polynomials on `R^n`, orthonormal in `L²(S^{n−1})`.
pub fn harmonic_boundary_basis(n: usize, d: u32) -> Vec<HomogeneousSolution> {
    let kernel: Vec<FloatPoly> = harmonic_kernel(n, d).iter().map(|p| p.to_float()).collect();
    let k = kernel.len();
    if k == 0 {
        return Vec::new();
    }
    let (nodes, w) = unit_sphere_rule(n, 0.0, 2 * d as usize + 2);
    let vals: Vec<Vec<f64>> = kernel.iter().map(|p| nodes.iter().map(|x| p.eval(x)).collect()).collect();
    let gram = DMatrix::from_fn(k, k, |i, j| (0..w.len()).map(|q| w[q] * vals[i][q] * vals[j][q]).sum());
    let chol = gram.cholesky().expect("Gram matrix of a basis is positive definite");
    let linv = chol.l().try_inverse().expect("triangular factor invertible");
    (0..k)
        .map(|i| {
            let mut q = FloatPoly::zero(n);
            for j in 0..=i {
                q = q.add(&kernel[j].scale(&linv[(i, j)]));
            }
            let q = q.pruned(1e-15);
            HomogeneousSolution {
                nvars: n,
                degree: d,
                weight: None,
                shape: ExactPoly::from_float(&q),
                poly: q,
                normalization: 1.0,
                symmetry_rank: 0,
                invariant_subspace: Vec::new(),
                family: Family::BoundaryHarmonic,
            }
        })
        .map(|mut s| {
            let sub = crate::poly::cone::maximal_invariant_subspace(&s.shape);
            s.symmetry_rank = sub.len();
            s.invariant_subspace = sub;
            s
        })
        .collect()
}

/// Gram matrix of a list of polynomials in `L²(S^{n−1})`.
pub fn sphere_gram(basis: &[HomogeneousSolution]) -> DMatrix<f64> {
    let k = basis.len();
    if k == 0 {
        return DMatrix::zeros(0, 0);
    }
    let n = basis[0].nvars;
    let deg = basis.iter().map(|b| b.degree).max().unwrap_or(0);
    let (nodes, w) = unit_sphere_rule(n, 0.0, 2 * deg as usize + 2);
    DMatrix::from_fn(k, k, |i, j| {
        nodes.iter().zip(&w).map(|(x, wq)| wq * basis[i].eval(x) * basis[j].eval(x)).sum()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        assert_eq!(harmonic_boundary_basis(2, 2).len(), 2);
        assert_eq!(harmonic_boundary_basis(3, 2).len(), 5);
        assert_eq!(harmonic_boundary_basis(1, 2).len(), 0);
        for n in 1..5 {
            for d in 0..6 {
                assert_eq!(harmonic_kernel(n, d).len(), harmonic_dimension(n, d), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn orthonormal_and_harmonic() {
        for (n, d) in [(2, 2), (3, 2), (3, 4), (4, 3)] {
            let basis = harmonic_boundary_basis(n, d);
            let g = sphere_gram(&basis);
            let err = (g - DMatrix::identity(basis.len(), basis.len())).amax();
            assert!(err < 1e-10, "n={n} d={d} err={err}");
            for b in &basis {
                assert!(b.poly.laplacian().max_abs_coefficient() < 1e-12);
            }
        }
    }

    #[test]
    fn plane_quadratics() {
        let basis = harmonic_boundary_basis(2, 2);
        // span{x₁² − x₂², x₁x₂}: no x₁² + x₂² component
        for b in &basis {
            assert!((b.poly.coefficient(&[2, 0]) + b.poly.coefficient(&[0, 2])).abs() < 1e-12);
        }
    }
}
