//! Translation invariance of homogeneous polynomials and cone splitting.

use num_rational::BigRational;

use crate::poly::exact_linalg::{nullspace, orthonormalize};
use crate::poly::polynomial::{binomial, Exponent, ExactPoly, Poly};
use crate::poly::scalar::Coefficient;
use crate::poly::solutions::HomogeneousSolution;

/// `P(x + z)`.
pub fn translate<C: Coefficient>(p: &Poly<C>, z: &[C]) -> Poly<C> {
    let nv = p.nvars();
    let mut out = Poly::zero(nv);
    for (e, c) in p.terms() {
        let mut acc = Poly::constant(nv, c.clone());
        for i in 0..nv {
            if e[i] == 0 {
                continue;
            }
            // (x_i + z_i)^{e_i}
            let mut factor = Poly::zero(nv);
            for j in 0..=e[i] {
                let mut ex = vec![0; nv];
                ex[i] = j;
                let mut coef = C::from_int(binomial(e[i] as u64, j as u64) as i64);
                for _ in 0..(e[i] - j) {
                    coef = coef * z[i].clone();
                }
                factor.add_term(ex, coef);
            }
            acc = acc.mul(&factor);
        }
        out = out.add(&acc);
    }
    out
}

/// Orthonormal basis of `{v : ⟨∇P, v⟩ ≡ 0}`, the largest subspace along which
/// `P` is translation invariant.
pub fn maximal_invariant_subspace(p: &ExactPoly) -> Vec<Vec<f64>> {
    let nv = p.nvars();
    let grads = p.gradient();
    let mut monos: Vec<Exponent> = grads.iter().flat_map(|g| g.terms().map(|(e, _)| e.clone())).collect();
    monos.sort();
    monos.dedup();
    let rows: Vec<Vec<BigRational>> =
        monos.iter().map(|e| grads.iter().map(|g| g.coefficient(e)).collect()).collect();
    let ns = nullspace(rows, nv);
    let float: Vec<Vec<f64>> = ns.iter().map(|v| v.iter().map(Coefficient::to_f64).collect()).collect();
    orthonormalize(&float)
}

pub fn symmetry_rank(p: &ExactPoly) -> usize {
    maximal_invariant_subspace(p).len()
}

/// Outcome of the cone-splitting test at a point `z`.
#[derive(Debug, Clone, PartialEq)]
pub enum ConeSplit {
    /// `P` is homogeneous about `z`; `⟨∇P, z⟩ ≡ 0` holds and `span(V, z)` is invariant.
    Enlarged { subspace: Vec<Vec<f64>>, rank: usize },
    /// `z` already lies in `V`.
    AlreadyInSubspace,
    /// `P(· + z) − P` has this nonzero monomial.
    NotHomogeneousAt { witness: Exponent, coefficient: f64 },
    /// `P` is not invariant along the supplied `V`.
    NotInvariant { direction: usize },
}

/// Checks whether a homogeneous `P`, invariant along `V`, is also homogeneous
/// about `z`, and if so returns the enlarged invariant subspace.
pub fn cone_splitting_check(p: &HomogeneousSolution, v: &[Vec<f64>], z: &[f64]) -> ConeSplit {
    let basis = orthonormalize(v);
    let mut rest = z.to_vec();
    for b in &basis {
        let d: f64 = rest.iter().zip(b).map(|(x, y)| x * y).sum();
        rest.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
    }
    let zn = z.iter().map(|x| x * x).sum::<f64>().sqrt();
    if rest.iter().map(|x| x * x).sum::<f64>().sqrt() <= 1e-12 * zn.max(1e-300) {
        return ConeSplit::AlreadyInSubspace;
    }
    let scale = p.poly.max_abs_coefficient().max(1e-300);
    for (i, dir) in basis.iter().enumerate() {
        if p.poly.directional(dir).max_abs_coefficient() > 1e-10 * scale {
            return ConeSplit::NotInvariant { direction: i };
        }
    }
    let zc: Vec<BigRational> = z.iter().map(|&x| BigRational::from_f64(x)).collect();
    let diff = translate(&p.shape, &zc).sub(&p.shape);
    if let Some((witness, c)) = diff.leading_witness() {
        return ConeSplit::NotHomogeneousAt { witness, coefficient: c.to_f64() * p.normalization };
    }
    assert!(p.shape.directional(&zc).is_zero(), "translation invariance implies a vanishing derivative");
    let mut all = basis;
    all.push(z.to_vec());
    let subspace = orthonormalize(&all);
    ConeSplit::Enlarged { rank: subspace.len(), subspace }
}
