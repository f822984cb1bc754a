//! Certified isolation of the critical point at the origin of two-variable members.

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{LabError, Result};
use crate::poly::polynomial::ExactPoly;
use crate::poly::solutions::HomogeneousSolution;
use crate::poly::univariate::{count_real_roots, UPoly};

/// `Q(t) = F(1 − t², 2t)` for a polynomial `F(x, y)`; for homogeneous `F` of
/// degree `e`, `Q(t) / (1 + t²)^e` is `F` on the unit circle in half-angle form.
pub fn half_angle_restriction(f: &ExactPoly) -> UPoly {
    let one = BigRational::from_integer(1.into());
    let x = UPoly::new(vec![one.clone(), BigRational::zero(), -one.clone()]);
    let y = UPoly::new(vec![BigRational::zero(), BigRational::from_integer(2.into())]);
    let mut acc = UPoly::new(Vec::new());
    for (e, c) in f.terms() {
        acc = acc.add(&x.pow(e[0]).mul(&y.pow(e[1])).scale(c));
    }
    acc
}

/// Number of distinct points of the unit circle where `∇P` vanishes.
pub fn critical_directions(p: &ExactPoly) -> usize {
    assert_eq!(p.nvars(), 2);
    let px = p.derivative(0);
    let py = p.derivative(1);
    let q1 = half_angle_restriction(&px);
    let q2 = half_angle_restriction(&py);
    let common = if q1.is_zero() {
        q2
    } else if q2.is_zero() {
        q1
    } else {
        q1.gcd(&q2)
    };
    let mut count = if common.is_zero() { usize::MAX } else { count_real_roots(&common) };
    // the point (−1, 0) corresponds to t = ∞
    let minus_one = BigRational::from_integer((-1).into());
    let zero = BigRational::zero();
    if px.eval_exact(&[minus_one.clone(), zero.clone()]).is_zero()
        && py.eval_exact(&[minus_one, zero]).is_zero()
        && count != usize::MAX
    {
        count += 1;
    }
    count
}

/// True iff the origin is an isolated zero of `∇P` for a two-variable member of degree ≥ 2.
pub fn isolated_critical_origin(p: &HomogeneousSolution) -> Result<bool> {
    if p.nvars != 2 {
        return Err(crate::error::invalid("P", "expects a two-variable polynomial"));
    }
    if p.degree < 2 {
        return Err(LabError::DegreeTooSmall(p.degree as usize));
    }
    Ok(critical_directions(&p.shape) == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::solutions::{even_model_poly, model_poly};

    #[test]
    fn family_members_are_isolated() {
        assert!(isolated_critical_origin(&even_model_poly(2, 0.3).unwrap()).unwrap());
        assert!(isolated_critical_origin(&even_model_poly(4, 0.0).unwrap()).unwrap());
        for &a in &[-0.5, 0.5] {
            assert!(isolated_critical_origin(&even_model_poly(6, a).unwrap()).unwrap());
        }
        assert!(isolated_critical_origin(&model_poly(1, 0.0).unwrap()).is_err());
    }

    #[test]
    fn degenerate_polynomials_are_detected() {
        // x² has a critical line {x = 0}, meeting the circle twice
        let x2 = ExactPoly::monomial(vec![2, 0], BigRational::from_integer(1.into()));
        assert_eq!(critical_directions(&x2), 2);
        // y² vanishes along {y = 0}; (−1, 0) is reached at t = ∞
        let y2 = ExactPoly::monomial(vec![0, 2], BigRational::from_integer(1.into()));
        assert_eq!(critical_directions(&y2), 2);
        // x y² vanishes to second order along {y = 0}: points (±1, 0)
        let xy2 = ExactPoly::monomial(vec![1, 2], BigRational::from_integer(1.into()));
        assert_eq!(critical_directions(&xy2), 2);
    }
}
