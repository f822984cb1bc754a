//! Terminating Gauss series `₂F₁(−N, b; c; z)`.

use crate::poly::scalar::Coefficient;

/// Rising factorial `(x)_j`.
pub fn pochhammer<C: Coefficient>(x: &C, j: usize) -> C {
    let mut p = C::one();
    for i in 0..j {
        p = p * (x.clone() + C::from_int(i as i64));
    }
    p
}

/// Coefficients `(−N)_j (b)_j / ((c)_j j!)` for `j = 0..=N`.
///
/// `c` must not be a nonpositive integer greater than `−N`.
pub fn terminating_series<C: Coefficient>(n_terms: usize, b: &C, c: &C) -> Vec<C> {
    let minus_n = C::from_int(-(n_terms as i64));
    let mut out = Vec::with_capacity(n_terms + 1);
    let mut coef = C::one();
    out.push(coef.clone());
    for j in 0..n_terms {
        let jc = C::from_int(j as i64);
        let num = (minus_n.clone() + jc.clone()) * (b.clone() + jc.clone());
        let den = (c.clone() + jc.clone()) * (jc + C::one());
        assert!(!den.is_zero(), "series denominator vanishes");
        coef = coef * num / den;
        out.push(coef.clone());
    }
    out
}

/// Evaluates the terminating series at `z`.
pub fn eval_terminating<C: Coefficient>(n_terms: usize, b: &C, c: &C, z: &C) -> C {
    let coeffs = terminating_series(n_terms, b, c);
    let mut acc = C::zero();
    for coef in coeffs.iter().rev() {
        acc = acc * z.clone() + coef.clone();
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn degree_one_series() {
        // ₂F₁(−1, −(1+a)/2; 1/2; z) = 1 + (1+a) z
        let a = q(1, 2);
        let b = -(q(1, 1) + a.clone()) / q(2, 1);
        let c = terminating_series(1, &b, &q(1, 2));
        assert_eq!(c, vec![q(1, 1), q(1, 1) + a]);
        // ₂F₁(−1, −1/2; 3/2; z) = 1 + z / 3
        let c = terminating_series(1, &q(-1, 2), &q(3, 2));
        assert_eq!(c, vec![q(1, 1), q(1, 3)]);
    }

    #[test]
    fn chu_vandermonde_at_one() {
        // ₂F₁(−N, b; c; 1) = (c − b)_N / (c)_N
        let (b, c) = (q(-3, 7), q(5, 4));
        for n in 0..8 {
            let lhs = eval_terminating(n, &b, &c, &q(1, 1));
            let rhs = pochhammer(&(c.clone() - b.clone()), n) / pochhammer(&c, n);
            assert_eq!(lhs, rhs);
        }
    }
}
