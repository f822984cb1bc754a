//! Dense univariate polynomials over the rationals, Euclid and Sturm chains.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Coefficients from the constant term upward; no trailing zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct UPoly(pub Vec<BigRational>);

impl UPoly {
    pub fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        UPoly(c)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&BigRational> {
        self.0.last()
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * BigRational::from_integer((i as i64).into()))
                .collect(),
        )
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let n = self.0.len().max(o.0.len());
        UPoly::new(
            (0..n)
                .map(|i| {
                    self.0.get(i).cloned().unwrap_or_else(BigRational::zero)
                        + o.0.get(i).cloned().unwrap_or_else(BigRational::zero)
                })
                .collect(),
        )
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly(Vec::new());
        }
        let mut c = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] = c[i + j].clone() + a.clone() * b.clone();
            }
        }
        UPoly::new(c)
    }

    pub fn pow(&self, k: u32) -> UPoly {
        let mut p = UPoly::new(vec![BigRational::from_integer(1.into())]);
        for _ in 0..k {
            p = p.mul(self);
        }
        p
    }

    pub fn scale(&self, s: &BigRational) -> UPoly {
        UPoly::new(self.0.iter().map(|c| c.clone() * s.clone()).collect())
    }

    /// Remainder of Euclidean division.
    pub fn rem(&self, d: &UPoly) -> UPoly {
        assert!(!d.is_zero());
        let dd = d.degree().unwrap();
        let mut r = self.0.clone();
        let lead = d.lead().unwrap().clone();
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let f = r.last().unwrap().clone() / lead.clone();
            for (i, c) in d.0.iter().enumerate() {
                r[k + i] = r[k + i].clone() - f.clone() * c.clone();
            }
            r.pop();
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
        }
        UPoly::new(r)
    }

    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        match a.lead().cloned() {
            Some(l) => a.scale(&(BigRational::from_integer(1.into()) / l)),
            None => a,
        }
    }

    /// Sign at `+∞` (`at_plus`) or `−∞`.
    fn sign_at_infinity(&self, at_plus: bool) -> i32 {
        match (self.lead(), self.degree()) {
            (Some(l), Some(d)) => {
                let s = if l.is_positive() { 1 } else { -1 };
                if at_plus || d % 2 == 0 {
                    s
                } else {
                    -s
                }
            }
            _ => 0,
        }
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| acc * x.clone() + c.clone())
    }
}

/// Sturm chain `p, p', −rem(p, p'), …`.
pub fn sturm_chain(p: &UPoly) -> Vec<UPoly> {
    let mut chain = vec![p.clone(), p.derivative()];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            break;
        }
        let r = chain[n - 2].rem(&chain[n - 1]);
        if r.is_zero() {
            break;
        }
        chain.push(r.scale(&BigRational::from_integer((-1).into())));
    }
    chain
}

fn sign_changes(signs: impl Iterator<Item = i32>) -> usize {
    let nz: Vec<i32> = signs.filter(|&s| s != 0).collect();
    nz.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots.
pub fn count_real_roots(p: &UPoly) -> usize {
    if p.degree().unwrap_or(0) == 0 {
        return 0;
    }
    let chain = sturm_chain(p);
    let minus = sign_changes(chain.iter().map(|q| q.sign_at_infinity(false)));
    let plus = sign_changes(chain.iter().map(|q| q.sign_at_infinity(true)));
    minus - plus
}

/// Number of distinct roots in the half-open interval `(lo, hi]`.
pub fn count_roots_in(p: &UPoly, lo: &BigRational, hi: &BigRational) -> usize {
    if p.degree().unwrap_or(0) == 0 {
        return 0;
    }
    let chain = sturm_chain(p);
    let sgn = |x: &BigRational| {
        sign_changes(chain.iter().map(|q| {
            let v = q.eval(x);
            if v.is_zero() {
                0
            } else if v.is_positive() {
                1
            } else {
                -1
            }
        }))
    };
    sgn(lo).saturating_sub(sgn(hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn up(c: &[i64]) -> UPoly {
        UPoly::new(c.iter().map(|&x| BigRational::from_integer(x.into())).collect())
    }

    #[test]
    fn counts_roots() {
        assert_eq!(count_real_roots(&up(&[-1, 0, 1])), 2);
        assert_eq!(count_real_roots(&up(&[1, 0, 1])), 0);
        // (t−1)²(t+2): two distinct roots
        assert_eq!(count_real_roots(&up(&[2, -3, 0, 1])), 2);
        assert_eq!(count_roots_in(&up(&[-1, 0, 1]), &BigRational::from_integer(0.into()), &BigRational::from_integer(5.into())), 1);
    }

    #[test]
    fn gcd_finds_common_factor() {
        let a = up(&[-1, 0, 1]);
        let b = up(&[1, 2, 1]);
        assert_eq!(a.gcd(&b), up(&[1, 1]));
    }
}
