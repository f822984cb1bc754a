//! Coefficient rings for polynomials: exact rationals and `f64`.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};


pub trait Coefficient:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + std::ops::Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_f64(x: f64) -> Self;
    fn from_int(x: i64) -> Self;
    fn from_rational(x: &BigRational) -> Self;
    fn to_f64(&self) -> f64;
    fn abs_val(&self) -> Self;
}

impl Coefficient for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn from_int(x: i64) -> Self {
        x as f64
    }
    fn from_rational(x: &BigRational) -> Self {
        Coefficient::to_f64(x)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
}

impl Coefficient for BigRational {
    /// Exact binary value of the float.
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite coefficient")
    }
    fn from_int(x: i64) -> Self {
        BigRational::from_integer(BigInt::from(x))
    }
    fn from_rational(x: &BigRational) -> Self {
        x.clone()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            // huge numerator and denominator: scale down before dividing
            let n = self.numer().bits() as i64;
            let d = self.denom().bits() as i64;
            let shift = (n.min(d) - 60).max(0) as u64;
            let num = (self.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let den = (self.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            num / den
        })
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
}

/// Weight exponent `a` with its exact rational value.
///
/// Floats close to a fraction with denominator at most 1000 are read as that
/// fraction (so `-0.9` means `-9/10`); any other float is taken at its exact
/// binary value.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightExponent {
    pub value: f64,
    pub exact: BigRational,
    /// Whether a small-denominator fraction was recognised.
    pub recognised: bool,
}

impl WeightExponent {
    pub fn new(a: f64) -> Self {
        for q in 1..=1000i64 {
            let p = (a * q as f64).round();
            if (p / q as f64 - a).abs() <= 4.0 * f64::EPSILON * a.abs().max(1.0) {
                let exact = BigRational::new(BigInt::from(p as i64), BigInt::from(q));
                return WeightExponent { value: a, exact, recognised: true };
            }
        }
        let exact = <BigRational as FromPrimitive>::from_f64(a).expect("finite weight exponent");
        WeightExponent { value: a, exact, recognised: false }
    }

    pub fn from_gamma(gamma: f64) -> Self {
        Self::new(1.0 - 2.0 * gamma)
    }

    pub fn as_coefficient<C: Coefficient>(&self) -> C {
        C::from_rational(&self.exact)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recognises_simple_fractions() {
        let w = WeightExponent::new(-0.9);
        assert!(w.recognised);
        assert_eq!(w.exact, BigRational::new((-9).into(), 10.into()));
        let w = WeightExponent::new(1.0 / 3.0);
        assert_eq!(w.exact, BigRational::new(1.into(), 3.into()));
        let w = WeightExponent::new(std::f64::consts::FRAC_1_SQRT_2 - 0.5);
        assert!(!w.recognised);
        assert_eq!(ToPrimitive::to_f64(&w.exact).unwrap(), w.value);
    }

    #[test]
    fn coefficient_conversion() {
        let w = WeightExponent::new(0.5);
        let c: BigRational = w.as_coefficient();
        assert_eq!(c, BigRational::new(1.into(), 2.into()));
        let f: f64 = w.as_coefficient();
        assert_eq!(f, 0.5);
    }
}
