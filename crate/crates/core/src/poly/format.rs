//! Text exchange format for polynomials.
//!
//! ```text
//! n=<int> d=<int> a=<float> k_sym=<int>
//! <coeff> <e1> <e2> ... <em>
//! ```
//!
//! Coefficients are floats or exact fractions `p/q`.

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{LabError, Result};
use crate::geometry::grid::parse_key_values;
use crate::poly::polynomial::{ExactPoly, FloatPoly, Poly};
use crate::poly::scalar::Coefficient;
use crate::poly::solutions::HomogeneousSolution;

#[derive(Debug, Clone, PartialEq)]
pub struct PolyFile {
    pub n: usize,
    pub d: u32,
    pub a: f64,
    pub k_sym: usize,
    pub poly: FloatPoly,
    /// Present when every coefficient was written as an integer or fraction.
    pub exact: Option<ExactPoly>,
}

impl PolyFile {
    /// Whether the polynomial lives on `R^{n+1}` (weighted) rather than `R^n`.
    pub fn is_weighted(&self) -> bool {
        self.poly.nvars() == self.n + 1
    }
}

fn header(n: usize, d: u32, a: f64, k: usize) -> String {
    format!("n={n} d={d} a={a:?} k_sym={k}\n")
}

fn exponents(e: &[u32]) -> String {
    e.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Normalised float coefficients, 17 significant digits.
pub fn write_solution(p: &HomogeneousSolution) -> String {
    let mut s = header(p.n(), p.degree, p.a(), p.symmetry_rank);
    for (e, c) in p.poly.terms() {
        let _ = writeln!(s, "{c:.16e} {}", exponents(e));
    }
    s
}

/// Exact, unnormalised shape.
pub fn write_solution_exact(p: &HomogeneousSolution) -> String {
    let mut s = header(p.n(), p.degree, p.a(), p.symmetry_rank);
    for (e, c) in p.shape.terms() {
        let _ = writeln!(s, "{c} {}", exponents(e));
    }
    s
}

fn parse_coefficient(tok: &str) -> Option<(f64, Option<BigRational>)> {
    if let Some((p, q)) = tok.split_once('/') {
        let p = BigInt::from_str(p).ok()?;
        let q = BigInt::from_str(q).ok()?;
        if q == BigInt::from(0) {
            return None;
        }
        let r = BigRational::new(p, q);
        return Some((r.to_f64(), Some(r)));
    }
    if let Ok(i) = BigInt::from_str(tok) {
        let r = BigRational::from_integer(i);
        return Some((r.to_f64(), Some(r)));
    }
    tok.parse::<f64>().ok().filter(|x| x.is_finite()).map(|x| (x, None))
}

pub fn parse_poly_file(text: &str) -> Result<PolyFile> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    let (_, head) = lines.next().ok_or_else(|| LabError::Format("empty polynomial file".into()))?;
    let kv = parse_key_values(head);
    let get = |k: &str| -> Result<&str> {
        kv.iter()
            .find(|(key, _)| key == k)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| LabError::Format(format!("line 1: header lacks `{k}`")))
    };
    let num = |k: &str| -> Result<f64> {
        get(k)?.parse::<f64>().map_err(|_| LabError::Format(format!("line 1: bad value for `{k}`")))
    };
    let n = num("n")? as usize;
    let d = num("d")? as u32;
    let a = num("a")?;
    let k_sym = num("k_sym")? as usize;
    let mut float_terms = Vec::new();
    let mut exact_terms = Vec::new();
    let mut all_exact = true;
    let mut nvars = None;
    for (ln, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let (c, exact) = parse_coefficient(toks[0])
            .ok_or_else(|| LabError::Format(format!("line {}: bad coefficient `{}`", ln + 1, toks[0])))?;
        let e: Vec<u32> = toks[1..]
            .iter()
            .map(|t| t.parse::<u32>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| LabError::Format(format!("line {}: bad exponent", ln + 1)))?;
        if e.len() != n && e.len() != n + 1 {
            return Err(LabError::Format(format!("line {}: expected {} or {} exponents", ln + 1, n, n + 1)));
        }
        if *nvars.get_or_insert(e.len()) != e.len() {
            return Err(LabError::Format(format!("line {}: inconsistent exponent count", ln + 1)));
        }
        if e.iter().sum::<u32>() != d {
            return Err(LabError::Format(format!("line {}: monomial degree differs from d = {d}", ln + 1)));
        }
        match exact {
            Some(r) => exact_terms.push((e.clone(), r)),
            None => all_exact = false,
        }
        float_terms.push((e, c));
    }
    let nvars = nvars.unwrap_or(n + 1);
    Ok(PolyFile {
        n,
        d,
        a,
        k_sym,
        poly: Poly::from_terms(nvars, float_terms),
        exact: all_exact.then(|| Poly::from_terms(nvars, exact_terms)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::solutions::even_model_poly;

    #[test]
    fn round_trip_float_and_exact() {
        let p = even_model_poly(2, 0.5).unwrap();
        let f = parse_poly_file(&write_solution(&p)).unwrap();
        assert_eq!(f.poly, p.poly);
        assert!(f.exact.is_none());
        let e = parse_poly_file(&write_solution_exact(&p)).unwrap();
        assert_eq!(e.exact.unwrap(), p.shape);
        assert_eq!((e.n, e.d, e.a, e.k_sym), (1, 2, 0.5, 0));
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(parse_poly_file("n=1 d=2 a=0.0 k_sym=0\n1.0 1 0\n").is_err());
        assert!(parse_poly_file("n=1 d=2 a=0.0 k_sym=0\nabc 2 0\n").is_err());
        assert!(parse_poly_file("d=2 a=0.0 k_sym=0\n").is_err());
    }
}
