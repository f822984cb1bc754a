//! Sparse multivariate polynomials over a coefficient ring.

use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::poly::scalar::Coefficient;

pub type Exponent = Vec<u32>;

/// `Σ c_α x^α` stored as a map from exponent vectors to nonzero coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<C: Coefficient> {
    nvars: usize,
    terms: BTreeMap<Exponent, C>,
}

pub type ExactPoly = Poly<BigRational>;
pub type FloatPoly = Poly<f64>;

impl<C: Coefficient> Poly<C> {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn monomial(exp: Exponent, c: C) -> Self {
        let mut p = Self::zero(exp.len());
        p.add_term(exp, c);
        p
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, C::one())
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponent, C)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent length");
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, e: &[u32]) -> C {
        self.terms.get(e).cloned().unwrap_or_else(C::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, e: Exponent, c: C) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e.clone()).or_insert_with(C::zero);
        *entry = entry.clone() + c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    /// Total degree (0 for the zero polynomial).
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn is_homogeneous_of(&self, d: u32) -> bool {
        self.terms.keys().all(|e| e.iter().sum::<u32>() == d)
    }

    /// Largest exponent of variable `i` over all terms.
    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut p = Self::zero(self.nvars);
        for (e, v) in &self.terms {
            p.add_term(e.clone(), v.clone() * c.clone());
        }
        p
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut p = self.clone();
        for (e, v) in &other.terms {
            p.add_term(e.clone(), v.clone());
        }
        p
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut p = self.clone();
        for (e, v) in &other.terms {
            p.add_term(e.clone(), -v.clone());
        }
        p
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut p = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.add_term(e, c1.clone() * c2.clone());
            }
        }
        p
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut p = Self::constant(self.nvars, C::one());
        for _ in 0..k {
            p = p.mul(self);
        }
        p
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut p = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                p.add_term(f, c.clone() * C::from_int(e[i] as i64));
            }
        }
        p
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.nvars).map(|i| self.derivative(i)).collect()
    }

    /// Sum of second derivatives over the listed variables.
    pub fn laplacian_in(&self, vars: impl IntoIterator<Item = usize>) -> Self {
        let mut p = Self::zero(self.nvars);
        for i in vars {
            p = p.add(&self.derivative(i).derivative(i));
        }
        p
    }

    pub fn laplacian(&self) -> Self {
        self.laplacian_in(0..self.nvars)
    }

    /// `Σ v_i ∂_i P`.
    pub fn directional(&self, v: &[C]) -> Self {
        let mut p = Self::zero(self.nvars);
        for (i, vi) in v.iter().enumerate() {
            if !vi.is_zero() {
                p = p.add(&self.derivative(i).scale(vi));
            }
        }
        p
    }

    /// Multiplies by `x_i^k`.
    pub fn shift(&self, i: usize, k: u32) -> Self {
        let mut p = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut f = e.clone();
            f[i] += k;
            p.add_term(f, c.clone());
        }
        p
    }

    /// Divides by `x_i^k`; every term must be divisible.
    pub fn unshift(&self, i: usize, k: u32) -> Option<Self> {
        let mut p = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] < k {
                return None;
            }
            let mut f = e.clone();
            f[i] -= k;
            p.add_term(f, c.clone());
        }
        Some(p)
    }

    /// Re-indexes variables: variable `i` of `self` becomes variable `map[i]`
    /// of a polynomial in `nvars` variables.
    pub fn embed(&self, nvars: usize, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.nvars);
        let mut p = Self::zero(nvars);
        for (e, c) in &self.terms {
            let mut f = vec![0; nvars];
            for (i, &k) in e.iter().enumerate() {
                f[map[i]] += k;
            }
            p.add_term(f, c.clone());
        }
        p
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c.to_f64() * e.iter().zip(x).map(|(&k, &xi)| xi.powi(k as i32)).product::<f64>())
            .sum()
    }

    /// Exact evaluation at a coefficient point.
    pub fn eval_exact(&self, x: &[C]) -> C {
        let mut s = C::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (&k, xi) in e.iter().zip(x) {
                for _ in 0..k {
                    t = t * xi.clone();
                }
            }
            s = s + t;
        }
        s
    }

    pub fn to_float(&self) -> FloatPoly {
        let mut p = FloatPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            p.add_term(e.clone(), c.to_f64());
        }
        p
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.to_f64().abs()).fold(0.0, f64::max)
    }

    /// First term in exponent order, if any.
    pub fn leading_witness(&self) -> Option<(Exponent, C)> {
        self.terms.iter().next().map(|(e, c)| (e.clone(), c.clone()))
    }
}

impl FloatPoly {
    /// Drops coefficients below `tol` times the largest one.
    pub fn pruned(&self, tol: f64) -> Self {
        let cut = tol * self.max_abs_coefficient();
        Poly::from_terms(self.nvars, self.terms.iter().filter(|(_, c)| c.abs() > cut).map(|(e, c)| (e.clone(), *c)))
    }

    /// Evaluates the value and gradient together.
    pub fn eval_with_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut val = 0.0;
        let mut pw = vec![0.0; x.len()];
        for (e, c) in &self.terms {
            for (i, (&k, &xi)) in e.iter().zip(x).enumerate() {
                pw[i] = xi.powi(k as i32);
            }
            let mono: f64 = pw.iter().product();
            val += c * mono;
            for i in 0..x.len() {
                if e[i] == 0 {
                    continue;
                }
                let mut t = c * e[i] as f64 * x[i].powi(e[i] as i32 - 1);
                for (j, p) in pw.iter().enumerate() {
                    if j != i {
                        t *= p;
                    }
                }
                grad[i] += t;
            }
        }
        val
    }
}

impl ExactPoly {
    pub fn from_float(p: &FloatPoly) -> Self {
        let mut q = ExactPoly::zero(p.nvars());
        for (e, c) in p.terms() {
            q.add_term(e.clone(), <BigRational as Coefficient>::from_f64(*c));
        }
        q
    }
}

/// All exponent vectors of total degree `d` in `nvars` variables, in
/// lexicographically decreasing order of the first variable.
pub fn monomials_of_degree(nvars: usize, d: u32) -> Vec<Exponent> {
    if nvars == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    if nvars == 1 {
        return vec![vec![d]];
    }
    let mut out = Vec::new();
    for k in (0..=d).rev() {
        for mut rest in monomials_of_degree(nvars - 1, d - k) {
            rest.insert(0, k);
            out.push(rest);
        }
    }
    out
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1, |acc, i| acc * (n - i) / (i + 1))
}
