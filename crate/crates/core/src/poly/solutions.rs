//! Homogeneous polynomial solutions of `Div(|y|^a ∇P) = 0`, even in `y`.

use num_rational::BigRational;

use crate::error::{invalid, Result};
use crate::geometry::constants::check_weight;
use crate::geometry::quadrature::unit_sphere_rule;
use crate::poly::cone::maximal_invariant_subspace;
use crate::poly::hypergeometric::terminating_series;
use crate::poly::polynomial::{monomials_of_degree, ExactPoly, FloatPoly, Poly};
use crate::poly::scalar::{Coefficient, WeightExponent};

/// How a solution was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Two-variable family `₂F₁(−k/2, (1−k−a)/2; 1/2; −x²/y²) y^k`.
    Even,
    /// Two-variable family `₂F₁((1−k)/2, (2−k−a)/2; 3/2; −x²/y²) x y^{k−1}`.
    Odd,
    /// A two-variable member made constant in `x_2, …, x_{m−1}`.
    Lift,
    /// Unique even extension of a homogeneous polynomial on the boundary.
    Extension,
    /// Harmonic polynomial on `R^n`, no weight.
    BoundaryHarmonic,
}

/// A normalised homogeneous polynomial with exact shape.
///
/// Variables are `(x_1, …, x_n, y)` for weighted solutions and `(x_1, …, x_n)`
/// for boundary harmonics. `poly = normalization * shape` has unit weighted
/// `L²` norm on the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousSolution {
    pub nvars: usize,
    pub degree: u32,
    pub weight: Option<WeightExponent>,
    pub shape: ExactPoly,
    pub poly: FloatPoly,
    pub normalization: f64,
    pub symmetry_rank: usize,
    /// Orthonormal spanning set of the declared invariant subspace.
    pub invariant_subspace: Vec<Vec<f64>>,
    pub family: Family,
}

impl HomogeneousSolution {
    /// Boundary dimension.
    pub fn n(&self) -> usize {
        if self.weight.is_some() {
            self.nvars - 1
        } else {
            self.nvars
        }
    }

    pub fn m(&self) -> usize {
        self.n() + 1
    }

    pub fn a(&self) -> f64 {
        self.weight.as_ref().map_or(0.0, |w| w.value)
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        self.poly.eval(p)
    }

    fn finish(shape: ExactPoly, weight: Option<WeightExponent>, family: Family, declared: Option<Vec<Vec<f64>>>) -> Self {
        let nvars = shape.nvars();
        let degree = shape.degree();
        let a = weight.as_ref().map_or(0.0, |w| w.value);
        let float = shape.to_float();
        let norm_sq = sphere_norm_sq(&float, a);
        let normalization = if norm_sq > 0.0 { 1.0 / norm_sq.sqrt() } else { 0.0 };
        let invariant_subspace = declared.unwrap_or_else(|| maximal_invariant_subspace(&shape));
        HomogeneousSolution {
            nvars,
            degree,
            weight,
            poly: float.scale(&normalization),
            normalization,
            symmetry_rank: invariant_subspace.len(),
            invariant_subspace,
            shape,
            family,
        }
    }
}

/// `∮_{S^{N−1}} |x_N|^a P² dσ` for a homogeneous float polynomial in `N` variables.
pub fn sphere_norm_sq(p: &FloatPoly, a: f64) -> f64 {
    let order = (2 * p.degree() as usize + 2).max(2);
    let (nodes, w) = unit_sphere_rule(p.nvars(), a, order);
    nodes.iter().zip(&w).map(|(x, w)| w * p.eval(x).powi(2)).sum()
}

fn two_variable_shape(k: u32, w: &WeightExponent, odd: bool) -> ExactPoly {
    let a: BigRational = w.as_coefficient();
    let one = BigRational::from_int(1);
    let two = BigRational::from_int(2);
    let kk = BigRational::from_int(k as i64);
    let (n_terms, b, c) = if odd {
        ((k as usize - 1) / 2, (two.clone() - kk - a) / two.clone(), BigRational::from_int(3) / two)
    } else {
        (k as usize / 2, (one - kk - a) / two.clone(), BigRational::from_int(1) / two)
    };
    let coeffs = terminating_series(n_terms, &b, &c);
    let mut p = ExactPoly::zero(2);
    for (j, cj) in coeffs.into_iter().enumerate() {
        let sign = if j % 2 == 0 { cj } else { -cj };
        let xpow = 2 * j as u32 + u32::from(odd);
        p.add_term(vec![xpow, k - xpow], sign);
    }
    p
}

/// Even member of degree `k` of the two-variable family.
pub fn even_model_poly(k: u32, a: f64) -> Result<HomogeneousSolution> {
    check_weight(a)?;
    if k % 2 == 1 {
        return Err(invalid("k", format!("even family needs even degree, got {k}")));
    }
    let w = WeightExponent::new(a);
    let shape = two_variable_shape(k, &w, false);
    Ok(HomogeneousSolution::finish(shape, Some(w), Family::Even, None))
}

/// Odd member of degree `k` of the two-variable family.
pub fn odd_model_poly(k: u32, a: f64) -> Result<HomogeneousSolution> {
    check_weight(a)?;
    if k.is_multiple_of(2) {
        return Err(invalid("k", format!("odd family needs odd degree, got {k}")));
    }
    let w = WeightExponent::new(a);
    let shape = two_variable_shape(k, &w, true);
    Ok(HomogeneousSolution::finish(shape, Some(w), Family::Odd, None))
}

/// The two-variable member of degree `k`, even or odd according to parity.
pub fn model_poly(k: u32, a: f64) -> Result<HomogeneousSolution> {
    if k.is_multiple_of(2) {
        even_model_poly(k, a)
    } else {
        odd_model_poly(k, a)
    }
}

/// Embeds a two-variable member into `R^m` as `P(x_1, y)`.
pub fn lift_to_symmetric(p2: &HomogeneousSolution, m: usize) -> Result<HomogeneousSolution> {
    if p2.nvars != 2 || p2.weight.is_none() {
        return Err(invalid("P", "lift expects a two-variable weighted member"));
    }
    if m < 2 {
        return Err(invalid("m", "ambient dimension must be at least 2"));
    }
    let shape = p2.shape.embed(m, &[0, m - 1]);
    let lift_dirs: Vec<Vec<f64>> = (1..m - 1)
        .map(|i| {
            let mut e = vec![0.0; m];
            e[i] = 1.0;
            e
        })
        .collect();
    Ok(HomogeneousSolution::finish(shape, p2.weight.clone(), Family::Lift, Some(lift_dirs)))
}

/// Even extension `Σ_j y^{2j} p_j(x)` of a boundary polynomial, with
/// `p_{j+1} = −Δ_x p_j / ((2j+2)(2j+1+a))`. Works term-by-degree, so `p0`
/// need not be homogeneous.
pub fn extend_boundary_polynomial<C: Coefficient>(p0: &Poly<C>, a: &C) -> Poly<C> {
    let n = p0.nvars();
    let m = n + 1;
    let mut out = Poly::zero(m);
    let mut pj = p0.clone();
    let mut j = 0i64;
    while !pj.is_zero() {
        let lifted = pj.embed(m, &(0..n).collect::<Vec<_>>()).shift(n, 2 * j as u32);
        out = out.add(&lifted);
        let den = C::from_int(2 * j + 2) * (C::from_int(2 * j + 1) + a.clone());
        pj = pj.laplacian().scale(&(-(C::one() / den)));
        j += 1;
    }
    out
}

/// Solution generated by a homogeneous boundary polynomial.
pub fn extension_solution(p0: &ExactPoly, a: f64) -> Result<HomogeneousSolution> {
    check_weight(a)?;
    let d = p0.degree();
    if !p0.is_homogeneous_of(d) {
        return Err(invalid("p0", "boundary polynomial must be homogeneous"));
    }
    let w = WeightExponent::new(a);
    let shape = extend_boundary_polynomial(p0, &w.as_coefficient::<BigRational>());
    Ok(HomogeneousSolution::finish(shape, Some(w), Family::Extension, None))
}

/// Basis of all even homogeneous solutions of degree `d` in `R^{n+1}`:
/// extensions of the boundary monomials of degree `d`.
pub fn solution_space_basis(n: usize, d: u32, a: f64) -> Result<Vec<ExactPoly>> {
    check_weight(a)?;
    let w = WeightExponent::new(a);
    let ac: BigRational = w.as_coefficient();
    Ok(monomials_of_degree(n, d)
        .into_iter()
        .map(|e| extend_boundary_polynomial(&ExactPoly::monomial(e, BigRational::from_int(1)), &ac))
        .collect())
}

/// `y ΔP + a ∂_y P` with `y` the last variable.
pub fn weighted_residual<C: Coefficient>(p: &Poly<C>, a: &C) -> Poly<C> {
    let yi = p.nvars() - 1;
    p.laplacian().shift(yi, 1).add(&p.derivative(yi).scale(a))
}

/// Exact residual of the weighted equation for the solution's shape.
pub fn verify_weighted_harmonic(p: &HomogeneousSolution) -> Result<ExactPoly> {
    let w = p.weight.as_ref().ok_or_else(|| invalid("P", "boundary harmonics carry no weight"))?;
    Ok(weighted_residual(&p.shape, &w.as_coefficient::<BigRational>()))
}

/// Whether every exponent of the last variable is even.
pub fn is_even_in_y<C: Coefficient>(p: &Poly<C>) -> bool {
    let yi = p.nvars() - 1;
    p.terms().all(|(e, c)| e[yi] % 2 == 0 || c.is_zero())
}
