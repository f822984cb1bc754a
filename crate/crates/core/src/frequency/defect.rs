//! Quantitative symmetry defects of tangent maps.
//!
//! For a target rank `k` the defect is the smallest weighted unit-ball
//! distance `∫_{B_1} |y|^a |T − P|²` between the tangent map `T` and a
//! homogeneous even solution `P` of one degree `d ≤ d_max` that is invariant
//! along some `k`-dimensional subspace `V`.
//!
//! An even solution invariant along a direction `(w, t)` with `t ≠ 0` is also
//! invariant along its reflection `(w, −t)`, hence along `w` and `e_y`. So `V`
//! is searched in the form `V_x` or `V_x ⊕ e_y` with `V_x ⊂ R^n`. For fixed
//! `V_x` the invariant solutions are the solutions (or, with `e_y`, the
//! harmonic polynomials) in the coordinates `z = Wᵀx` of the orthogonal
//! complement `W`, so the fit is an unconstrained least-squares problem.
//! `V_x` is updated from the gradient second moments of the current fit.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, LabError, Result};
use crate::field::ScalarField;
use crate::frequency::functionals::{functionals, FrequencySettings};
use crate::frequency::tangent::tangent_map;
use crate::geometry::quadrature::ball_rule;
use crate::poly::harmonic::harmonic_kernel;
use crate::poly::polynomial::{ExactPoly, FloatPoly};
use crate::poly::scalar::WeightExponent;
use crate::poly::solutions::{extend_boundary_polynomial, solution_space_basis};

/// Highest degree admitted in the fit space.
pub const MAX_FIT_DEGREE: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct DefectOptions {
    /// Degree bound; defaults to `⌈N⌉ + 1` from the frequency of `T` on `B_1`.
    pub d_max: Option<usize>,
    /// Exactness degree of the unit-ball rule.
    pub order: usize,
    pub max_rounds: usize,
    /// Relative change of the defect below which the alternation stops.
    pub stagnation: f64,
    /// Mixes each fit basis with a seeded random invertible matrix.
    pub basis_mixing_seed: Option<u64>,
}

impl Default for DefectOptions {
    fn default() -> Self {
        DefectOptions { d_max: None, order: 16, max_rounds: 20, stagnation: 1e-10, basis_mixing_seed: None }
    }
}

#[derive(Debug, Clone)]
pub struct SymmetryReport {
    pub center: Vec<f64>,
    pub scale: f64,
    pub k: usize,
    /// `∫_{B_1} |y|^a |T − P|²`.
    pub defect: f64,
    pub degree: usize,
    /// Best fit in tangent coordinates.
    pub polynomial: FloatPoly,
    /// Orthonormal vectors spanning the fitted invariant subspace.
    pub subspace: Vec<Vec<f64>>,
    /// Condition number of the least-squares design at the optimum.
    pub condition: f64,
    pub rounds: usize,
    pub a: f64,
}

impl SymmetryReport {
    /// The exact even extension of the fit's boundary trace (coefficients at
    /// their binary values); its weighted residual vanishes identically and it
    /// equals [`SymmetryReport::polynomial`] up to rounding.
    pub fn exact_fit(&self) -> ExactPoly {
        let m = self.polynomial.nvars();
        let trace = FloatPoly::from_terms(m - 1, self.polynomial.terms().filter(|(e, _)| e[m - 1] == 0).map(|(e, c)| (e[..m - 1].to_vec(), *c)));
        let a: BigRational = WeightExponent::new(self.a).as_coefficient();
        extend_boundary_polynomial(&ExactPoly::from_float(&trace), &a)
    }
}

/// Degree-`d` invariant solutions in the reduced variables `(z_1, …, z_r, y)`.
struct ReducedSpace {
    float: Vec<FloatPoly>,
}

fn reduced_space(r: usize, d: usize, a: f64, along_y: bool) -> Result<Arc<ReducedSpace>> {
    type Cache = Mutex<HashMap<(usize, usize, u64, bool), Arc<ReducedSpace>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let key = (r, d, a.to_bits(), along_y);
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(s) = cache.lock().expect("fit cache").get(&key) {
        return Ok(s.clone());
    }
    let exact: Vec<ExactPoly> = if along_y {
        let map: Vec<usize> = (0..r).collect();
        harmonic_kernel(r, d as u32).iter().map(|p| p.embed(r + 1, &map)).collect()
    } else {
        solution_space_basis(r, d as u32, a)?
    };
    let s = Arc::new(ReducedSpace { float: exact.iter().map(|p| p.to_float()).collect() });
    cache.lock().expect("fit cache").insert(key, s.clone());
    Ok(s)
}

struct Samples {
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
    sqrt_w: Vec<f64>,
    t: Vec<f64>,
    total: f64,
}

struct Fit {
    defect: f64,
    coefficients: Vec<f64>,
    condition: f64,
}

/// Orthonormal complement of `v` in `R^n`, built from the coordinate axes in order.
fn complement(v: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<DVector<f64>> = v.iter().map(|x| DVector::from_column_slice(x)).collect();
    let mut out = Vec::new();
    for axis in 0..n {
        if basis.len() == n {
            break;
        }
        let mut p = DVector::from_fn(n, |i, _| f64::from(u8::from(i == axis)));
        for _ in 0..2 {
            for q in &basis {
                p -= q * q.dot(&p);
            }
        }
        if p.norm() > 1e-6 {
            let p = p.normalize();
            out.push(p.iter().copied().collect());
            basis.push(p);
        }
    }
    out
}

/// Reduced coordinates `(Wᵀx, y)` of a point.
fn reduce(p: &[f64], w: &[Vec<f64>]) -> Vec<f64> {
    let n = p.len() - 1;
    let mut z: Vec<f64> = w.iter().map(|c| (0..n).map(|l| c[l] * p[l]).sum()).collect();
    z.push(p[n]);
    z
}

fn mixing(nb: usize, seed: Option<u64>, salt: u64) -> DMatrix<f64> {
    match seed {
        None => DMatrix::identity(nb, nb),
        Some(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt);
            DMatrix::from_fn(nb, nb, |i, j| f64::from(u8::from(i == j)) + 0.3 * rng.gen_range(-1.0..1.0))
        }
    }
}

/// Least-squares fit of `T` over the (mixed) reduced basis composed with `W`.
fn fit(samples: &Samples, space: &ReducedSpace, w: &[Vec<f64>], mix: &DMatrix<f64>) -> Fit {
    let nb = space.float.len();
    let np = samples.points.len();
    if nb == 0 {
        return Fit { defect: samples.total, coefficients: Vec::new(), condition: 1.0 };
    }
    let raw = DMatrix::from_fn(np, nb, |i, j| space.float[j].eval(&reduce(&samples.points[i], w)));
    let basis = raw * mix;
    let design = DMatrix::from_fn(np, nb, |i, j| samples.sqrt_w[i] * basis[(i, j)]);
    let b = DVector::from_iterator(np, samples.t.iter().zip(&samples.sqrt_w).map(|(t, s)| t * s));
    let svd = design.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let c = svd.solve(&b, 1e-13 * smax).expect("svd with vectors");
    let fitted = &basis * &c;
    let defect = fitted
        .iter()
        .zip(&samples.t)
        .zip(&samples.weights)
        .map(|((p, t), wt)| wt * (t - p).powi(2))
        .sum();
    Fit { defect, coefficients: c.iter().copied().collect(), condition: if smin > 0.0 { smax / smin } else { f64::INFINITY } }
}

/// The `j` eigenvectors of smallest eigenvalue, with degenerate eigenspaces
/// resolved by projecting coordinate axes in order.
fn least_varying(moment: &DMatrix<f64>, j: usize) -> Vec<Vec<f64>> {
    let n = moment.nrows();
    if j == 0 {
        return Vec::new();
    }
    let eig = SymmetricEigen::new(moment.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| eig.eigenvalues[p].total_cmp(&eig.eigenvalues[q]));
    let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let tie = 1e-9 * top;
    let mut out: Vec<DVector<f64>> = Vec::new();
    let mut start = 0;
    while out.len() < j && start < n {
        let lam = eig.eigenvalues[order[start]];
        let mut end = start + 1;
        while end < n && eig.eigenvalues[order[end]] - lam <= tie {
            end += 1;
        }
        let cluster: Vec<DVector<f64>> = order[start..end].iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect();
        if cluster.len() <= j - out.len() {
            out.extend(cluster);
        } else {
            for axis in 0..n {
                if out.len() == j {
                    break;
                }
                let e = DVector::from_fn(n, |i, _| f64::from(u8::from(i == axis)));
                let mut p = cluster.iter().fold(DVector::zeros(n), |acc, c| acc + c * c.dot(&e));
                for q in &out {
                    p -= q * q.dot(&p);
                }
                if p.norm() > 1e-6 {
                    out.push(p.normalize());
                }
            }
        }
        start = end;
    }
    out.into_iter()
        .map(|v| {
            let s = if v[v.iamax()] < 0.0 { -1.0 } else { 1.0 };
            v.iter().map(|x| s * x).collect()
        })
        .collect()
}

/// Second moment of the `x` components of gradients.
fn x_moment(grads: &[Vec<f64>], weights: &[f64], n: usize) -> DMatrix<f64> {
    let mut mm = DMatrix::zeros(n, n);
    for (g, w) in grads.iter().zip(weights) {
        for i in 0..n {
            for l in 0..n {
                mm[(i, l)] += w * g[i] * g[l];
            }
        }
    }
    mm
}

struct Candidate {
    defect: f64,
    degree: usize,
    along_y: bool,
    vx: Vec<Vec<f64>>,
    coefficients: Vec<f64>,
    condition: f64,
    rounds: usize,
}

struct Search<'s> {
    samples: &'s Samples,
    n: usize,
    a: f64,
    opts: &'s DefectOptions,
    t_grads: Vec<Vec<f64>>,
}

impl Search<'_> {
    fn space(&self, r: usize, d: usize, along_y: bool) -> Result<(Arc<ReducedSpace>, DMatrix<f64>)> {
        let s = reduced_space(r, d, self.a, along_y)?;
        let salt = ((r as u64) << 32) ^ ((d as u64) << 1) ^ u64::from(along_y);
        let mix = mixing(s.float.len(), self.opts.basis_mixing_seed, salt);
        Ok((s, mix))
    }

    /// Alternating search over `V_x` of dimension `j` for one degree.
    fn alternate(&self, j: usize, d: usize, along_y: bool) -> Result<Candidate> {
        let n = self.n;
        let (space, mix) = self.space(n - j, d, along_y)?;
        let mut vx = least_varying(&x_moment(&self.t_grads, &self.samples.weights, n), j);
        let mut best: Option<Candidate> = None;
        let mut prev = f64::INFINITY;
        for round in 1..=self.opts.max_rounds.max(1) {
            let w = complement(&vx, n);
            let f = fit(self.samples, &space, &w, &mix);
            if best.as_ref().is_none_or(|b| f.defect < b.defect) {
                best = Some(Candidate {
                    defect: f.defect,
                    degree: d,
                    along_y,
                    vx: vx.clone(),
                    coefficients: f.coefficients.clone(),
                    condition: f.condition,
                    rounds: round,
                });
            }
            let scale = self.samples.total.max(f64::MIN_POSITIVE);
            if j == 0 || j == n || (prev - f.defect).abs() <= self.opts.stagnation * scale {
                break;
            }
            prev = f.defect;
            let grads = self.fit_gradients(&space, &mix, &w, &f);
            vx = least_varying(&x_moment(&grads, &self.samples.weights, n), j);
        }
        Ok(best.expect("at least one round"))
    }

    fn fit_gradients(&self, space: &ReducedSpace, mix: &DMatrix<f64>, w: &[Vec<f64>], f: &Fit) -> Vec<Vec<f64>> {
        let c = mix * DVector::from_column_slice(&f.coefficients);
        let p = space.float.iter().zip(c.iter()).fold(FloatPoly::zero(w.len() + 1), |acc, (b, &ci)| acc.add(&b.scale(&ci)));
        let n = self.n;
        self.samples
            .points
            .iter()
            .map(|x| {
                let z = reduce(x, w);
                let mut gz = vec![0.0; z.len()];
                p.eval_with_gradient(&z, &mut gz);
                let mut g: Vec<f64> = (0..n).map(|l| w.iter().zip(&gz).map(|(c, g)| c[l] * g).sum()).collect();
                g.push(gz[w.len()]);
                g
            })
            .collect()
    }

    fn best(&self, k: usize, d_max: usize) -> Result<Candidate> {
        let mut best: Option<Candidate> = None;
        for along_y in [false, true] {
            let j = match (along_y, k) {
                (false, k) if k <= self.n => k,
                (true, k) if k >= 1 => k - 1,
                _ => continue,
            };
            for d in 0..=d_max {
                let c = self.alternate(j, d, along_y)?;
                if best.as_ref().is_none_or(|b| c.defect < b.defect) {
                    best = Some(c);
                }
            }
        }
        best.ok_or(LabError::EmptyFitSpace { k, d_max })
    }

    fn polynomial(&self, c: &Candidate) -> Result<FloatPoly> {
        let n = self.n;
        let m = n + 1;
        let w = complement(&c.vx, n);
        let (space, mix) = self.space(n - c.vx.len(), c.degree, c.along_y)?;
        let coeffs = mix * DVector::from_column_slice(&c.coefficients);
        // substitute z_i = w_i · x, keep y
        let mut subs: Vec<FloatPoly> = w
            .iter()
            .map(|col| FloatPoly::from_terms(m, (0..n).map(|l| {
                let mut e = vec![0; m];
                e[l] = 1;
                (e, col[l])
            })))
            .collect();
        subs.push(FloatPoly::var(m, n));
        let mut out = FloatPoly::zero(m);
        for (b, &ci) in space.float.iter().zip(coeffs.iter()) {
            for (e, &coef) in b.terms() {
                let term = e.iter().zip(&subs).fold(FloatPoly::constant(m, coef * ci), |acc, (&k, s)| acc.mul(&s.pow(k)));
                out = out.add(&term);
            }
        }
        Ok(out.pruned(1e-14 * out.max_abs_coefficient()))
    }
}

/// Defect of the tangent map `T_{x,s} U` against `k`-symmetric solutions.
pub fn symmetry_defect(
    u: &(impl ScalarField + ?Sized),
    x: &[f64],
    s: f64,
    k: usize,
    a: f64,
    opts: &DefectOptions,
) -> Result<SymmetryReport> {
    Ok(symmetry_defects_from(u, x, s, a, opts, k)?.swap_remove(0))
}

/// Reports for every rank `k = 0..=m`.
pub fn symmetry_defects(
    u: &(impl ScalarField + ?Sized),
    x: &[f64],
    s: f64,
    a: f64,
    opts: &DefectOptions,
) -> Result<Vec<SymmetryReport>> {
    symmetry_defects_from(u, x, s, a, opts, 0)
}

/// Reports for the ranks `k_min..=m` (entry `i` has rank `k_min + i`).
///
/// The defect is nondecreasing in `k`: the value for `k` is the minimum over
/// the searches for all ranks `k' ≥ k`, since a `k'`-symmetric polynomial is
/// also `k`-symmetric. Rank 0 is a plain least-squares fit over all
/// solutions and so already below every higher-rank value.
pub fn symmetry_defects_from(
    u: &(impl ScalarField + ?Sized),
    x: &[f64],
    s: f64,
    a: f64,
    opts: &DefectOptions,
    k_min: usize,
) -> Result<Vec<SymmetryReport>> {
    if k_min > u.dim() {
        return Err(invalid("k", "rank exceeds the dimension"));
    }
    let m = u.dim();
    let n = m - 1;
    let t = tangent_map(u, x, s, a, opts.order.max(8))?;
    let d_max = match opts.d_max {
        Some(d) => d,
        None => {
            let f = functionals(&t, &vec![0.0; n], 1.0, &FrequencySettings::flat(m, a).with_order(opts.order), Some(0.0))?;
            (f.n().ceil().max(0.0) as usize + 1).clamp(1, MAX_FIT_DEGREE)
        }
    };
    if d_max > MAX_FIT_DEGREE {
        return Err(invalid("d_max", format!("at most {MAX_FIT_DEGREE}")));
    }
    let rule = ball_rule(m, a, &vec![0.0; m], 1.0, opts.order)?;
    let mut t_grads = Vec::with_capacity(rule.points.len());
    let mut tv = Vec::with_capacity(rule.points.len());
    for p in &rule.points {
        let (v, g) = t.value_and_gradient(p);
        tv.push(v);
        t_grads.push(g);
    }
    let total = tv.iter().zip(&rule.weights).map(|(v, w)| w * v * v).sum();
    let samples = Samples {
        sqrt_w: rule.weights.iter().map(|w| w.sqrt()).collect(),
        weights: rule.weights.clone(),
        points: rule.points.clone(),
        t: tv,
        total,
    };
    let search = Search { samples: &samples, n, a, opts, t_grads };
    let mut reports: Vec<Option<SymmetryReport>> = (k_min..=m).map(|_| None).collect();
    let mut carry: Option<Candidate> = None;
    for k in (k_min..=m).rev() {
        let cand = search.best(k, d_max)?;
        let cand = match carry.take() {
            Some(prev) if prev.defect <= cand.defect => prev,
            _ => cand,
        };
        let mut subspace = cand.vx.clone();
        if cand.along_y {
            let mut e = vec![0.0; m];
            e[n] = 1.0;
            subspace.push(e);
        }
        for v in subspace.iter_mut() {
            v.resize(m, 0.0);
        }
        subspace.truncate(k);
        reports[k - k_min] = Some(SymmetryReport {
            center: t.center.clone(),
            scale: s,
            k,
            defect: cand.defect,
            degree: cand.degree,
            polynomial: search.polynomial(&cand)?,
            subspace,
            condition: cand.condition,
            rounds: cand.rounds,
            a,
        });
        carry = Some(cand);
    }
    Ok(reports.into_iter().map(|r| r.expect("filled")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_is_orthonormal() {
        let v = vec![vec![0.6, 0.8, 0.0]];
        let w = complement(&v, 3);
        assert_eq!(w.len(), 2);
        for (i, a) in w.iter().enumerate() {
            assert!(a.iter().zip(&v[0]).map(|(x, y)| x * y).sum::<f64>().abs() < 1e-14);
            for b in &w[..i] {
                assert!(a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>().abs() < 1e-14);
            }
        }
    }

    #[test]
    fn degenerate_directions_prefer_low_axes() {
        let mm = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 5.0]));
        let v = least_varying(&mm, 1);
        assert!((v[0][0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotated_fit_reproduces_rotated_member() {
        // x1² − x2² rotated by 30° in the boundary plane, invariant along x3 and y
        let (c, s) = (30f64.to_radians().cos(), 30f64.to_radians().sin());
        let u = crate::field::FnField {
            dim: 4,
            f: move |p: &[f64]| {
                let (u1, u2) = (c * p[0] + s * p[1], -s * p[0] + c * p[1]);
                u1 * u1 - u2 * u2
            },
            grad: move |p: &[f64]| {
                let (u1, u2) = (c * p[0] + s * p[1], -s * p[0] + c * p[1]);
                vec![2.0 * (u1 * c + u2 * s), 2.0 * (u1 * s - u2 * c), 0.0, 0.0]
            },
        };
        let opts = DefectOptions { d_max: Some(2), ..Default::default() };
        let reps = symmetry_defects(&u, &[0.0; 3], 1.0, 0.0, &opts).unwrap();
        assert!(reps[2].defect < 1e-12, "{}", reps[2].defect);
        assert!(reps[3].defect > 1e-3);
    }
}
