//! Critical point counts of perturbed members on coordinate-plane slices.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::field::ScalarField;
use crate::poly::{solution_space_basis, FloatPoly};
use crate::strata::extract::{extract_critical, Carrier, CriticalOptions, Window};
use crate::strata::grid::{BoxGrid, GriddedField, PlaneSlice};

/// `p + δ Q` with `Q` a random combination (coefficients uniform in
/// `[−1, 1]`, then scaled to unit largest coefficient) of the even solutions
/// of degree `0..=degree` in `m = p.nvars()` variables.
pub fn perturbed_solution(p: &FloatPoly, degree: u32, delta: f64, a: f64, seed: u64) -> Result<FloatPoly> {
    let m = p.nvars();
    if m < 2 {
        return Err(invalid("p", "need at least two variables"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = FloatPoly::zero(m);
    for d in 0..=degree {
        for b in solution_space_basis(m - 1, d, a)? {
            let c: f64 = rng.gen_range(-1.0..=1.0);
            q = q.add(&b.to_float().scale(&c));
        }
    }
    let max = q.max_abs_coefficient();
    if !(max > 0.0) {
        return Ok(p.clone());
    }
    Ok(p.add(&q.scale(&(delta / max))))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SliceCount {
    pub axes: (usize, usize),
    /// Certified critical clusters of the slice within the radius.
    pub clusters: usize,
    /// Uncertified candidate cells in the slice box.
    pub uncertified: usize,
}

/// Certified critical clusters of `U` restricted to each coordinate plane
/// through `center`, counted within `radius` of `center`.
pub fn critical_count_near(u: &(impl ScalarField + ?Sized), center: &[f64], radius: f64, h: f64, offset: f64) -> Result<Vec<SliceCount>> {
    let m = u.dim();
    if center.len() != m {
        return Err(invalid("center", "dimension differs from the field"));
    }
    let window = Window::ball(vec![0.0, 0.0], radius);
    let mut out = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let slice = PlaneSlice { field: u, base: center.to_vec(), axes: (i, j) };
            let grid = BoxGrid::centered(2, radius + 3.0 * h, h, offset)?;
            let f = GriddedField::sample(&slice, grid)?;
            let c = extract_critical(&f, Carrier::Ambient, &CriticalOptions::default())?;
            out.push(SliceCount { axes: (i, j), clusters: c.clusters_in(&window), uncertified: c.uncertified.len() });
        }
    }
    Ok(out)
}
