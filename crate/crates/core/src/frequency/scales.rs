//! Good and bad scales, the Poincaré-trace ratio and the small-frequency screen.

use crate::error::{invalid, LabError, Result};
use crate::field::ScalarField;
use crate::frequency::defect::{symmetry_defects, DefectOptions};
use crate::frequency::functionals::{ball_l2, boundary_point, functionals, FrequencySettings, Normalization};
use crate::frequency::profile::{frequency_profile, FrequencyProfile};

/// Default small-frequency threshold.
pub const DEFAULT_EPS0: f64 = 0.05;

/// Per-scale defects and good/bad flags along a ladder.
#[derive(Debug, Clone)]
pub struct ScaleClassification {
    pub profile: FrequencyProfile,
    /// `defects[j][k]` for `k = 0..m−1`; `None` where the tangent map is undefined.
    pub defects: Vec<Option<Vec<f64>>>,
    /// Bad iff the rank-0 defect is at least `ε`.
    pub bad: Vec<bool>,
    pub bad_count: usize,
    /// `N(r_j) − N(r_{j+1})`; the last scale has no drop.
    pub drops: Vec<Option<f64>>,
    /// Drop threshold of the secondary classifier.
    pub delta: f64,
    /// Scales where `drop < δ` (secondary: good) but the defect says bad, or
    /// the reverse.
    pub disagreements: Vec<usize>,
}

impl ScaleClassification {
    /// Bad scales that have a successor on the ladder, i.e. bad intervals
    /// `[r_{j+1}, r_j]`; these are the scales counted by the drop inequality.
    pub fn bad_intervals(&self) -> usize {
        self.bad.iter().zip(&self.drops).filter(|(&b, d)| b && d.is_some()).count()
    }

    /// `N(r_max) − N(r_min)` over the retained ladder.
    pub fn total_drop(&self) -> f64 {
        let n = self.profile.frequencies();
        match (n.first(), n.last()) {
            (Some(a), Some(b)) => a - b,
            _ => 0.0,
        }
    }
}

/// Flags each ladder scale by its rank-0 defect.
///
/// `delta` sets the drop threshold of the secondary classifier; `None` uses
/// [`fit_delta`] on the primary flags.
#[allow(clippy::too_many_arguments)]
pub fn classify_scales(
    u: &(impl ScalarField + ?Sized),
    x: &[f64],
    eps: f64,
    ratio: f64,
    levels: usize,
    r_max: f64,
    delta: Option<f64>,
    s: &FrequencySettings,
    opts: &DefectOptions,
) -> Result<ScaleClassification> {
    if !(eps > 0.0) {
        return Err(invalid("eps", "must be positive"));
    }
    let profile = frequency_profile(u, x, r_max, ratio, levels, true, s)?;
    let m = u.dim();
    let mut defects = Vec::with_capacity(profile.len());
    for &r in &profile.radii {
        match symmetry_defects(u, x, r, s.a, opts) {
            Ok(reps) => defects.push(Some(reps[..m].iter().map(|r| r.defect).collect::<Vec<f64>>())),
            Err(LabError::ConstantAtScale) => defects.push(None),
            Err(e) => return Err(e),
        }
    }
    // a field constant at a scale is exactly symmetric there
    let bad: Vec<bool> = defects.iter().map(|d| d.as_ref().is_some_and(|d| d[0] >= eps)).collect();
    let n = profile.frequencies();
    let drops: Vec<Option<f64>> = (0..n.len()).map(|j| n.get(j + 1).map(|next| n[j] - next)).collect();
    let delta = delta.unwrap_or_else(|| fit_delta(&bad, &drops));
    let disagreements = (0..n.len())
        .filter(|&j| drops[j].is_some_and(|dr| (dr < delta) == bad[j]))
        .collect();
    let bad_count = bad.iter().filter(|&&b| b).count();
    Ok(ScaleClassification { profile, defects, bad, bad_count, drops, delta, disagreements })
}

/// Largest `δ` for which every bad scale with a recorded drop has
/// `drop ≥ δ`, i.e. the minimum drop over those scales; `+∞` if none.
pub fn fit_delta(bad: &[bool], drops: &[Option<f64>]) -> f64 {
    bad.iter()
        .zip(drops)
        .filter_map(|(&b, d)| if b { *d } else { None })
        .fold(f64::INFINITY, f64::min)
}

/// `∫_{B_r} ϱ^a U² / (r² D + r H)` with unnormalised functionals.
pub fn poincare_trace_ratio(u: &(impl ScalarField + ?Sized), x: &[f64], r: f64, s: &FrequencySettings) -> Result<f64> {
    let raw = s.clone().with_normalization(Normalization::Unnormalized);
    let f = functionals(u, x, r, &raw, None)?;
    let den = r * r * f.d + r * f.h;
    if !(den > 0.0) {
        return Err(invalid("field", "vanishes on the ball"));
    }
    Ok(ball_l2(u, x, r, &raw)? / den)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScreenStatus {
    /// Small frequency and `min |U|` on the half ball is `margin > 0`.
    NonVanishing { n: f64, margin: f64 },
    AboveThreshold { n: f64 },
    /// Small frequency but a sampled zero or sign change in the half ball.
    SmallButVanishing { n: f64, min_abs: f64 },
}

impl ScreenStatus {
    pub fn confirmed(&self) -> bool {
        matches!(self, ScreenStatus::NonVanishing { .. })
    }
}

/// Samples per axis of the half-ball lattice in [`small_frequency_screen`].
const SCREEN_LATTICE: usize = 17;

/// Screens `B_{r/2}(x)` for zeros when `r D / H ≤ ε₀` (unsubtracted `H`).
pub fn small_frequency_screen(
    u: &(impl ScalarField + ?Sized),
    x: &[f64],
    r: f64,
    eps0: f64,
    s: &FrequencySettings,
) -> Result<ScreenStatus> {
    let f = functionals(u, x, r, s, None)?;
    let n = f.n();
    if n > eps0 {
        return Ok(ScreenStatus::AboveThreshold { n });
    }
    let c = boundary_point(u, x)?;
    let m = u.dim();
    let half = 0.5 * r;
    let mut min_abs = f64::INFINITY;
    let (mut pos, mut neg) = (false, false);
    let mut idx = vec![0usize; m];
    let step = 2.0 / (SCREEN_LATTICE - 1) as f64;
    loop {
        let xi: Vec<f64> = idx.iter().map(|&i| -1.0 + i as f64 * step).collect();
        if xi.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
            let p: Vec<f64> = c.iter().zip(&xi).map(|(c, t)| c + half * t).collect();
            let v = u.value(&p);
            min_abs = min_abs.min(v.abs());
            pos |= v > 0.0;
            neg |= v < 0.0;
        }
        let mut d = 0;
        while d < m {
            idx[d] += 1;
            if idx[d] < SCREEN_LATTICE {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
        if d == m {
            break;
        }
    }
    if pos && neg || min_abs == 0.0 {
        Ok(ScreenStatus::SmallButVanishing { n, min_abs })
    } else {
        Ok(ScreenStatus::NonVanishing { n, margin: min_abs })
    }
}
