//! Frequency profiles over geometric scale ladders and their diagnostics.

use crate::error::{invalid, LabError, Result};
use crate::field::ScalarField;
use crate::frequency::functionals::{boundary_point, functional_h, functionals, FrequencySettings, Normalization};

/// Relative step of the centred difference for `d log H / dr`.
const LOG_DERIVATIVE_STEP: f64 = 1e-3;
/// Minimal log-step span in grid cells for resolved fields.
const LOG_DERIVATIVE_CELLS: f64 = 4.0;

/// Smallest usable radius in grid spacings.
pub const MIN_RADIUS_IN_CELLS: f64 = 10.0;

/// Functionals along `r_j = r_max ratio^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyProfile {
    pub center: Vec<f64>,
    pub radii: Vec<f64>,
    pub h: Vec<f64>,
    pub d: Vec<f64>,
    pub i: Vec<f64>,
    /// `U(x₊)` when the normalised variant was requested.
    pub subtracted: Option<f64>,
    pub normalization: Normalization,
    /// Weight exponent and dimension, needed by the doubling identity.
    pub a: f64,
    pub m: usize,
    /// `d log H / dr` of the unnormalised `H` by a centred difference.
    pub log_derivative: Vec<f64>,
    /// `|N − N_coarse|` with a rule of half the exactness degree.
    pub error_estimates: Vec<f64>,
    /// Requested scales dropped because `r < 10 h`.
    pub truncated: usize,
}

impl FrequencyProfile {
    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// `N(r_j) = r_j I_j / H_j`.
    pub fn n(&self, j: usize) -> f64 {
        self.radii[j] * self.i[j] / self.h[j]
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.n(j)).collect()
    }
}

/// Evaluates the functionals along the ladder `r_max ratio^j`, `j = 0..levels`.
///
/// Sampled fields drop scales below ten grid spacings; the count is recorded
/// in [`FrequencyProfile::truncated`].
pub fn frequency_profile(
    u: &(impl ScalarField + ?Sized),
    x: &[f64],
    r_max: f64,
    ratio: f64,
    levels: usize,
    normalized: bool,
    s: &FrequencySettings,
) -> Result<FrequencyProfile> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(invalid("ratio", format!("ladder ratio must lie in (0, 1), got {ratio}")));
    }
    if !(r_max > 0.0) {
        return Err(invalid("r_max", "must be positive"));
    }
    let center = boundary_point(u, x)?;
    let r_min = u.resolution().map_or(0.0, |h| MIN_RADIUS_IN_CELLS * h);
    let all: Vec<f64> = (0..=levels).map(|j| r_max * ratio.powi(j as i32)).collect();
    let radii: Vec<f64> = all.iter().copied().filter(|&r| r >= r_min * (1.0 - 1e-12)).collect();
    let truncated = all.len() - radii.len();
    let subtracted = normalized.then(|| u.value(&center));
    let coarse = s.clone().with_order((s.order / 2).max(4));
    let raw = s.clone().with_normalization(Normalization::Unnormalized);
    let mut p = FrequencyProfile {
        center: center.clone(),
        radii: Vec::new(),
        h: Vec::new(),
        d: Vec::new(),
        i: Vec::new(),
        subtracted,
        normalization: s.normalization,
        a: s.a,
        m: s.m(),
        log_derivative: Vec::new(),
        error_estimates: Vec::new(),
        truncated,
    };
    for &r in &radii {
        let f = functionals(u, &center, r, s, subtracted)?;
        if !(f.h > 0.0) {
            return Err(LabError::ConstantAtScale);
        }
        let fc = functionals(u, &center, r, &coarse, subtracted)?;
        // symmetric in log r, exact for powers of r; resolved fields use a step
        // of a few cells so the difference does not see the interpolation error
        let step = u.resolution().map_or(LOG_DERIVATIVE_STEP, |h| LOG_DERIVATIVE_STEP.max(LOG_DERIVATIVE_CELLS * h / r));
        let (rp, rm) = (r * step.exp(), r * (-step).exp());
        // the outer evaluation may leave the box at r_max; fall back to one side
        let hp = functional_h(u, &center, rp, &raw, subtracted);
        let hm = functional_h(u, &center, rm, &raw, subtracted)?;
        let h0 = functional_h(u, &center, r, &raw, subtracted)?;
        let dlog = match hp {
            Ok(hp) => (hp.ln() - hm.ln()) / (2.0 * step * r),
            Err(_) => (h0.ln() - hm.ln()) / (step * r),
        };
        p.radii.push(r);
        p.h.push(f.h);
        p.d.push(f.d);
        p.i.push(f.i);
        p.log_derivative.push(dlog);
        p.error_estimates.push((f.n() - fc.n()).abs());
    }
    Ok(p)
}

/// Scale pairs where the frequency decreases as `r` grows.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    /// `(j, j + 1, N(r_{j+1}) − N(r_j))` for every violating adjacent pair.
    pub violations: Vec<(usize, usize, f64)>,
    /// Largest `N(r_{j+1}) − N(r_j)` over all pairs (may be negative).
    pub max_drop: f64,
}

/// Checks `N(r_j) ≥ N(r_{j+1}) − tol` along a decreasing ladder.
pub fn monotonicity_report(profile: &FrequencyProfile, tol: f64) -> MonotonicityReport {
    monotonicity_of(&profile.frequencies(), tol)
}

/// [`monotonicity_report`] on raw frequency values ordered by decreasing radius.
pub fn monotonicity_of(n: &[f64], tol: f64) -> MonotonicityReport {
    let mut violations = Vec::new();
    let mut max_drop = f64::NEG_INFINITY;
    for j in 0..n.len().saturating_sub(1) {
        let rise = n[j + 1] - n[j];
        max_drop = max_drop.max(rise);
        if rise > tol {
            violations.push((j, j + 1, rise));
        }
    }
    MonotonicityReport { violations, max_drop }
}

/// Smallest `C ≥ 0` making `e^{C r} N(r)` nondecreasing on the ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct AlmostMonotonicity {
    pub c_star: f64,
    /// `max(0, −Δ log N / Δr)` per adjacent pair; `None` where `N ≤ 0`.
    pub contributions: Vec<Option<f64>>,
}

pub fn almost_monotonicity_fit(profile: &FrequencyProfile) -> AlmostMonotonicity {
    let n = profile.frequencies();
    let r = &profile.radii;
    let contributions: Vec<Option<f64>> = (0..n.len().saturating_sub(1))
        .map(|j| {
            if n[j] > 0.0 && n[j + 1] > 0.0 {
                // r_j > r_{j+1}; need log N(r_j) − log N(r_{j+1}) ≥ −C (r_j − r_{j+1})
                let rate = -(n[j].ln() - n[j + 1].ln()) / (r[j] - r[j + 1]);
                Some(rate.max(0.0))
            } else {
                None
            }
        })
        .collect();
    let c_star = contributions.iter().flatten().fold(0.0, |a: f64, &b| a.max(b));
    AlmostMonotonicity { c_star, contributions }
}

/// Doubling ratios and residuals of `H'/H = (m − 1 + a)/r + 2N/r`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoublingReport {
    /// `(j, H(r_j) / H(r_{j+1}))` for ladder pairs with `r_j = 2 r_{j+1}`.
    pub ratios: Vec<(usize, f64)>,
    /// `r |d log H/dr − (m − 1 + a)/r − 2N/r|` per scale.
    pub identity_residuals: Vec<f64>,
}

pub fn doubling_report(profile: &FrequencyProfile) -> DoublingReport {
    let r = &profile.radii;
    let ratios = (0..r.len().saturating_sub(1))
        .filter(|&j| (r[j] / r[j + 1] - 2.0).abs() < 1e-9)
        .map(|j| (j, profile.h[j] / profile.h[j + 1]))
        .collect();
    let dim = profile.m as f64 - 1.0 + profile.a;
    let identity_residuals = (0..r.len())
        .map(|j| (r[j] * profile.log_derivative[j] - dim - 2.0 * profile.n(j)).abs())
        .collect();
    DoublingReport { ratios, identity_residuals }
}
