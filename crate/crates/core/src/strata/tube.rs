//! Tube volumes, Minkowski exponents and Hausdorff-content estimates.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{invalid, LabError, Result};
use crate::strata::extract::{SetExtract, Window};

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Squared distance from `p` to a point, segment or triangle.
pub fn distance_sq_to_simplex(p: &[f64], s: &[Vec<f64>]) -> f64 {
    match s.len() {
        1 => dist2(p, &s[0]),
        2 => {
            let ab = sub(&s[1], &s[0]);
            let ap = sub(p, &s[0]);
            let l = dot(&ab, &ab);
            let t = if l > 0.0 { (dot(&ap, &ab) / l).clamp(0.0, 1.0) } else { 0.0 };
            let q: Vec<f64> = s[0].iter().zip(&ab).map(|(a, d)| a + t * d).collect();
            dist2(p, &q)
        }
        3 => dist2(p, &closest_on_triangle(p, &s[0], &s[1], &s[2])),
        _ => s.iter().map(|v| dist2(p, v)).fold(f64::INFINITY, f64::min),
    }
}

/// Closest point on a triangle by Voronoi-region tests (any dimension).
fn closest_on_triangle(p: &[f64], a: &[f64], b: &[f64], c: &[f64]) -> Vec<f64> {
    let ab = sub(b, a);
    let ac = sub(c, a);
    let ap = sub(p, a);
    let lerp2 = |u: f64, v: f64| -> Vec<f64> { (0..a.len()).map(|i| a[i] + u * ab[i] + v * ac[i]).collect() };
    let d1 = dot(&ab, &ap);
    let d2 = dot(&ac, &ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a.to_vec();
    }
    let bp = sub(p, b);
    let d3 = dot(&ab, &bp);
    let d4 = dot(&ac, &bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b.to_vec();
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return lerp2(d1 / (d1 - d3), 0.0);
    }
    let cp = sub(p, c);
    let d5 = dot(&ab, &cp);
    let d6 = dot(&ac, &cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c.to_vec();
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return lerp2(0.0, d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (0..a.len()).map(|i| b[i] + w * (c[i] - b[i])).collect();
    }
    let denom = 1.0 / (va + vb + vc);
    lerp2(vb * denom, vc * denom)
}

/// Uniform bucket index over simplices for distance queries up to `reach`.
struct BucketIndex<'a> {
    size: f64,
    buckets: HashMap<Vec<i64>, Vec<usize>>,
    pieces: &'a [Vec<Vec<f64>>],
}

impl<'a> BucketIndex<'a> {
    fn new(pieces: &'a [Vec<Vec<f64>>], reach: f64) -> Self {
        let size = reach.max(f64::MIN_POSITIVE);
        let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, p) in pieces.iter().enumerate() {
            let d = p[0].len();
            let lo: Vec<i64> = (0..d).map(|k| (p.iter().map(|v| v[k]).fold(f64::INFINITY, f64::min) / size).floor() as i64).collect();
            let hi: Vec<i64> = (0..d).map(|k| (p.iter().map(|v| v[k]).fold(f64::NEG_INFINITY, f64::max) / size).floor() as i64).collect();
            let mut key = lo.clone();
            loop {
                buckets.entry(key.clone()).or_default().push(i);
                let mut k = 0;
                while k < d {
                    key[k] += 1;
                    if key[k] <= hi[k] {
                        break;
                    }
                    key[k] = lo[k];
                    k += 1;
                }
                if k == d {
                    break;
                }
            }
        }
        BucketIndex { size, buckets, pieces }
    }

    /// Distance to the nearest piece, or `∞` beyond `reach`.
    fn distance(&self, p: &[f64]) -> f64 {
        let d = p.len();
        let base: Vec<i64> = p.iter().map(|x| (x / self.size).floor() as i64).collect();
        let mut best = f64::INFINITY;
        for k in 0..3usize.pow(d as u32) {
            let mut r = k;
            let key: Vec<i64> = base
                .iter()
                .map(|b| {
                    let o = (r % 3) as i64 - 1;
                    r /= 3;
                    b + o
                })
                .collect();
            if let Some(list) = self.buckets.get(&key) {
                for &i in list {
                    best = best.min(distance_sq_to_simplex(p, &self.pieces[i]));
                }
            }
        }
        best.sqrt()
    }
}

/// Tube volumes `Vol(T_r(S) ∩ W)` and the fitted exponent of `Vol ~ r^e`.
#[derive(Debug, Clone)]
pub struct TubeVolumeCurve {
    pub radii: Vec<f64>,
    pub volumes: Vec<f64>,
    /// Slope of `log Vol` against `log r`: the Minkowski co-dimension.
    pub exponent: f64,
    /// Standard error of the slope.
    pub stderr: f64,
    pub window: Window,
    /// Spacing of the counting lattice.
    pub h: f64,
}

impl TubeVolumeCurve {
    /// `exponent ± 2 stderr`.
    pub fn band(&self) -> (f64, f64) {
        (self.exponent - 2.0 * self.stderr, self.exponent + 2.0 * self.stderr)
    }

    /// `ambient − exponent`.
    pub fn minkowski_dimension(&self) -> f64 {
        self.window.center.len() as f64 - self.exponent
    }
}

/// Least-squares line `y = c + e x`; returns `(e, c, stderr of e)`.
pub fn log_log_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let e = sxy / sxx;
    let c = my - e * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - c - e * a).powi(2)).sum();
    let se = if x.len() > 2 { (rss / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    (e, c, se)
}

/// Counts lattice cells of spacing `h` with centre in the window and within
/// distance `r` of the set's geometry; volume = count · h^dim.
pub fn tube_volume(set: &SetExtract, radii: &[f64], window: &Window, h: f64) -> Result<TubeVolumeCurve> {
    tube_volume_of(&set.pieces, radii, window, h, set.h)
}

/// [`tube_volume`] for explicit pieces; `resolution` bounds the radii below.
pub fn tube_volume_of(pieces: &[Vec<Vec<f64>>], radii: &[f64], window: &Window, h: f64, resolution: f64) -> Result<TubeVolumeCurve> {
    if pieces.is_empty() {
        return Err(invalid("set", "empty in the window"));
    }
    if radii.len() < 2 {
        return Err(invalid("radii", "need at least two radii"));
    }
    if let Some(&r) = radii.iter().find(|&&r| r < 2.0 * resolution) {
        return Err(LabError::Resolution(format!("radius {r} is below twice the set resolution {resolution}")));
    }
    let d = window.center.len();
    let r_max = radii.iter().cloned().fold(0.0, f64::max);
    let index = BucketIndex::new(pieces, r_max);
    let k = (window.radius / h).ceil() as i64;
    let side = (2 * k) as usize;
    let total = side.pow(d as u32);
    let dists: Vec<f64> = (0..total)
        .into_par_iter()
        .filter_map(|mut i| {
            let p: Vec<f64> = (0..d)
                .map(|a| {
                    let j = (i % side) as i64 - k;
                    i /= side;
                    window.center[a] + (j as f64 + 0.5) * h
                })
                .collect();
            window.contains(&p).then(|| index.distance(&p))
        })
        .collect();
    let cell = h.powi(d as i32);
    let volumes: Vec<f64> = radii.iter().map(|&r| dists.iter().filter(|&&x| x <= r).count() as f64 * cell).collect();
    if volumes.iter().any(|&v| v <= 0.0) {
        return Err(invalid("set", "tube misses every lattice cell of the window"));
    }
    let lx: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ly: Vec<f64> = volumes.iter().map(|v| v.ln()).collect();
    let (exponent, _, stderr) = log_log_fit(&lx, &ly);
    Ok(TubeVolumeCurve { radii: radii.to_vec(), volumes, exponent, stderr, window: window.clone(), h })
}

/// Greedy Vitali contents `count(s) · (2s)^d` over scales.
#[derive(Debug, Clone)]
pub struct HausdorffEstimate {
    pub d: f64,
    pub scales: Vec<f64>,
    pub counts: Vec<usize>,
    pub contents: Vec<f64>,
    /// Mean content over the three finest scales when they agree within 20 %.
    pub plateau: Option<f64>,
    /// Slope of `log content` against `log s`; near zero at the right dimension.
    pub trend: f64,
}

fn sample_piece(p: &[Vec<f64>], step: f64, out: &mut Vec<Vec<f64>>) {
    match p.len() {
        1 => out.push(p[0].clone()),
        2 => {
            let len = dist2(&p[0], &p[1]).sqrt();
            let k = (len / step).ceil().max(1.0) as usize;
            for i in 0..=k {
                let t = i as f64 / k as f64;
                out.push(p[0].iter().zip(&p[1]).map(|(a, b)| a + t * (b - a)).collect());
            }
        }
        _ => {
            let diam = p.iter().flat_map(|a| p.iter().map(move |b| dist2(a, b))).fold(0.0, f64::max).sqrt();
            let k = (diam / step).ceil().max(1.0) as usize;
            for i in 0..=k {
                for j in 0..=k - i {
                    let (u, v) = (i as f64 / k as f64, j as f64 / k as f64);
                    out.push((0..p[0].len()).map(|c| p[0][c] + u * (p[1][c] - p[0][c]) + v * (p[2][c] - p[0][c])).collect());
                }
            }
        }
    }
}

/// Greedy cover with lexicographically ordered centres: a sample point opens
/// a new ball when no chosen centre lies within `2s`.
pub fn hausdorff_estimate(set: &SetExtract, d: f64, scales: &[f64], window: Option<&Window>) -> HausdorffEstimate {
    hausdorff_estimate_of(&set.pieces, d, scales, window)
}

pub fn hausdorff_estimate_of(pieces: &[Vec<Vec<f64>>], d: f64, scales: &[f64], window: Option<&Window>) -> HausdorffEstimate {
    let mut counts = Vec::with_capacity(scales.len());
    for &s in scales {
        let mut pts = Vec::new();
        for p in pieces {
            sample_piece(p, s / 4.0, &mut pts);
        }
        if let Some(w) = window {
            pts.retain(|p| w.contains(p));
        }
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
        let mut chosen: Vec<Vec<f64>> = Vec::new();
        let mut grid: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        let size = 2.0 * s;
        for p in pts {
            let base: Vec<i64> = p.iter().map(|x| (x / size).floor() as i64).collect();
            let dim = p.len();
            let mut covered = false;
            'outer: for k in 0..3usize.pow(dim as u32) {
                let mut r = k;
                let key: Vec<i64> = base
                    .iter()
                    .map(|b| {
                        let o = (r % 3) as i64 - 1;
                        r /= 3;
                        b + o
                    })
                    .collect();
                if let Some(list) = grid.get(&key) {
                    for &i in list {
                        if dist2(&chosen[i], &p) < size * size {
                            covered = true;
                            break 'outer;
                        }
                    }
                }
            }
            if !covered {
                grid.entry(base).or_default().push(chosen.len());
                chosen.push(p);
            }
        }
        counts.push(chosen.len());
    }
    let contents: Vec<f64> = counts.iter().zip(scales).map(|(&c, &s)| c as f64 * (2.0 * s).powf(d)).collect();
    let mut order: Vec<usize> = (0..scales.len()).collect();
    order.sort_by(|&a, &b| scales[a].total_cmp(&scales[b]));
    let fine: Vec<f64> = order.iter().take(3).map(|&i| contents[i]).collect();
    let plateau = if fine.len() == 3 {
        let lo = fine.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = fine.iter().cloned().fold(0.0, f64::max);
        (lo > 0.0 && hi / lo - 1.0 <= 0.2).then(|| fine.iter().sum::<f64>() / 3.0)
    } else {
        None
    };
    let valid: Vec<(f64, f64)> = scales.iter().zip(&contents).filter(|(_, &c)| c > 0.0).map(|(&s, &c)| (s.ln(), c.ln())).collect();
    let trend = if valid.len() >= 2 {
        let (x, y): (Vec<f64>, Vec<f64>) = valid.into_iter().unzip();
        log_log_fit(&x, &y).0
    } else {
        0.0
    };
    HausdorffEstimate { d, scales: scales.to_vec(), counts, contents, plateau, trend }
}

/// CSV `r,volume` of a tube curve.
pub fn write_tube_csv(w: &mut impl std::io::Write, curve: &TubeVolumeCurve) -> Result<()> {
    writeln!(w, "r,volume")?;
    for (r, v) in curve.radii.iter().zip(&curve.volumes) {
        writeln!(w, "{r:.16e},{v:.16e}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_distance_regions() {
        let (a, b, c) = (vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]);
        let t = [a, b, c];
        assert!((distance_sq_to_simplex(&[0.2, 0.2, 1.0], &t) - 1.0).abs() < 1e-15);
        assert!((distance_sq_to_simplex(&[-1.0, -1.0, 0.0], &t) - 2.0).abs() < 1e-15);
        assert!((distance_sq_to_simplex(&[1.0, 1.0, 0.0], &t) - 0.5).abs() < 1e-15);
        assert!((distance_sq_to_simplex(&[0.5, -2.0, 0.0], &t) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn line_fit_recovers_slope() {
        let x = [0.0, 1.0, 2.0];
        let y = [1.0, 3.0, 5.0];
        let (e, c, se) = log_log_fit(&x, &y);
        assert!((e - 2.0).abs() < 1e-14 && (c - 1.0).abs() < 1e-14 && se < 1e-7);
    }
}
