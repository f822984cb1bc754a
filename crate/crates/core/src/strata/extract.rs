//! Nodal, critical and singular sets of gridded fields with per-cell certificates.

use std::collections::{BTreeSet, HashMap};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::strata::grid::GriddedField;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetKind {
    Nodal,
    Critical,
    Singular,
}

/// Where the field lives: the full space `R^m` or the boundary `R^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Carrier {
    Ambient,
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certificate {
    /// Corner values of the interpolant take both signs.
    SignChange,
    /// Poincaré–Miranda: every gradient component has opposite signs on a
    /// pair of opposite faces (non-strict), so the multilinear gradient
    /// interpolant vanishes in the closed cell.
    Miranda,
    /// Nonzero winding number of the gradient around the cell's cluster (2D).
    Winding(i32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetCell {
    pub cell: usize,
    pub certificate: Certificate,
    /// Point estimate of the set inside the cell.
    pub point: Vec<f64>,
}

/// Ball window `B_radius(center)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Window {
    pub fn ball(center: Vec<f64>, radius: f64) -> Self {
        Window { center, radius }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter().zip(&self.center).map(|(a, b)| (a - b).powi(2)).sum::<f64>() <= self.radius * self.radius
    }
}

#[derive(Debug, Clone)]
pub struct SetExtract {
    pub kind: SetKind,
    pub carrier: Carrier,
    pub dim: usize,
    pub h: f64,
    pub cells: Vec<SetCell>,
    /// Candidate cells whose cluster carries no certificate.
    pub uncertified: Vec<SetCell>,
    /// Indices into `cells` of connected components (vertex adjacency).
    pub clusters: Vec<Vec<usize>>,
    /// Geometric representation: simplices (zero sets on Kuhn simplices) for
    /// nodal sets, one point per cell otherwise.
    pub pieces: Vec<Vec<Vec<f64>>>,
}

impl SetExtract {
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell_set(&self) -> BTreeSet<usize> {
        self.cells.iter().map(|c| c.cell).collect()
    }

    /// `H^{dim−1}` of the nodal pieces whose centroid lies in the window.
    pub fn measure_in(&self, w: &Window) -> f64 {
        self.pieces
            .iter()
            .filter(|p| w.contains(&centroid(p)))
            .map(|p| simplex_measure(p))
            .sum()
    }

    /// Clusters with at least one cell point inside the window.
    pub fn clusters_in(&self, w: &Window) -> usize {
        self.clusters.iter().filter(|c| c.iter().any(|&i| w.contains(&self.cells[i].point))).count()
    }
}

pub(crate) fn centroid(p: &[Vec<f64>]) -> Vec<f64> {
    let k = p.len() as f64;
    (0..p[0].len()).map(|i| p.iter().map(|v| v[i]).sum::<f64>() / k).collect()
}

/// `(k−1)`-dimensional volume of a simplex with `k` vertices (1 for a point).
pub fn simplex_measure(p: &[Vec<f64>]) -> f64 {
    let k = p.len();
    if k == 1 {
        return 1.0;
    }
    let edges: Vec<Vec<f64>> = p[1..].iter().map(|v| v.iter().zip(&p[0]).map(|(a, b)| a - b).collect()).collect();
    let gram = DMatrix::from_fn(k - 1, k - 1, |i, j| edges[i].iter().zip(&edges[j]).map(|(a, b)| a * b).sum::<f64>());
    let fact: f64 = (1..k).map(|i| i as f64).product();
    gram.determinant().max(0.0).sqrt() / fact
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    if d == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(d - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, d - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Zero set of the linear interpolant on one simplex (`v ≥ 0` counts as positive).
fn simplex_zero_set(verts: &[Vec<f64>], vals: &[f64]) -> Vec<Vec<Vec<f64>>> {
    let neg: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] < 0.0).collect();
    let pos: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] >= 0.0).collect();
    if neg.is_empty() || pos.is_empty() {
        return Vec::new();
    }
    let cut = |a: usize, b: usize| -> Vec<f64> {
        let t = vals[a] / (vals[a] - vals[b]);
        verts[a].iter().zip(&verts[b]).map(|(x, y)| x + t * (y - x)).collect()
    };
    match (neg.len(), pos.len()) {
        (1, _) => vec![pos.iter().map(|&p| cut(neg[0], p)).collect()],
        (_, 1) => vec![neg.iter().map(|&q| cut(q, pos[0])).collect()],
        (2, 2) => {
            let (a, b, c, d) = (neg[0], neg[1], pos[0], pos[1]);
            let (ac, ad, bd, bc) = (cut(a, c), cut(a, d), cut(b, d), cut(b, c));
            vec![vec![ac.clone(), ad, bd.clone()], vec![ac, bd, bc]]
        }
        _ => Vec::new(),
    }
}

/// Marching-simplices extraction of `{U = 0}` (dimensions 1 to 3).
pub fn extract_nodal(f: &GriddedField, carrier: Carrier) -> Result<SetExtract> {
    let g = &f.grid;
    let d = g.dim();
    if d > 3 {
        return Err(crate::error::invalid("field", "nodal extraction supports dimensions 1 to 3"));
    }
    let perms = permutations(d);
    let per_cell: Vec<Option<(SetCell, Vec<Vec<Vec<f64>>>)>> = (0..g.num_cells())
        .into_par_iter()
        .map(|c| {
            let cell = g.cell_multi(c);
            let corners = g.cell_corners(&cell);
            let vals: Vec<f64> = corners.iter().map(|&n| f.values[n]).collect();
            let any_neg = vals.iter().any(|&v| v < 0.0);
            let any_pos = vals.iter().any(|&v| v >= 0.0);
            if !(any_neg && any_pos) {
                return None;
            }
            let base = g.coords(&cell);
            let mut pieces = Vec::new();
            for p in &perms {
                let mut bits = 0usize;
                let mut ids = vec![0usize];
                for &axis in p {
                    bits |= 1 << axis;
                    ids.push(bits);
                }
                let verts: Vec<Vec<f64>> = ids
                    .iter()
                    .map(|&b| (0..d).map(|i| base[i] + g.h * ((b >> i) & 1) as f64).collect())
                    .collect();
                let sv: Vec<f64> = ids.iter().map(|&b| vals[b]).collect();
                pieces.extend(simplex_zero_set(&verts, &sv));
            }
            let point = if pieces.is_empty() { g.cell_center(&cell) } else { centroid(&pieces.iter().map(|p| centroid(p)).collect::<Vec<_>>()) };
            Some((SetCell { cell: c, certificate: Certificate::SignChange, point }, pieces))
        })
        .collect();
    let mut cells = Vec::new();
    let mut pieces = Vec::new();
    for (c, p) in per_cell.into_iter().flatten() {
        cells.push(c);
        pieces.extend(p);
    }
    let clusters = clusters_of(f, &cells);
    Ok(SetExtract { kind: SetKind::Nodal, carrier, dim: d, h: g.h, cells, uncertified: Vec::new(), clusters, pieces })
}

/// Connected components of a cell list under vertex adjacency.
fn clusters_of(f: &GriddedField, cells: &[SetCell]) -> Vec<Vec<usize>> {
    let g = &f.grid;
    let d = g.dim();
    let pos: HashMap<usize, usize> = cells.iter().enumerate().map(|(i, c)| (c.cell, i)).collect();
    let mut parent: Vec<usize> = (0..cells.len()).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let offsets: Vec<Vec<i64>> = (0..3usize.pow(d as u32))
        .map(|mut k| {
            (0..d)
                .map(|_| {
                    let o = (k % 3) as i64 - 1;
                    k /= 3;
                    o
                })
                .collect()
        })
        .filter(|o: &Vec<i64>| o.iter().any(|&x| x != 0))
        .collect();
    for (i, c) in cells.iter().enumerate() {
        let m = g.cell_multi(c.cell);
        for o in &offsets {
            let nb: Option<Vec<usize>> = m
                .iter()
                .zip(o)
                .zip(&g.counts)
                .map(|((&x, &dx), &n)| {
                    let y = x as i64 + dx;
                    (y >= 0 && y < n as i64 - 1).then_some(y as usize)
                })
                .collect();
            if let Some(nb) = nb {
                if let Some(&j) = pos.get(&g.cell_index(&nb)) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..cells.len() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Largest gradient jump along a grid edge times the dimension: a zero of
/// the gradient in a cell forces `|∇U| ≤` this value at every corner.
pub fn gradient_floor(f: &GriddedField) -> f64 {
    let g = &f.grid;
    let d = g.dim();
    (0..g.num_nodes())
        .into_par_iter()
        .map(|n| {
            let idx = g.node_multi(n);
            let mut worst: f64 = 0.0;
            for i in 0..d {
                if idx[i] + 1 < g.counts[i] {
                    let mut j = idx.clone();
                    j[i] += 1;
                    let m = g.node_index(&j);
                    let jump = f.gradient(n).iter().zip(f.gradient(m)).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                    worst = worst.max(jump);
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
        * d as f64
}

fn miranda(grads: &[&[f64]], d: usize) -> bool {
    // face sign of component `comp` on face `axis = side`
    let face = |comp: usize, axis: usize, side: usize| -> (bool, bool) {
        let mut nonpos = true;
        let mut nonneg = true;
        for (b, g) in grads.iter().enumerate() {
            if (b >> axis) & 1 == side {
                nonpos &= g[comp] <= 0.0;
                nonneg &= g[comp] >= 0.0;
            }
        }
        (nonpos, nonneg)
    };
    permutations(d).iter().any(|perm| {
        (0..d).all(|comp| {
            let axis = perm[comp];
            let (lo_np, lo_nn) = face(comp, axis, 0);
            let (hi_np, hi_nn) = face(comp, axis, 1);
            (lo_np && hi_nn) || (lo_nn && hi_np)
        })
    })
}

/// Newton iteration for a zero of the multilinear gradient interpolant in
/// local coordinates `t ∈ [0, 1]^d`, clamped to the cell.
fn newton_point(grads: &[&[f64]], d: usize) -> Vec<f64> {
    let eval = |t: &[f64]| -> (DVector<f64>, DMatrix<f64>) {
        let mut gv = DVector::zeros(d);
        let mut jac = DMatrix::zeros(d, d);
        for (b, g) in grads.iter().enumerate() {
            let w: Vec<f64> = (0..d).map(|i| if (b >> i) & 1 == 1 { t[i] } else { 1.0 - t[i] }).collect();
            let wt: f64 = w.iter().product();
            for c in 0..d {
                gv[c] += wt * g[c];
            }
            for i in 0..d {
                let dw: f64 = (0..d)
                    .map(|l| if l == i { if (b >> i) & 1 == 1 { 1.0 } else { -1.0 } } else { w[l] })
                    .product();
                for c in 0..d {
                    jac[(c, i)] += dw * g[c];
                }
            }
        }
        (gv, jac)
    };
    let mut t = vec![0.5; d];
    for _ in 0..30 {
        let (gv, jac) = eval(&t);
        let svd = jac.svd(true, true);
        let tol = 1e-10 * svd.singular_values.max().max(f64::MIN_POSITIVE);
        let Ok(step) = svd.solve(&gv, tol) else { break };
        let mut moved = 0.0f64;
        for i in 0..d {
            let nt = (t[i] - step[i]).clamp(0.0, 1.0);
            moved = moved.max((nt - t[i]).abs());
            t[i] = nt;
        }
        if moved < 1e-12 {
            break;
        }
    }
    t
}

/// Winding number of the gradient along the boundary of the node box
/// `[lo, hi]` (2D), `None` if the piecewise-linear boundary image meets 0.
fn winding(f: &GriddedField, lo: [usize; 2], hi: [usize; 2]) -> Option<i32> {
    let g = &f.grid;
    let mut path = Vec::new();
    for i in lo[0]..hi[0] {
        path.push([i, lo[1]]);
    }
    for j in lo[1]..hi[1] {
        path.push([hi[0], j]);
    }
    for i in (lo[0] + 1..=hi[0]).rev() {
        path.push([i, hi[1]]);
    }
    for j in (lo[1] + 1..=hi[1]).rev() {
        path.push([lo[0], j]);
    }
    let mut total = 0.0;
    for k in 0..path.len() {
        let a = f.gradient(g.node_index(&path[k]));
        let b = f.gradient(g.node_index(&path[(k + 1) % path.len()]));
        let cross = a[0] * b[1] - a[1] * b[0];
        let dot = a[0] * b[0] + a[1] * b[1];
        if (a[0] == 0.0 && a[1] == 0.0) || (cross == 0.0 && dot <= 0.0) {
            return None;
        }
        total += cross.atan2(dot);
    }
    Some((total / std::f64::consts::TAU).round() as i32)
}

/// Options of [`extract_critical`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CriticalOptions {
    /// Keep only cells with `min_corner |∇U| < τ`; `None` disables the prefilter.
    pub tau: Option<f64>,
}

/// Cells containing a certified zero of the gradient.
///
/// Candidates have a sign change (or zero) in every gradient component over
/// the corners. A candidate cluster is certified if one of its cells passes
/// the Poincaré–Miranda test, in which case those cells are reported, or (in
/// 2D) if the gradient winds around the cluster, in which case all its cells
/// are reported.
pub fn extract_critical(f: &GriddedField, carrier: Carrier, opts: &CriticalOptions) -> Result<SetExtract> {
    let g = &f.grid;
    let d = g.dim();
    if let Some(tau) = opts.tau {
        let floor = gradient_floor(f);
        if tau < floor {
            return Err(LabError::Resolution(format!("critical threshold {tau:e} is below the discretization floor {floor:e}")));
        }
    }
    let candidates: Vec<(SetCell, bool)> = (0..g.num_cells())
        .into_par_iter()
        .filter_map(|c| {
            let cell = g.cell_multi(c);
            let corners = g.cell_corners(&cell);
            let grads: Vec<&[f64]> = corners.iter().map(|&n| f.gradient(n)).collect();
            let changes = (0..d).all(|k| {
                let lo = grads.iter().map(|v| v[k]).fold(f64::INFINITY, f64::min);
                let hi = grads.iter().map(|v| v[k]).fold(f64::NEG_INFINITY, f64::max);
                lo <= 0.0 && hi >= 0.0
            });
            if !changes {
                return None;
            }
            if let Some(tau) = opts.tau {
                let small = grads.iter().any(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt() < tau);
                if !small {
                    return None;
                }
            }
            let t = newton_point(&grads, d);
            let point = cell.iter().zip(&g.lo).zip(&t).map(|((&i, l), ti)| l + (i as f64 + ti) * g.h).collect();
            let pm = miranda(&grads, d);
            Some((SetCell { cell: c, certificate: if pm { Certificate::Miranda } else { Certificate::SignChange }, point }, pm))
        })
        .collect();
    let all: Vec<SetCell> = candidates.iter().map(|(c, _)| c.clone()).collect();
    let groups = clusters_of(f, &all);
    let mut cells = Vec::new();
    let mut uncertified = Vec::new();
    for grp in groups {
        if grp.iter().any(|&i| candidates[i].1) {
            cells.extend(grp.iter().filter(|&&i| candidates[i].1).map(|&i| all[i].clone()));
            continue;
        }
        let w = if d == 2 { cluster_winding(f, &grp.iter().map(|&i| all[i].cell).collect::<Vec<_>>()) } else { None };
        match w {
            Some(w) if w != 0 => cells.extend(grp.iter().map(|&i| SetCell { certificate: Certificate::Winding(w), ..all[i].clone() })),
            _ => uncertified.extend(grp.iter().map(|&i| all[i].clone())),
        }
    }
    cells.sort_by_key(|c| c.cell);
    let clusters = clusters_of(f, &cells);
    let pieces = cells.iter().map(|c| vec![c.point.clone()]).collect();
    Ok(SetExtract { kind: SetKind::Critical, carrier, dim: d, h: g.h, cells, uncertified, clusters, pieces })
}

fn cluster_winding(f: &GriddedField, cells: &[usize]) -> Option<i32> {
    let g = &f.grid;
    let mut lo = [usize::MAX; 2];
    let mut hi = [0usize; 2];
    for &c in cells {
        let m = g.cell_multi(c);
        for i in 0..2 {
            lo[i] = lo[i].min(m[i]);
            hi[i] = hi[i].max(m[i]);
        }
    }
    if lo[0] == 0 || lo[1] == 0 || hi[0] + 2 >= g.counts[0] || hi[1] + 2 >= g.counts[1] {
        return None;
    }
    winding(f, [lo[0] - 1, lo[1] - 1], [hi[0] + 2, hi[1] + 2])
}

/// Certified critical cells on which `U` vanishes up to the resolution: the
/// corner values change sign, or the trapezoidal estimate of `U` at the
/// critical point (exact for quadratics) is within the cell's variation.
pub fn extract_singular(f: &GriddedField, carrier: Carrier, opts: &CriticalOptions) -> Result<SetExtract> {
    let crit = extract_critical(f, carrier, opts)?;
    let g = &f.grid;
    let d = g.dim();
    let keep = |c: &SetCell| -> bool {
        let corners = g.cell_corners(&g.cell_multi(c.cell));
        let vals: Vec<f64> = corners.iter().map(|&n| f.values[n]).collect();
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if lo <= 0.0 && hi >= 0.0 {
            return true;
        }
        let est = corners
            .iter()
            .map(|&n| {
                let x = g.coords(&g.node_multi(n));
                f.values[n] + 0.5 * (0..d).map(|i| f.gradient(n)[i] * (c.point[i] - x[i])).sum::<f64>()
            })
            .sum::<f64>()
            / corners.len() as f64;
        let var = vals.iter().map(|v| (v - est).abs()).fold(0.0, f64::max);
        est.abs() <= var
    };
    let cells: Vec<SetCell> = crit.cells.into_iter().filter(keep).collect();
    let clusters = clusters_of(f, &cells);
    let pieces = cells.iter().map(|c| vec![c.point.clone()]).collect();
    Ok(SetExtract { kind: SetKind::Singular, carrier, dim: d, h: g.h, cells, uncertified: crit.uncertified, clusters, pieces })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FnField;
    use crate::strata::grid::BoxGrid;

    fn sample(dim: usize, h: f64, offset: f64, f: impl Fn(&[f64]) -> f64 + Sync, g: impl Fn(&[f64]) -> Vec<f64> + Sync) -> GriddedField {
        GriddedField::sample(&FnField { dim, f, grad: g }, BoxGrid::centered(dim, 1.0, h, offset).unwrap()).unwrap()
    }

    #[test]
    fn kuhn_triangulation_has_d_factorial_simplices() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(1), vec![vec![0]]);
    }

    #[test]
    fn constant_field_has_empty_sets() {
        let f = sample(2, 0.1, 0.0, |_| 1.0, |_| vec![0.0, 0.0]);
        assert!(extract_nodal(&f, Carrier::Boundary).unwrap().is_empty());
        assert!(extract_singular(&f, Carrier::Boundary, &CriticalOptions::default()).unwrap().is_empty());
    }

    #[test]
    fn saddle_has_one_certified_critical_cluster() {
        let f = sample(2, 1.0 / 32.0, 0.37, |p| p[0] * p[0] - p[1] * p[1], |p| vec![2.0 * p[0], -2.0 * p[1]]);
        let c = extract_critical(&f, Carrier::Boundary, &CriticalOptions::default()).unwrap();
        assert_eq!(c.clusters.len(), 1);
        assert!(c.cells.iter().all(|x| x.certificate == Certificate::Miranda));
        for x in &c.cells {
            assert!(x.point.iter().all(|v| v.abs() < 1e-12), "{:?}", x.point);
        }
        let s = extract_singular(&f, Carrier::Boundary, &CriticalOptions::default()).unwrap();
        assert_eq!(s.clusters.len(), 1);
    }

    #[test]
    fn monkey_saddle_is_certified_by_winding() {
        // x³ − 3xy², gradient 3(x² − y², −2xy), index −2
        let f = sample(2, 1.0 / 16.0, 0.0, |p| p[0].powi(3) - 3.0 * p[0] * p[1] * p[1], |p| {
            vec![3.0 * (p[0] * p[0] - p[1] * p[1]), -6.0 * p[0] * p[1]]
        });
        let c = extract_critical(&f, Carrier::Boundary, &CriticalOptions::default()).unwrap();
        assert_eq!(c.clusters.len(), 1);
        assert!(c.cells.iter().any(|x| matches!(x.certificate, Certificate::Miranda | Certificate::Winding(-2))));
    }

    #[test]
    fn threshold_below_floor_is_rejected() {
        let f = sample(2, 0.1, 0.0, |p| p[0] * p[0], |p| vec![2.0 * p[0], 0.0]);
        assert!(matches!(
            extract_critical(&f, Carrier::Boundary, &CriticalOptions { tau: Some(1e-6) }),
            Err(LabError::Resolution(_))
        ));
        assert!(extract_critical(&f, Carrier::Boundary, &CriticalOptions { tau: Some(1.0) }).is_ok());
    }

    #[test]
    fn simplex_measures() {
        assert_eq!(simplex_measure(&[vec![0.0, 0.0], vec![3.0, 4.0]]), 5.0);
        let t = simplex_measure(&[vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]);
        assert!((t - 0.5).abs() < 1e-15);
    }
}
