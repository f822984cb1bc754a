//! Recursive good/bad covering of a sampled quantitative stratum.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{invalid, LabError, Result};
use crate::field::ScalarField;
use crate::frequency::{symmetry_defects_from, DefectOptions};
use crate::strata::extract::Window;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `(0, ε)`-symmetric at the ball's scale; children cover the tube around `V^k`.
    Good,
    /// Not `(0, ε)`-symmetric; children cover every stratum point in the ball.
    Bad,
    /// Good, but some stratum points of the ball lie outside the tube; covered as bad.
    Escaped,
}

impl Branch {
    pub fn is_bad(self) -> bool {
        self != Branch::Good
    }

    pub fn tag(self) -> &'static str {
        match self {
            Branch::Good => "good",
            Branch::Bad => "bad",
            Branch::Escaped => "escaped",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverBall {
    pub level: usize,
    pub center: Vec<f64>,
    pub radius: f64,
    pub parent: Option<usize>,
    /// Branch taken at this ball; `None` for leaves.
    pub branch: Option<Branch>,
    /// Rank-0 defect at (center, radius); `None` for leaves or constant fields.
    pub defect: Option<f64>,
    /// Indices into the next level.
    pub children: Vec<usize>,
    /// Branches of the ancestors, root first.
    pub labels: Vec<Branch>,
    /// Stratum points assigned to the ball.
    pub points: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverOptions {
    pub k: usize,
    pub eps: f64,
    pub mu: f64,
    pub levels: usize,
    pub defect: DefectOptions,
    /// Declared branch constants; measured values are used when absent.
    pub c0: Option<f64>,
    pub c1: Option<f64>,
}

impl CoverOptions {
    pub fn new(k: usize, levels: usize) -> Self {
        CoverOptions { k, eps: 1e-2, mu: 0.25, levels, defect: DefectOptions::default(), c0: None, c1: None }
    }
}

#[derive(Debug, Clone)]
pub struct StratumCover {
    pub k: usize,
    pub eps: f64,
    pub mu: f64,
    pub j: usize,
    pub n: usize,
    pub root: Window,
    pub points: Vec<Vec<f64>>,
    pub levels: Vec<Vec<CoverBall>>,
    /// Largest child counts over good and bad balls.
    pub max_good_children: usize,
    pub max_bad_children: usize,
    /// Constants in force: declared or `max children · μ^k` (good), `· μ^{n+1}` (bad).
    pub c0: f64,
    pub c1: f64,
    /// Largest number of bad labels on a root-to-leaf path.
    pub d: usize,
}

impl StratumCover {
    pub fn leaves(&self) -> &[CoverBall] {
        self.levels.last().map(|l| l.as_slice()).unwrap_or(&[])
    }

    pub fn leaf_radius(&self) -> f64 {
        self.root.radius * self.mu.powi(self.j as i32)
    }

    pub fn good_bound(&self) -> f64 {
        self.c0 * self.mu.powi(-(self.k as i32))
    }

    pub fn bad_bound(&self) -> f64 {
        self.c1 * self.mu.powi(-(self.n as i32 + 1))
    }

    /// `(C₁ μ^{−(n+1)})^D (C₀ μ^{−k})^{j−D}`.
    pub fn leaf_bound(&self) -> f64 {
        self.bad_bound().powi(self.d as i32) * self.good_bound().max(1.0).powi((self.j - self.d.min(self.j)) as i32)
    }

    /// Every stratum point lies in some leaf ball.
    pub fn covers_all_points(&self) -> bool {
        if self.j > 0 && self.levels.len() <= self.j {
            return self.points.is_empty();
        }
        self.points.iter().all(|p| self.leaves().iter().any(|b| dist(p, &b.center) <= b.radius))
    }

    /// Child counts of every ball obey the branch bounds.
    pub fn counts_respect_bounds(&self) -> bool {
        let tol = 1.0 + 1e-12;
        self.levels.iter().flatten().all(|b| match b.branch {
            Some(Branch::Good) => b.children.len() as f64 <= self.good_bound() * tol,
            Some(_) => b.children.len() as f64 <= self.bad_bound() * tol,
            None => true,
        })
    }

    /// One line per ball: `level center... radius branch_type children`.
    pub fn write_tree(&self, w: &mut impl Write) -> Result<()> {
        for b in self.levels.iter().flatten() {
            let c: Vec<String> = b.center.iter().map(|v| format!("{v:.16e}")).collect();
            let tag = b.branch.map(|t| t.tag()).unwrap_or("leaf");
            writeln!(w, "{} {} {:.16e} {} {}", b.level, c.join(" "), b.radius, tag, b.children.len())?;
        }
        Ok(())
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Boundary parts of the subspace vectors, orthonormalised.
fn boundary_basis(subspace: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in subspace {
        let mut w: Vec<f64> = v[..n].to_vec();
        for b in &out {
            let d: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
            w.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            out.push(w.into_iter().map(|x| x / norm).collect());
        }
    }
    out
}

fn distance_to_affine(p: &[f64], c: &[f64], basis: &[Vec<f64>]) -> f64 {
    let mut w: Vec<f64> = p.iter().zip(c).map(|(x, y)| x - y).collect();
    for b in basis {
        let d: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
        w.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
    }
    w.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Greedy cover of `members` (lexicographic order) by balls of radius `s`
/// centred at members; returns `(center point, assigned points)` per ball.
fn greedy_children(points: &[Vec<f64>], members: &[usize], s: f64) -> Vec<(usize, Vec<usize>)> {
    let mut order = members.to_vec();
    order.sort_by(|&a, &b| points[a].partial_cmp(&points[b]).expect("finite coordinates").then(a.cmp(&b)));
    let mut out: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in order {
        match out.iter_mut().find(|(c, _)| dist(&points[*c], &points[i]) <= s) {
            Some((_, list)) => list.push(i),
            None => out.push((i, vec![i])),
        }
    }
    out
}

/// Builds the cover of the stratum points in `root` down to level `j`.
///
/// A ball of level `ℓ` has radius `R μ^ℓ` (`R` the root radius) and is
/// classified by the rank-0 defect at its centre and radius. Children have
/// radius `μ` times the parent's and are centred at stratum points: all
/// points of the ball for a bad branch, only those within `ρμ/10` of
/// `c + V^k` for a good branch (`V^k` from the same report, restricted to the
/// boundary). A good ball with points outside the tube is relabelled
/// [`Branch::Escaped`] and treated as bad.
pub fn effective_cover(
    u: &(impl ScalarField + ?Sized),
    points: &[Vec<f64>],
    root: &Window,
    a: f64,
    opts: &CoverOptions,
) -> Result<StratumCover> {
    let m = u.dim();
    let n = m - 1;
    if root.center.len() != n {
        return Err(invalid("root", "centre must lie on the boundary R^n"));
    }
    if !(opts.mu > 0.0 && opts.mu < 1.0) {
        return Err(invalid("mu", "must lie in (0, 1)"));
    }
    if opts.k > n {
        return Err(invalid("k", "rank exceeds the boundary dimension"));
    }
    let inside: Vec<usize> = (0..points.len()).filter(|&i| root.contains(&points[i])).collect();
    let mut levels: Vec<Vec<CoverBall>> = vec![vec![CoverBall {
        level: 0,
        center: root.center.clone(),
        radius: root.radius,
        parent: None,
        branch: None,
        defect: None,
        children: Vec::new(),
        labels: Vec::new(),
        points: inside,
    }]];
    let (mut max_good, mut max_bad) = (0usize, 0usize);
    for level in 0..opts.levels {
        let current = &levels[level];
        let classified: Vec<(Option<f64>, Vec<Vec<f64>>)> = current
            .par_iter()
            .map(|b| match symmetry_defects_from(u, &b.center, b.radius, a, &opts.defect, 0) {
                Ok(reps) => Ok((Some(reps[0].defect), boundary_basis(&reps[opts.k].subspace, n))),
                Err(LabError::ConstantAtScale) => Ok((None, Vec::new())),
                Err(e) => Err(e),
            })
            .collect::<Result<_>>()?;
        let mut next: Vec<CoverBall> = Vec::new();
        let mut updated = levels[level].clone();
        for (bi, (ball, (defect, basis))) in updated.iter_mut().zip(classified).enumerate() {
            let s = ball.radius * opts.mu;
            let good = defect.is_none_or(|d| d < opts.eps);
            let branch = if !good {
                Branch::Bad
            } else if ball.points.iter().all(|&i| distance_to_affine(&points[i], &ball.center, &basis) <= s / 10.0) {
                Branch::Good
            } else {
                Branch::Escaped
            };
            let kids = greedy_children(points, &ball.points, s);
            if branch == Branch::Good {
                max_good = max_good.max(kids.len());
            } else {
                max_bad = max_bad.max(kids.len());
            }
            let mut labels = ball.labels.clone();
            labels.push(branch);
            for (c, list) in kids {
                ball.children.push(next.len());
                next.push(CoverBall {
                    level: level + 1,
                    center: points[c].clone(),
                    radius: s,
                    parent: Some(bi),
                    branch: None,
                    defect: None,
                    children: Vec::new(),
                    labels: labels.clone(),
                    points: list,
                });
            }
            ball.branch = Some(branch);
            ball.defect = defect;
        }
        levels[level] = updated;
        levels.push(next);
    }
    let d = levels.last().map(|l| l.iter().map(|b| b.labels.iter().filter(|t| t.is_bad()).count()).max().unwrap_or(0)).unwrap_or(0);
    let c0 = opts.c0.unwrap_or((max_good.max(1)) as f64 * opts.mu.powi(opts.k as i32));
    let c1 = opts.c1.unwrap_or((max_bad.max(1)) as f64 * opts.mu.powi(n as i32 + 1));
    Ok(StratumCover {
        k: opts.k,
        eps: opts.eps,
        mu: opts.mu,
        j: opts.levels,
        n,
        root: root.clone(),
        points: points.iter().filter(|p| root.contains(p)).cloned().collect(),
        levels,
        max_good_children: max_good,
        max_bad_children: max_bad,
        c0,
        c1,
        d,
    })
}
