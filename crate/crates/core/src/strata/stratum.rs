//! Sample-based quantitative strata `S^k_{ε,r}`.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{invalid, LabError, Result};
use crate::field::ScalarField;
use crate::frequency::{symmetry_defects_from, DefectOptions};

/// Symmetry defects of every rank `≥ k_min` at each (sample, scale) pair.
#[derive(Debug, Clone)]
pub struct DefectTable {
    pub samples: Vec<Vec<f64>>,
    /// Increasing ladder of scales.
    pub scales: Vec<f64>,
    pub m: usize,
    pub k_min: usize,
    /// `values[i][j][k − k_min]`; `None` when the field is constant at the scale.
    pub values: Vec<Vec<Option<Vec<f64>>>>,
}

/// Geometric ladder `r, r q, r q², …` up to `r_max`.
pub fn scale_ladder(r: f64, r_max: f64, ratio: f64) -> Result<Vec<f64>> {
    if !(r > 0.0 && r_max >= r && ratio > 1.0) {
        return Err(invalid("ladder", "need 0 < r <= r_max and ratio > 1"));
    }
    let mut out = vec![r];
    loop {
        let next = out.last().unwrap() * ratio;
        if next > r_max * (1.0 + 1e-12) {
            break;
        }
        out.push(next);
    }
    Ok(out)
}

/// Computes the defect table in parallel over (sample, scale) pairs.
pub fn defect_table(
    u: &(impl ScalarField + ?Sized),
    samples: &[Vec<f64>],
    scales: &[f64],
    k_min: usize,
    a: f64,
    opts: &DefectOptions,
) -> Result<DefectTable> {
    let m = u.dim();
    if samples.iter().any(|x| x.len() != m - 1) {
        return Err(invalid("samples", "points must lie on the boundary R^n"));
    }
    if k_min > m {
        return Err(invalid("k", "rank exceeds the dimension"));
    }
    let pairs: Vec<(usize, usize)> = (0..samples.len()).flat_map(|i| (0..scales.len()).map(move |j| (i, j))).collect();
    let flat: Vec<Option<Vec<f64>>> = pairs
        .par_iter()
        .map(|&(i, j)| match symmetry_defects_from(u, &samples[i], scales[j], a, opts, k_min) {
            Ok(reps) => Ok(Some(reps.iter().map(|r| r.defect).collect())),
            Err(LabError::ConstantAtScale) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let mut it = flat.into_iter();
    let values = (0..samples.len()).map(|_| (0..scales.len()).map(|_| it.next().unwrap()).collect()).collect();
    Ok(DefectTable { samples: samples.to_vec(), scales: scales.to_vec(), m, k_min, values })
}

impl DefectTable {
    /// Defect of rank `k` at sample `i`, scale index `j`: `+∞` for `k > m`
    /// (no nonconstant solution is invariant in every direction), `0` when the
    /// field is constant at that scale.
    pub fn defect(&self, i: usize, j: usize, k: usize) -> f64 {
        assert!(k >= self.k_min, "rank {k} below the table's minimum {}", self.k_min);
        if k > self.m {
            return f64::INFINITY;
        }
        match &self.values[i][j] {
            Some(v) => v[k - self.k_min],
            None => 0.0,
        }
    }

    /// `S^k_{ε,r}`: samples with `defect(k + 1) ≥ ε` at every ladder scale `s ≥ r`.
    pub fn stratum(&self, k: usize, eps: f64, r: f64) -> StratumSamples {
        let active: Vec<usize> = (0..self.scales.len()).filter(|&j| self.scales[j] >= r * (1.0 - 1e-12)).collect();
        let min_defect: Vec<f64> = (0..self.samples.len())
            .map(|i| active.iter().map(|&j| self.defect(i, j, k + 1)).fold(f64::INFINITY, f64::min))
            .collect();
        let members = min_defect.iter().map(|&d| d >= eps).collect();
        StratumSamples { k, eps, r, members, min_defect }
    }
}

/// Membership of each table sample in `S^k_{ε,r}`.
#[derive(Debug, Clone, PartialEq)]
pub struct StratumSamples {
    pub k: usize,
    pub eps: f64,
    pub r: f64,
    pub members: Vec<bool>,
    /// Minimum rank-`(k+1)` defect over the scales `≥ r`.
    pub min_defect: Vec<f64>,
}

impl StratumSamples {
    pub fn count(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn points(&self, table: &DefectTable) -> Vec<Vec<f64>> {
        table.samples.iter().zip(&self.members).filter(|(_, &b)| b).map(|(p, _)| p.clone()).collect()
    }

    /// Whether every member of `self` is a member of `other` (same samples).
    pub fn is_subset_of(&self, other: &StratumSamples) -> bool {
        self.members.len() == other.members.len() && self.members.iter().zip(&other.members).all(|(&a, &b)| !a || b)
    }
}

/// Computes `S^k_{ε,r}` on the samples over the ladder from `r` to `r_max`.
#[allow(clippy::too_many_arguments)]
pub fn quantitative_stratum(
    u: &(impl ScalarField + ?Sized),
    samples: &[Vec<f64>],
    k: usize,
    eps: f64,
    r: f64,
    r_max: f64,
    ratio: f64,
    a: f64,
    opts: &DefectOptions,
) -> Result<(DefectTable, StratumSamples)> {
    let scales = scale_ladder(r, r_max, ratio)?;
    let table = defect_table(u, samples, &scales, (k + 1).min(u.dim()), a, opts)?;
    let s = table.stratum(k, eps, r);
    Ok((table, s))
}

/// Checks the inclusions `S^k_{ε,r} ⊆ S^{k+1}_{ε,r}`, `S^k_{ε,r} ⊆ S^k_{ε',r}`
/// for `ε' ≤ ε` and `S^k_{ε,r} ⊆ S^k_{ε,r'}` for `r' ≥ r` on a table.
/// Returns the list of violated inclusions (empty when all hold).
pub fn inclusion_violations(table: &DefectTable, ks: &[usize], epss: &[f64], rs: &[f64]) -> Vec<String> {
    let mut out = Vec::new();
    for &k in ks {
        for &e in epss {
            for &r in rs {
                let s = table.stratum(k, e, r);
                if !s.is_subset_of(&table.stratum(k + 1, e, r)) {
                    out.push(format!("k={k} into k={} at eps={e}, r={r}", k + 1));
                }
                for &e2 in epss.iter().filter(|&&e2| e2 <= e) {
                    if !s.is_subset_of(&table.stratum(k, e2, r)) {
                        out.push(format!("eps={e} into eps={e2} at k={k}, r={r}"));
                    }
                }
                for &r2 in rs.iter().filter(|&&r2| r2 >= r) {
                    if !s.is_subset_of(&table.stratum(k, e, r2)) {
                        out.push(format!("r={r} into r={r2} at k={k}, eps={e}"));
                    }
                }
            }
        }
    }
    out
}

/// CSV point list `x1,…,xn,min_defect` of the stratum members.
pub fn write_stratum_csv(w: &mut impl Write, table: &DefectTable, s: &StratumSamples) -> Result<()> {
    let n = table.m - 1;
    let header: Vec<String> = (1..=n).map(|i| format!("x{i}")).chain(std::iter::once("min_defect".to_string())).collect();
    writeln!(w, "{}", header.join(","))?;
    for (i, p) in table.samples.iter().enumerate() {
        if s.members[i] {
            let row: Vec<String> = p.iter().chain(std::iter::once(&s.min_defect[i])).map(|v| format!("{v:.16e}")).collect();
            writeln!(w, "{}", row.join(","))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_is_geometric_and_capped() {
        let l = scale_ladder(0.1, 1.0, 2.0).unwrap();
        assert_eq!(l, vec![0.1, 0.2, 0.4, 0.8]);
        assert!(scale_ladder(0.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn stratum_thresholds_table_values() {
        let table = DefectTable {
            samples: vec![vec![0.0], vec![1.0]],
            scales: vec![0.1, 0.2],
            m: 2,
            k_min: 1,
            values: vec![vec![Some(vec![0.5, 0.9]), Some(vec![0.3, 0.9])], vec![Some(vec![0.5, 0.9]), None]],
        };
        let s = table.stratum(0, 0.4, 0.1);
        assert_eq!(s.members, vec![false, false]);
        let s = table.stratum(0, 0.4, 0.2);
        assert_eq!(s.members, vec![false, false]);
        let s = table.stratum(0, 0.25, 0.1);
        assert_eq!(s.members, vec![true, false]);
        assert!(table.stratum(2, 1e9, 0.1).members.iter().all(|&b| b));
        assert!(inclusion_violations(&table, &[0, 1], &[0.25, 0.4], &[0.1, 0.2]).is_empty());
    }
}
