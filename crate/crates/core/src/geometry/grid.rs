//! Structured grids over boxes in `R^{n+1}` carrying the weight `|y|^a`.

use std::fmt;

use crate::error::{invalid, LabError, Result};
use crate::geometry::constants::check_weight;

/// Placement of the y-levels above the trace row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YLayout {
    /// Levels at `j h`, `j = 0..=Y/h`.
    Aligned,
    /// Trace row at 0, interior levels at `(j − ½) h`.
    HalfOffset,
}

/// A uniform tensor grid in x times a layered grid in y.
///
/// Node storage is y-major: `index = level * nodes_per_level + x_flat`, with
/// `x_flat = i_1 + nx * i_2 + nx² * i_3 + ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGrid {
    n: usize,
    h: f64,
    half_width: f64,
    y_extent: f64,
    a: f64,
    doubled: bool,
    layout: YLayout,
    nx: usize,
    y_steps: usize,
}

fn steps(len: f64, h: f64, name: &'static str) -> Result<usize> {
    let k = (len / h).round();
    if (k * h - len).abs() > 1e-9 * len.max(1.0) {
        return Err(invalid(name, format!("{len} is not an integer multiple of h = {h}")));
    }
    Ok(k as usize)
}

/// `∫_lo^hi |y|^p dy` for `lo ≤ hi`.
pub fn abs_power_integral(lo: f64, hi: f64, p: f64) -> f64 {
    let anti = |y: f64| y.signum() * y.abs().powf(p + 1.0) / (p + 1.0);
    anti(hi) - anti(lo)
}

impl WeightedGrid {
    /// Builds a grid on `[-L, L]^n × [0, Y]` (or `[-Y, Y]` when doubled).
    ///
    /// Non-negative weights use the aligned layout, negative weights the
    /// half-offset layout so that no weighted stencil point sits on `y = 0`.
    pub fn new(n: usize, h: f64, l: f64, y: f64, a: f64, doubled: bool) -> Result<Self> {
        let layout = if a < 0.0 { YLayout::HalfOffset } else { YLayout::Aligned };
        Self::with_layout(n, h, l, y, a, doubled, layout)
    }

    pub fn with_layout(
        n: usize,
        h: f64,
        l: f64,
        y: f64,
        a: f64,
        doubled: bool,
        layout: YLayout,
    ) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "boundary dimension must be at least 1"));
        }
        check_weight(a)?;
        if !(h > 0.0 && h.is_finite()) {
            return Err(invalid("h", format!("spacing must be positive, got {h}")));
        }
        if !(l >= 1.0) {
            return Err(invalid("L", format!("box half-width must be >= 1, got {l}")));
        }
        if !(y >= 1.0) {
            return Err(invalid("Y", format!("y extent must be >= 1, got {y}")));
        }
        if h > l.min(y) / 4.0 {
            return Err(invalid("h", format!("h = {h} is too coarse for L = {l}, Y = {y}")));
        }
        let nx = 2 * steps(2.0 * l, 2.0 * h, "L")? + 1;
        let y_steps = steps(y, h, "Y")?;
        Ok(WeightedGrid { n, h, half_width: l, y_extent: y, a, doubled, layout, nx, y_steps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The same grid restricted to `y ≥ 0`.
    pub fn upper_half(&self) -> WeightedGrid {
        WeightedGrid { doubled: false, ..self.clone() }
    }
    pub fn m(&self) -> usize {
        self.n + 1
    }
    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn half_width(&self) -> f64 {
        self.half_width
    }
    pub fn y_extent(&self) -> f64 {
        self.y_extent
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn doubled(&self) -> bool {
        self.doubled
    }
    pub fn layout(&self) -> YLayout {
        self.layout
    }
    /// Nodes along each x axis.
    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn x_coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.h
    }

    /// Height of the `j`-th level counted upward from the trace row (`j = 0`).
    pub fn upper_level_y(&self, j: usize) -> f64 {
        match (self.layout, j) {
            (_, 0) => 0.0,
            (YLayout::Aligned, j) => j as f64 * self.h,
            (YLayout::HalfOffset, j) => (j as f64 - 0.5) * self.h,
        }
    }

    /// Number of levels with `y ≥ 0`, trace row included.
    pub fn upper_levels(&self) -> usize {
        self.y_steps + 1
    }

    pub fn num_levels(&self) -> usize {
        if self.doubled {
            2 * self.upper_levels() - 1
        } else {
            self.upper_levels()
        }
    }

    /// Level index of the trace row.
    pub fn trace_level(&self) -> usize {
        if self.doubled {
            self.upper_levels() - 1
        } else {
            0
        }
    }

    /// Signed y coordinate of a storage level.
    pub fn level_y(&self, level: usize) -> f64 {
        let t = self.trace_level();
        if level >= t {
            self.upper_level_y(level - t)
        } else {
            -self.upper_level_y(t - level)
        }
    }

    pub fn y_levels(&self) -> Vec<f64> {
        (0..self.num_levels()).map(|l| self.level_y(l)).collect()
    }

    /// Highest y reached by the grid.
    pub fn y_top(&self) -> f64 {
        self.upper_level_y(self.y_steps)
    }

    pub fn nodes_per_level(&self) -> usize {
        self.nx.pow(self.n as u32)
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes_per_level() * self.num_levels()
    }

    pub fn x_flat(&self, idx: &[usize]) -> usize {
        idx.iter().rev().fold(0, |acc, &i| acc * self.nx + i)
    }

    pub fn x_multi(&self, mut flat: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.n);
        for _ in 0..self.n {
            out.push(flat % self.nx);
            flat /= self.nx;
        }
        out
    }

    pub fn node_index(&self, level: usize, x_flat: usize) -> usize {
        level * self.nodes_per_level() + x_flat
    }

    pub fn node_coords(&self, node: usize) -> Vec<f64> {
        let level = node / self.nodes_per_level();
        let mut p: Vec<f64> =
            self.x_multi(node % self.nodes_per_level()).into_iter().map(|i| self.x_coord(i)).collect();
        p.push(self.level_y(level));
        p
    }

    /// Index of the mirror node under `y ↦ −y` on doubled grids.
    pub fn mirror(&self, node: usize) -> Option<usize> {
        if !self.doubled {
            return None;
        }
        let npl = self.nodes_per_level();
        let level = node / npl;
        let t = self.trace_level();
        Some((2 * t - level) * npl + node % npl)
    }

    /// Pairs `(below, above)` of mirror nodes; trace nodes pair with themselves.
    pub fn pairing_table(&self) -> Vec<(usize, usize)> {
        if !self.doubled {
            return Vec::new();
        }
        let npl = self.nodes_per_level();
        let t = self.trace_level();
        (0..=t)
            .flat_map(|lvl| (0..npl).map(move |x| (lvl * npl + x, (2 * t - lvl) * npl + x)))
            .collect()
    }

    /// Whether the ball of radius `r` about a point of `{y = 0}` fits inside the grid.
    pub fn contains_ball(&self, center: &[f64], r: f64) -> bool {
        center.len() >= self.n
            && center[..self.n].iter().all(|&c| c.abs() + r <= self.half_width + 1e-12)
            && r <= self.y_top() + 1e-12
    }

    pub fn check_ball(&self, center: &[f64], r: f64) -> Result<()> {
        if self.contains_ball(center, r) {
            Ok(())
        } else {
            Err(LabError::BallOutsideDomain { center: center.to_vec(), radius: r })
        }
    }

    /// Text dump: the header line followed by the node count.
    pub fn dump(&self) -> String {
        format!("{}\n{}\n", self.header(), self.num_nodes())
    }

    pub fn header(&self) -> String {
        format!(
            "m={} n={} h={:?} L={:?} Y={:?} a={:?} doubled={}",
            self.m(),
            self.n,
            self.h,
            self.half_width,
            self.y_extent,
            self.a,
            u8::from(self.doubled)
        )
    }

    /// Rebuilds a grid from a dump produced by [`WeightedGrid::dump`].
    pub fn parse_dump(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| LabError::Format("empty grid dump".into()))?;
        let grid = Self::parse_header(header)?;
        let count: usize = lines
            .next()
            .and_then(|l| l.trim().parse().ok())
            .ok_or_else(|| LabError::Format("missing node count".into()))?;
        if count != grid.num_nodes() {
            return Err(LabError::Format(format!(
                "node count {count} does not match header ({})",
                grid.num_nodes()
            )));
        }
        Ok(grid)
    }

    pub fn parse_header(header: &str) -> Result<Self> {
        let kv = parse_key_values(header);
        let get = |k: &str| -> Result<f64> {
            kv.iter()
                .find(|(key, _)| key == k)
                .and_then(|(_, v)| v.parse().ok())
                .ok_or_else(|| LabError::Format(format!("grid header lacks `{k}`")))
        };
        let n = get("n")? as usize;
        if get("m")? as usize != n + 1 {
            return Err(LabError::Format("m must equal n + 1".into()));
        }
        Self::new(n, get("h")?, get("L")?, get("Y")?, get("a")?, get("doubled")? != 0.0)
    }
}

pub(crate) fn parse_key_values(line: &str) -> Vec<(String, String)> {
    line.split_whitespace()
        .filter_map(|tok| tok.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())))
        .collect()
}

impl fmt::Display for WeightedGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.header())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aligned_layout() {
        let g = WeightedGrid::new(1, 0.25, 1.0, 1.0, 0.0, false).unwrap();
        assert_eq!(g.nx(), 9);
        assert_eq!(g.num_levels(), 5);
        assert_eq!(g.y_levels(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(g.num_nodes(), 45);
    }

    #[test]
    fn half_offset_layout() {
        let g = WeightedGrid::new(1, 0.25, 1.0, 1.0, -0.5, false).unwrap();
        assert_eq!(g.layout(), YLayout::HalfOffset);
        assert_eq!(g.y_levels(), vec![0.0, 0.125, 0.375, 0.625, 0.875]);
    }

    #[test]
    fn doubled_pairing() {
        let g = WeightedGrid::new(2, 0.1, 1.0, 1.0, 0.5, true).unwrap();
        let ys = g.y_levels();
        assert_eq!(ys.len(), 21);
        assert!((ys[0] + 1.0).abs() < 1e-12 && (ys[20] - 1.0).abs() < 1e-12);
        let table = g.pairing_table();
        assert_eq!(table.len(), 11 * g.nodes_per_level());
        for &(lo, hi) in &table {
            let (p, q) = (g.node_coords(lo), g.node_coords(hi));
            assert_eq!(p[..2], q[..2]);
            assert_eq!(p[2], -q[2]);
            assert_eq!(g.mirror(lo), Some(hi));
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(WeightedGrid::new(1, 0.25, 1.0, 1.0, 1.0, false).is_err());
        assert!(WeightedGrid::new(1, 0.25, 1.0, 1.0, -1.0, false).is_err());
        assert!(WeightedGrid::new(1, 0.25, 1.0, 1.0, f64::NAN, false).is_err());
        assert!(WeightedGrid::new(1, 0.4, 1.2, 1.2, 0.0, false).is_err());
        assert!(WeightedGrid::new(1, 0.5, 1.0, 1.0, 0.0, false).is_err());
    }

    #[test]
    fn coordinates_are_reconstructed() {
        let g = WeightedGrid::new(2, 0.1, 1.0, 1.0, -0.3, true).unwrap();
        let node = g.node_index(3, g.x_flat(&[4, 17]));
        let p = g.node_coords(node);
        assert_eq!(p[0], -1.0 + 4.0 * 0.1);
        assert_eq!(p[1], -1.0 + 17.0 * 0.1);
        assert_eq!(p[2], -(7.0 - 0.5) * 0.1);
    }

    #[test]
    fn dump_round_trip() {
        let g = WeightedGrid::new(2, 0.125, 1.0, 2.0, -0.25, true).unwrap();
        let back = WeightedGrid::parse_dump(&g.dump()).unwrap();
        assert_eq!(g, back);
        assert!(g.dump().starts_with("m=3 n=2 h=0.125 L=1.0 Y=2.0 a=-0.25 doubled=1\n"));
    }

    #[test]
    fn weight_integrals() {
        assert!((abs_power_integral(-1.0, 1.0, 0.5) - 2.0 / 1.5).abs() < 1e-15);
        assert!((abs_power_integral(0.0, 0.25, -0.5) - 2.0 * 0.5).abs() < 1e-15);
    }
}
