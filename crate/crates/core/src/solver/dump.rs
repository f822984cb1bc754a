//! Solution dumps and trace CSV export.

use std::io::{BufRead, BufReader, Read, Write};

use crate::error::{LabError, Result};
use crate::geometry::grid::{parse_key_values, WeightedGrid};
use crate::solver::field::SolutionField;

/// Header line `<grid header> gamma=<γ>`, newline, then little-endian `f64`
/// node values in storage order.
pub fn write_solution(w: &mut impl Write, sol: &SolutionField) -> Result<()> {
    writeln!(w, "{} gamma={:?}", sol.grid().header(), sol.problem().gamma)?;
    for v in sol.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

/// Reads a dump written by [`write_solution`].
pub fn read_solution(r: impl Read) -> Result<(WeightedGrid, f64, Vec<f64>)> {
    let mut r = BufReader::new(r);
    let mut header = String::new();
    r.read_line(&mut header)?;
    let grid = WeightedGrid::parse_header(header.trim_end())?;
    let gamma: f64 = parse_key_values(&header)
        .into_iter()
        .find(|(k, _)| k == "gamma")
        .and_then(|(_, v)| v.parse().ok())
        .ok_or_else(|| LabError::Format("solution header lacks `gamma`".into()))?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != 8 * grid.num_nodes() {
        return Err(LabError::Format(format!(
            "expected {} values, found {} bytes",
            grid.num_nodes(),
            bytes.len()
        )));
    }
    let values = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    Ok((grid, gamma, values))
}

/// CSV with columns `x1,...,xn,f,trace,P2gamma_f`.
pub fn write_trace_csv(w: &mut impl Write, sol: &SolutionField, trace: &[f64], frac: &[f64]) -> Result<()> {
    let g = sol.grid();
    let n = g.n();
    let header: Vec<String> = (1..=n).map(|i| format!("x{i}")).chain(["f", "trace", "P2gamma_f"].map(String::from)).collect();
    writeln!(w, "{}", header.join(","))?;
    let t = g.trace_level();
    for x in 0..g.nodes_per_level() {
        let node = g.node_index(t, x);
        let p = g.node_coords(node);
        let row: Vec<String> = p[..n]
            .iter()
            .chain([sol.values()[node], trace[x], frac[x]].iter())
            .map(|v| format!("{v:.16e}"))
            .collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}
