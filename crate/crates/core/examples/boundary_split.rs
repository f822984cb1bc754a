//! Boundary singular set of two traces, split into the horizontal and the
//! nonlocal part by the degree and harmonicity of the local blow-up.

use fraclab::field::FnField;
use fraclab::strata::{boundary_split, extract_singular, BoundaryRestriction, BoxGrid, Carrier, CriticalOptions, GriddedField, SplitClass, SplitOptions};

fn main() -> fraclab::Result<()> {
    let h = 1.0 / 64.0;
    let a = 0.3;
    let example = FnField {
        dim: 3,
        f: move |p: &[f64]| p[0] * p[0] - p[2] * p[2] / (1.0 + a),
        grad: move |p: &[f64]| vec![2.0 * p[0], 0.0, -2.0 * p[2] / (1.0 + a)],
    };
    let saddle = FnField { dim: 2, f: |p: &[f64]| p[0] * p[0] - p[1] * p[1], grad: |p: &[f64]| vec![2.0 * p[0], -2.0 * p[1]] };
    let restricted = BoundaryRestriction(&example);
    for (name, pts, split) in [
        {
            let g = GriddedField::sample(&restricted, BoxGrid::centered(2, 0.6, h, 0.37)?)?;
            let pts: Vec<Vec<f64>> = extract_singular(&g, Carrier::Boundary, &CriticalOptions::default())?.cells.iter().map(|c| c.point.clone()).collect();
            let split = boundary_split(&restricted, &pts, &SplitOptions::default())?;
            ("x1^2 trace", pts, split)
        },
        {
            let g = GriddedField::sample(&saddle, BoxGrid::centered(2, 0.6, h, 0.37)?)?;
            let pts: Vec<Vec<f64>> = extract_singular(&g, Carrier::Boundary, &CriticalOptions::default())?.cells.iter().map(|c| c.point.clone()).collect();
            let split = boundary_split(&saddle, &pts, &SplitOptions::default())?;
            ("x1^2 - x2^2 trace", pts, split)
        },
    ] {
        println!(
            "{name}: {} singular samples, {} horizontal, {} nonlocal, {} unclassified",
            pts.len(),
            split.count(SplitClass::Horizontal),
            split.count(SplitClass::Nonlocal),
            split.count(SplitClass::Unclassified)
        );
    }
    Ok(())
}
