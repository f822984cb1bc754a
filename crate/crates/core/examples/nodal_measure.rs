//! Nodal measure of hyperplanes and of the saddle inside the unit ball.

use fraclab::field::FnField;
use fraclab::strata::{extract_nodal, BoxGrid, Carrier, GriddedField, Window};

fn main() -> fraclab::Result<()> {
    let h = 1.0 / 64.0;
    for n in 2..=3usize {
        let plane = FnField {
            dim: n,
            f: |p: &[f64]| p[0],
            grad: move |_: &[f64]| {
                let mut g = vec![0.0; n];
                g[0] = 1.0;
                g
            },
        };
        let z = extract_nodal(&GriddedField::sample(&plane, BoxGrid::centered(n, 1.1, h, 0.37)?)?, Carrier::Boundary)?;
        println!("Z(x1) in B1, n={n}: {:.5} (unit {}-ball volume {:.5})", z.measure_in(&Window::ball(vec![0.0; n], 1.0)), n - 1, if n == 2 { 2.0 } else { std::f64::consts::PI });
    }
    let saddle = FnField { dim: 2, f: |p: &[f64]| p[0] * p[0] - p[1] * p[1], grad: |p: &[f64]| vec![2.0 * p[0], -2.0 * p[1]] };
    let z = extract_nodal(&GriddedField::sample(&saddle, BoxGrid::centered(2, 1.1, h, 0.37)?)?, Carrier::Boundary)?;
    println!("Z(x1^2 - x2^2) in B1: {:.5} (exact 4)", z.measure_in(&Window::ball(vec![0.0, 0.0], 1.0)));
    Ok(())
}
