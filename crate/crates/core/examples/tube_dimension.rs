//! Singular set of a lifted member: tube-volume co-dimension and
//! Hausdorff contents, next to the exact answer for a line.

use fraclab::poly::solutions::{lift_to_symmetric, model_poly};
use fraclab::strata::{extract_singular, hausdorff_estimate, tube_volume, tube_volume_of, BoxGrid, Carrier, CriticalOptions, GriddedField, Window};

fn log_radii(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    (0..k).map(|i| lo * (hi / lo).powf(i as f64 / (k - 1) as f64)).collect()
}

fn main() -> fraclab::Result<()> {
    let h = 1.0 / 32.0;
    let w = Window::ball(vec![0.0; 3], 0.5);
    let line = vec![vec![vec![-1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]]];
    let c = tube_volume_of(&line, &log_radii(2.0 * h, 0.25, 6), &w, h / 2.0, h / 2.0)?;
    println!("segment in R^3: co-dimension {:.3} +- {:.3}", c.exponent, c.stderr);

    let u = lift_to_symmetric(&model_poly(2, 0.3)?, 3)?;
    let f = GriddedField::sample(&u, BoxGrid::centered(3, 0.6, h, 0.37)?)?;
    let s = extract_singular(&f, Carrier::Ambient, &CriticalOptions::default())?;
    let c = tube_volume(&s, &log_radii(2.0 * h, 0.25, 6), &w, h / 2.0)?;
    println!("singular set of the lifted quadratic: {} cells, co-dimension {:.3} +- {:.3}", s.cells.len(), c.exponent, c.stderr);
    for (r, v) in c.radii.iter().zip(&c.volumes) {
        println!("  r = {r:.4}  volume {v:.4e}");
    }
    let e = hausdorff_estimate(&s, 1.0, &[4.0 * h, 2.0 * h, h], Some(&w));
    println!("H^1 contents at scales 4h, 2h, h: {:?}, plateau {:?}", e.contents, e.plateau);
    Ok(())
}
