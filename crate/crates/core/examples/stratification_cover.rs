//! Quantitative strata of a model member and their effective covers,
//! with the measured branch constants and the leaf-count bound.

use fraclab::frequency::DefectOptions;
use fraclab::poly::solutions::model_poly;
use fraclab::strata::{effective_cover, quantitative_stratum, CoverOptions, Window};

fn main() -> fraclab::Result<()> {
    let a = 0.2;
    let mu: f64 = 0.25;
    let u = model_poly(2, a)?;
    for j in 1..=5usize {
        let r = mu.powi(j as i32);
        let mut samples: Vec<Vec<f64>> = (-16..=16).map(|i| vec![i as f64 / 32.0]).collect();
        samples.extend((-16..=16).filter(|i| i % 8 != 0).map(|i| vec![i as f64 * r / 2.0]));
        let (table, s) = quantitative_stratum(&u, &samples, 0, 1e-2, r, 0.5, 2.0, a, &DefectOptions::default())?;
        let pts = s.points(&table);
        let cover = effective_cover(&u, &pts, &Window::ball(vec![0.0], 1.0), a, &CoverOptions::new(0, j))?;
        println!(
            "j={j}: {} stratum points, {} leaves of radius {:.2e}, bound {:.1} (C0={:.3}, C1={:.3}, D={}), covered {}",
            pts.len(),
            cover.leaves().len(),
            cover.leaf_radius(),
            cover.leaf_bound(),
            cover.c0,
            cover.c1,
            cover.d,
            cover.covers_all_points()
        );
    }
    Ok(())
}
