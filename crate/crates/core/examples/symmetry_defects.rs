//! Symmetry defects of a perturbed member by rank, and the classification
//! of a frequency ladder into good and bad scales.

use fraclab::frequency::{classify_scales, symmetry_defects, DefectOptions, FrequencySettings};
use fraclab::poly::solutions::{lift_to_symmetric, model_poly};

fn main() -> fraclab::Result<()> {
    let a = 0.0;
    let lifted = lift_to_symmetric(&model_poly(2, a)?, 3)?;
    let cubic = lift_to_symmetric(&model_poly(3, a)?, 3)?;
    let opts = DefectOptions::default();
    for delta in [0.0, 1e-2, 1e-1] {
        let u = lifted.poly.add(&cubic.poly.scale(&delta));
        let reports = symmetry_defects(&u, &[0.0, 0.0], 1.0, a, &opts)?;
        let line: Vec<String> = reports.iter().map(|r| format!("k={} {:.3e} (degree {})", r.k, r.defect, r.degree)).collect();
        println!("delta={delta:<5} {}", line.join(", "));
    }
    let u = lifted.poly.add(&cubic.poly.scale(&0.1));
    let s = FrequencySettings::for_member(&lifted);
    let c = classify_scales(&u, &[0.0, 0.0], 1e-3, 0.5, 5, 1.0, None, &s, &opts)?;
    println!(
        "ladder: {} bad scales, total frequency drop {:.4e}, delta {:.4e}",
        c.bad_count,
        c.total_drop(),
        c.delta
    );
    Ok(())
}
