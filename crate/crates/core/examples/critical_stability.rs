//! Certified critical points of perturbed lifted members on the coordinate
//! planes through the origin, against the bound `(d − 1)^2`.

use fraclab::poly::solutions::{lift_to_symmetric, model_poly};
use fraclab::strata::{critical_count_near, perturbed_solution};

fn main() -> fraclab::Result<()> {
    let a = 0.0;
    for d in 2..=4u32 {
        let lifted = lift_to_symmetric(&model_poly(d, a)?, 3)?;
        let u = perturbed_solution(&lifted.poly, d, 1e-3, a, 7)?;
        let counts = critical_count_near(&u, &[0.0, 0.0, 0.0], 0.5, 1.0 / 128.0, 0.37)?;
        let per_slice: Vec<String> = counts.iter().map(|c| format!("{:?}: {} ({} uncertified)", c.axes, c.clusters, c.uncertified)).collect();
        println!("d={d}, bound {}: {}", (d - 1) * (d - 1), per_slice.join(", "));
    }
    Ok(())
}
