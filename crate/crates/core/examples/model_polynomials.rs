//! Model members of the weighted equation: exact rational shapes, the
//! weighted identity, lifts, symmetry ranks and critical points.

use fraclab::poly::format::write_solution_exact;
use fraclab::poly::solutions::{lift_to_symmetric, model_poly, verify_weighted_harmonic};
use fraclab::poly::{isolated_critical_origin, symmetry_rank};

fn main() -> fraclab::Result<()> {
    let a = 0.2;
    for k in 0..=4 {
        let p = model_poly(k, a)?;
        let residual = verify_weighted_harmonic(&p)?;
        let isolated = if k >= 2 { isolated_critical_origin(&p)?.to_string() } else { "n/a".into() };
        println!(
            "degree {k}: residual terms {}, symmetry rank {}, isolated critical origin {}",
            residual.num_terms(),
            symmetry_rank(&p.shape),
            isolated
        );
        print!("{}", write_solution_exact(&p));
    }
    let lifted = lift_to_symmetric(&model_poly(3, a)?, 4)?;
    println!("lift of degree 3 to R^4: rank {}, residual zero {}", lifted.symmetry_rank, verify_weighted_harmonic(&lifted)?.is_zero());
    Ok(())
}
