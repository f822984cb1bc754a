//! Weighted sphere and ball rules: the measures of `|y|^a` on the unit
//! sphere and ball against their closed forms, and a Gauss-Jacobi rule.

use fraclab::geometry::constants::{weighted_ball_measure, weighted_sphere_measure};
use fraclab::geometry::jacobi::gauss_jacobi;
use fraclab::geometry::quadrature::{ball_rule, sphere_rule};

fn main() -> fraclab::Result<()> {
    for m in 2..=4 {
        for a in [-0.5, 0.0, 0.5] {
            let origin = vec![0.0; m];
            let s = sphere_rule(m, a, &origin, 1.0, 12)?.integrate(|_| 1.0);
            let b = ball_rule(m, a, &origin, 1.0, 12)?.integrate(|_| 1.0);
            println!(
                "m={m} a={a:+.1}: sphere {s:.12} (closed form {:.12}), ball {b:.12} (closed form {:.12})",
                weighted_sphere_measure(m, a),
                weighted_ball_measure(m, a)
            );
        }
    }
    // ∫_{-1}^{1} (1 - x)^α (1 + x)^β x^2 with α = β = 1/2 is π/8
    let (x, w) = gauss_jacobi(8, 0.5, 0.5);
    let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
    println!("Gauss-Jacobi(1/2, 1/2) moment 2: {v:.15} vs pi/8 = {:.15}", std::f64::consts::PI / 8.0);
    Ok(())
}
