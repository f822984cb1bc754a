//! Exact homogeneous solutions of the model equation and algebraic checks.

pub mod cone;
pub mod critical;
pub mod exact_linalg;
pub mod format;
pub mod harmonic;
pub mod hypergeometric;
pub mod polynomial;
pub mod scalar;
pub mod solutions;
pub mod univariate;

pub use cone::{cone_splitting_check, maximal_invariant_subspace, symmetry_rank, ConeSplit};
pub use critical::isolated_critical_origin;
pub use harmonic::harmonic_boundary_basis;
pub use polynomial::{ExactPoly, FloatPoly, Poly};
pub use scalar::{Coefficient, WeightExponent};
pub use solutions::{
    even_model_poly, extend_boundary_polynomial, extension_solution, lift_to_symmetric, model_poly,
    odd_model_poly, solution_space_basis, verify_weighted_harmonic, Family, HomogeneousSolution,
};
