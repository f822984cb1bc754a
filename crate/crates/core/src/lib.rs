//! Numerical laboratory for weighted degenerate elliptic extension problems.
//!
//! The crate solves `Div(|y|^a ∇U) = 0` above a boundary `R^n`, reads off
//! fractional Laplacians from the weighted Neumann trace, computes Almgren
//! type frequency functionals and builds quantitative strata, coverings and
//! dimension estimates for nodal, critical and singular sets.

pub mod error;
pub mod field;
pub mod frequency;
pub mod geometry;
pub mod lab;
pub mod poly;
pub mod solver;
pub mod strata;

pub use error::{LabError, Result};
