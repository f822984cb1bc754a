//! Grids, weights, weighted quadrature and metric charts.

pub mod chart;
pub mod constants;
pub mod grid;
pub mod jacobi;
pub mod quadrature;

pub use chart::{curvature_step, metric_scalar_curvature, MetricChart, MetricFn, ScalarFn};
pub use constants::{
    c_n_gamma, d_gamma, pv_constant, weighted_ball_measure, weighted_sphere_measure,
};
pub use grid::{WeightedGrid, YLayout};
pub use quadrature::{ball_quadrature, sphere_quadrature, SphereQuadrature, WeightedQuadrature};
