//! Nodal, critical and singular sets, their tubes and dimensions, and
//! covers of quantitative strata.

mod cover;
mod extract;
mod grid;
mod split;
mod stability;
mod stratum;
mod tube;

pub use cover::{effective_cover, Branch, CoverBall, CoverOptions, StratumCover};
pub use extract::{
    extract_critical, extract_nodal, extract_singular, gradient_floor, simplex_measure, Carrier,
    Certificate, CriticalOptions, SetCell, SetExtract, SetKind, Window,
};
pub use grid::{BoundaryRestriction, BoxGrid, GriddedField, PlaneSlice};
pub use split::{boundary_split, BoundarySplit, SplitClass, SplitOptions, SplitSample};
pub use stability::{critical_count_near, perturbed_solution, SliceCount};
pub use stratum::{
    defect_table, inclusion_violations, quantitative_stratum, scale_ladder, write_stratum_csv,
    DefectTable, StratumSamples,
};
pub use tube::{
    distance_sq_to_simplex, hausdorff_estimate, hausdorff_estimate_of, log_log_fit, tube_volume,
    tube_volume_of, write_tube_csv, HausdorffEstimate, TubeVolumeCurve,
};
