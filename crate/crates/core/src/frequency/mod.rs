//! Frequency functionals, profiles, tangent maps and symmetry defects.

pub mod defect;
pub mod export;
pub mod functionals;
pub mod profile;
pub mod scales;
pub mod tangent;

pub use defect::{symmetry_defect, symmetry_defects, symmetry_defects_from, DefectOptions, SymmetryReport};
pub use export::write_profile_csv;
pub use functionals::{ball_l2, functional_d, functional_h, functional_i, functionals, FrequencySettings, Functionals, Normalization};
pub use profile::{
    almost_monotonicity_fit, doubling_report, frequency_profile, monotonicity_of, monotonicity_report, AlmostMonotonicity,
    DoublingReport, FrequencyProfile, MonotonicityReport,
};
pub use scales::{classify_scales, fit_delta, poincare_trace_ratio, small_frequency_screen, ScaleClassification, ScreenStatus};
pub use tangent::{tangent_map, TangentMap};
