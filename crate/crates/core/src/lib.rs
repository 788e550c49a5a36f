//! Quantitative metric geometry on finite samples.
//!
//! Every object here is computed on a finite sample of a (quasi)metric space:
//! quasi-triangle constants, the chain metrization of a quasimetric,
//! r-separated sets and covering numbers, cover profiles for the geometric
//! doubling condition, doubling constants of atomic measures, and a
//! Poincaré–Miranda style root finder used to build separated witness sets
//! inside cubes of the infinite-dimensional torus.
//!
//! Sample-level quantities are bounds on the corresponding quantities of the
//! underlying space, never the quantities themselves. Reports say which
//! direction each bound goes.

pub mod error;
pub mod io;
pub mod measure;
pub mod metric;
pub mod metrization;
pub mod miranda;
pub mod packing;
pub mod spaces;
pub mod stats;
pub mod tolerance;

pub use error::{Error, Result};
pub use measure::{
    ball_measure, doubling_constant, doubling_constant_with, doubling_verdict, doubling_verdict_with, DoublingConstant,
    DoublingReport, DoublingSweep, MeasuredSpace, TREND_THRESHOLD,
};
pub use metric::{
    ball, ball_nesting_check, ball_nesting_check_on, equivalence_constant, power_transform, quasi_constant,
    validate_quasimetric, Ball, DistanceMatrix, FiniteMetric, ValidationReport,
};
pub use metrization::{chain_metric, exponent_q, sandwich_check, MetrizationResult, SandwichReport};
pub use miranda::{
    face_distance, face_gap, lipschitz_check, miranda_solve, theorem3_witness, CubeSample, MirandaOptions,
    MirandaSolution, TorusMetric, Witness, WitnessSet, CUBE_CAP, WITNESS_CAP,
};
pub use packing::{
    cover_subset, covering_number, covering_number_with, geometric_doubling_profile, geometric_doubling_profile_with,
    greedy_separated, is_separated, max_separated_exact, max_separated_exact_capped, packing_exponent_fit,
    packing_exponent_fit_levels, packing_report, CoverCount, CoverOptions, CoverProfile, PackingFit, PackingReport,
    ProfileRow, SeparatedSet, COVER_CAP, EXACT_CAP,
};
pub use spaces::{
    cantor_numerators, cantor_radius, cantor_space, cantor_space_capped, evenly_spaced, log_line, product_metric,
    subgroup_min_distance, subgroup_min_distance_capped, toric_distance, torus_grid, torus_grid_capped, Ambient,
    MetricKind, PointCloud, ProductMetricSpec, TorusPoint, TorusSample,
};
