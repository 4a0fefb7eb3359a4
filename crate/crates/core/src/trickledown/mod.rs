//! Trickle-down machinery: admissibility conditions on the pair-eigenvalue
//! table, certificate-vector synthesis, scalar and matrix verification, and
//! the bound calculators.

pub mod bounds;
pub mod conditions;
pub mod fvectors;
pub mod harmonic;
pub mod scenario;
pub mod verify;

pub use bounds::{classical_bound, main_bound, main_c, thm13_bounds, ClassicalBounds, Thm13Bounds};
pub use conditions::{
    check_averaged_conditions, check_delta_uniform, check_main_conditions, max_feasible_delta,
    ConditionReport, ConditionVariant, EpsOrdering, CONDITION_MARGIN_TOL,
};
pub use fvectors::{build_f_vectors, FVectors};
pub use harmonic::{compensated_sum, harmonic, harmonic_tail, Accumulator};
pub use scenario::{min_passing_p, scenario_calculator, ScenarioReport};
pub use verify::{
    bound_profile, verify_matrix_conditions, verify_scalar_conditions, BoundProfile, BoundRow,
    MatrixReport, ScalarReport,
};
