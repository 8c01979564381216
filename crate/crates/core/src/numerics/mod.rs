//! Complex-time numerical integration used to cross-check the formal results.

mod integrate;
mod verify;

pub use integrate::{
    integrate, integrate_field, pole_estimate, IntegratorConfig, NumericField, PathSegment, Sample, Trajectory,
};
pub use verify::{
    deviation, eval_series_numeric, eval_series_with_tail, first_order_system, verify_branch_numeric,
    verify_map_numeric, BranchCheck, NumericMap,
};
