//! Chart atlases, accessible singular points, local indices and the alpha-test.

mod alpha;
mod atlas;
mod blowup;
mod points;

pub use alpha::{alpha_reduce, solve_reduced, AlphaTestReport, ReducedSystem};
pub use atlas::{divisor_variable, Atlas, Chart, Divisor, DivisorComponent};
pub use blowup::{blow_up, six_fold_blowup};
pub use points::{
    accessible_points, base_first_coordinate, divisor_pole_order, expansion_matrices, local_index,
    recenter, select_point, to_chart, AccessiblePoint, LocalIndexReport, Matrix2, Singularities,
    MULTIPLICITY_SEARCH,
};
