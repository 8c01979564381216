//! Truncated Laurent series, the formal Painlevé test, and series transport through maps.

mod laurent;
mod ode;
mod transport;

pub use laurent::{LaurentSeries, SeriesJson, EXACT_TERMS};
pub use ode::{
    Balance, BranchJson, Compatibility, FreeNames, PainleveBranch, ScalarODE, DEFAULT_DEPTH,
    MAX_POLE_ORDER,
};
pub use transport::{change_of_unknown, eval_rf, map_series};
