//! Plane systems, coordinate changes, and the built-in catalog.

mod catalog;
mod map;
mod system;
mod transform;

pub use catalog::{map_record, system_record, Catalog};
pub use map::{BirationalMap, TimeAction};
pub use system::PlaneSystem;
pub use transform::{check_holomorphy, check_symmetry, pushforward, Holomorphy};
