//! Exact symbolic-numeric singularity analysis for plane Hamiltonian ODE systems.

pub mod algebra;
pub mod error;
pub mod geometry;
pub mod numerics;
pub mod series;
pub mod systems;

pub use error::{Error, Result};
