//! Wigner functions on coadjoint orbits of semidirect-product groups `ℝⁿ ⋊ H`.

pub mod catalog;
pub mod error;
pub mod flat;
pub mod group;
pub mod io;
pub mod linalg;
pub mod orbit;
pub mod quadrature;
pub mod representation;
pub mod wigner;

pub use error::{Error, Result};
