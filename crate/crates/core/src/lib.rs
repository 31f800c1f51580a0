//! Exact toric fan engine: lattice algebra, rational polyhedral cones, fans,
//! torus-invariant divisors and intersection numbers with invariant curves.

pub mod catalog;
pub mod divisor;
pub mod error;
pub mod exactlin;
pub mod explorer;
pub mod fan;
pub mod intersection;
pub mod io;
pub mod polyhedra;
pub mod report;

pub use error::{Error, Result};
