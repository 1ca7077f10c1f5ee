//! Computational tools for lifting simplicial maps to embeddings.
//!
//! Given a non-degenerate simplicial map `f: K -> L`, the library builds the
//! double point complex of `f`, computes its mod-2 equivariant obstructions,
//! constructs lifts `g: K -> R^k` for simple folds, turns such lifts into
//! certified PL embeddings, and checks the stability criteria for maps to
//! Euclidean space.

pub mod cli;
pub mod cohomology;
pub mod complex;
pub mod double_point;
pub mod error;
pub mod generators;
pub mod geometry;
pub mod gf2;
pub mod io;
pub mod lift;
pub mod lp;
pub mod map;
pub mod obstruction;
pub mod plify;
pub mod rational;
pub mod stability;
pub mod subdivision;
pub mod verify;

pub use complex::{Simplex, SimplicialComplex};
pub use error::{PremError, Result};
