//! Exact-arithmetic lattice computations around the rank-24 Mukai lattice:
//! certified integer isometries, discriminant forms, Eichler transvections,
//! cohomological Fourier-Mukai actions and the monodromy-membership test
//! they support.
//!
//! Everything is computed over arbitrary-precision integers and rationals;
//! there is no floating point anywhere and no tolerance in any check.

pub mod error;
pub mod json;
pub mod matrix;

pub mod disc;
pub mod sampling;
pub mod verify;
pub mod word;
pub mod isometry;
pub mod lattice;
pub mod monodromy;
pub mod mukai;

pub use disc::{oq_unit_count, DiscriminantAction, DiscriminantGroup, SignClass};
pub use error::{Error, Result};
pub use isometry::{
    extend_from_perp, in_w, orientation_character, restrict_to_perp, word_search, Isometry,
    Orientation, OrientationFrame, WordLetter,
};
pub use lattice::{IntegralLattice, SublatticeBasis};
pub use matrix::{IntMat, RatMat};
