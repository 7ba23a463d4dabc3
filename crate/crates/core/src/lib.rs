//! Schubert polynomials, bumpless pipe dreams, and the insertion and growth-diagram
//! machinery for structure constants of separated-descent products.

pub mod bpd;
pub mod error;
pub mod growth;
pub mod insertion;
pub mod moves;
pub mod par;
pub mod perm;
pub mod poly;

pub use bpd::{BpdGrid, Mode, Tile};
pub use error::{Error, Result};
pub use perm::{MixedChain, Permutation};
pub use poly::Polynomial;
