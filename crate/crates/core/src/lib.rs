//! Exact computational knot theory: Jones and Alexander polynomials, integral
//! Khovanov homology with its cone decomposition, Markov-move checks, and a
//! small lab for the slice family of block matrices.

pub mod braid;
pub mod diagram;
pub mod error;
pub mod homology;
pub mod khovanov;
pub mod laurent;
pub mod polynomials;
pub mod slice;

pub use braid::BraidWord;
pub use diagram::{Crossing, LinkDiagram, ResolutionState, Sign};
pub use error::{Error, Result};
pub use homology::{FreeComplex, HomologySummand, IntMatrix};
pub use khovanov::{BigradedRanks, CollapsedGrading, KhovanovReport};
pub use laurent::HalfLaurent;
