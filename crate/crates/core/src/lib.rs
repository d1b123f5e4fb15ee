//! Exact computations for configuration spaces of clusters.
//!
//! The crate covers set-partition combinatorics (the stacking monoid and its
//! free generators), exact integral homology via Smith normal form, the bar
//! complex of the discrete cluster monoid, Fox-Neuwirth cellular chains for
//! coloured configuration spaces with sign-twisted coefficients, and the
//! assembly of stable homology for vertical configuration spaces.

mod error;
mod limits;

pub mod fox_neuwirth;
pub mod geometry;
pub mod graded;
pub mod homology;
pub mod partitions;
pub mod selftest;
pub mod stable;

pub use error::{Error, Result};
pub use homology::{AbelianGroup, ChainComplex, GradedAbelianGroup, Int, IntegerMatrix};
pub use limits::Limits;
pub use partitions::{EntanglementType, Partition};
