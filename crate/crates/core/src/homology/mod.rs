//! Exact integral homology: Smith normal form, free chain complexes, and the
//! bar complex of the discrete cluster monoid.

mod bar;
mod complex;
mod int;
mod matrix;

pub use bar::{build_bar_complex, decompose_monoid_element, DiscreteMonoidD, MonoidElement};
pub use complex::{AbelianGroup, ChainComplex, GradedAbelianGroup};
pub use int::Int;
pub use matrix::{smith_normal_form, IntegerMatrix, SmithForm, Triplet};
