//! Shared inputs for the engine benchmarks.

use std::collections::BTreeMap;

use clusterhom::fox_neuwirth::{fn_complex, ColourMultiset, ParityMap};
use clusterhom::homology::DiscreteMonoidD;
use clusterhom::{ChainComplex, Limits};

/// Colour counts and dimensions of the Fox-Neuwirth complexes benchmarked.
pub const FN_CASES: &[(&[usize], usize)] = &[(&[4], 2), (&[5], 2), (&[3, 2], 2), (&[4], 3), (&[2, 2, 1], 3)];

pub fn fn_case(counts: &[usize]) -> (ColourMultiset, ParityMap) {
    let alpha = ColourMultiset::from_counts(counts);
    let parity = ParityMap::constant(&alpha, 1);
    (alpha, parity)
}

pub fn fn_case_name(counts: &[usize], d: usize) -> String {
    let parts: Vec<String> = counts.iter().map(ToString::to_string).collect();
    format!("({}) d={d}", parts.join(","))
}

/// A prebuilt complex, for timing homology alone.
pub fn prebuilt_fn_complex(counts: &[usize], d: usize) -> ChainComplex {
    let (alpha, parity) = fn_case(counts);
    fn_complex(&alpha, d, &parity, &Limits::default()).expect("benchmark inputs are within bounds")
}

/// A monoid with labels on sizes 1 to 3.
pub fn mixed_monoid(max_weight: usize) -> DiscreteMonoidD {
    let counts: BTreeMap<usize, usize> = [(1, 2), (2, 2), (3, 1)].into_iter().collect();
    DiscreteMonoidD::new(counts, max_weight).expect("sizes start at 1")
}
