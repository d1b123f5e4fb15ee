/// Size limits for the enumerative parts of the engine.
///
/// Every operation whose cost grows combinatorially checks its input against
/// one of these and fails with [`Error::BoundExceeded`](crate::Error) instead
/// of running away.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest ground set `{1..n}` for partition enumeration.
    pub max_partition_size: usize,
    /// Largest number of points `|alpha|` for Fox-Neuwirth complexes.
    pub max_points: usize,
    /// Largest ambient dimension for Fox-Neuwirth complexes.
    pub max_dimension: usize,
    /// Largest weight for bar complexes of the discrete monoid.
    pub max_bar_weight: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_partition_size: 12,
            max_points: 8,
            max_dimension: 4,
            max_bar_weight: 8,
        }
    }
}

impl Limits {
    pub(crate) fn check(&self, what: &'static str, value: usize, bound: usize) -> crate::Result<()> {
        if value > bound {
            Err(crate::Error::BoundExceeded { what, value, bound })
        } else {
            Ok(())
        }
    }
}
