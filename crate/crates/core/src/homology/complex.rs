use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::matrix::{normalize_chain, MatrixJson};
use super::{smith_normal_form, Int, IntegerMatrix, SmithForm};
use crate::{Error, Result};

/// A finitely generated abelian group `Z^betti + Z/t_1 + ... + Z/t_m` with
/// `t_1 | t_2 | ... | t_m` and every `t_i >= 2`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianGroup {
    pub betti: usize,
    pub torsion: Vec<Int>,
}

impl AbelianGroup {
    pub fn zero() -> Self {
        AbelianGroup::default()
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroup {
            betti: rank,
            torsion: Vec::new(),
        }
    }

    /// Builds a group from arbitrary positive torsion orders; they are
    /// normalized to a divisibility chain.
    pub fn new(betti: usize, torsion: Vec<Int>) -> Self {
        AbelianGroup {
            betti,
            torsion: torsion_chain(torsion),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }

    pub fn direct_sum(&self, other: &AbelianGroup) -> AbelianGroup {
        let torsion = self.torsion.iter().chain(&other.torsion).cloned().collect();
        AbelianGroup::new(self.betti + other.betti, torsion)
    }
}

/// Normalizes positive orders to a divisibility chain and drops units.
fn torsion_chain(mut orders: Vec<Int>) -> Vec<Int> {
    orders.retain(|t| !t.is_zero());
    normalize_chain(&mut orders);
    orders.retain(|t| !t.is_unit());
    orders
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.betti {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// A non-negatively graded abelian group; degree `i` is stored at index `i`.
/// Degrees past the end are zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GradedAbelianGroup {
    groups: Vec<AbelianGroup>,
}

impl GradedAbelianGroup {
    pub fn new(mut groups: Vec<AbelianGroup>) -> Self {
        while groups.last().is_some_and(AbelianGroup::is_zero) {
            groups.pop();
        }
        GradedAbelianGroup { groups }
    }

    pub fn zero() -> Self {
        GradedAbelianGroup::default()
    }

    pub fn degree(&self, i: usize) -> AbelianGroup {
        self.groups.get(i).cloned().unwrap_or_default()
    }

    pub fn betti(&self, i: usize) -> usize {
        self.groups.get(i).map_or(0, |g| g.betti)
    }

    /// Number of stored degrees; every degree at or above this is zero.
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_zero(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn groups(&self) -> &[AbelianGroup] {
        &self.groups
    }

    pub fn truncate(&self, max_degree: usize) -> Self {
        GradedAbelianGroup::new(self.groups.iter().take(max_degree + 1).cloned().collect())
    }

    /// Moves degree `i` to degree `i + shift`.
    pub fn shift(&self, shift: usize) -> Self {
        let mut groups = vec![AbelianGroup::zero(); shift];
        groups.extend(self.groups.iter().cloned());
        GradedAbelianGroup::new(groups)
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let len = self.groups.len().max(other.groups.len());
        GradedAbelianGroup::new(
            (0..len)
                .map(|i| self.degree(i).direct_sum(&other.degree(i)))
                .collect(),
        )
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.groups
            .iter()
            .enumerate()
            .map(|(i, g)| if i % 2 == 0 { g.betti as i64 } else { -(g.betti as i64) })
            .sum()
    }
}

impl fmt::Display for GradedAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.groups.is_empty() {
            return f.write_str("0");
        }
        for (i, g) in self.groups.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "H{i} = {g}")?;
        }
        Ok(())
    }
}

/// A free chain complex of finite rank concentrated in degrees `0..=top`.
///
/// `boundary(n)` is the matrix of `C_n -> C_{n-1}` with rows indexed by
/// `C_{n-1}`. Construction checks `∂∂ = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    generators: Vec<Vec<String>>,
    /// `boundaries[n - 1]` is `∂_n`.
    boundaries: Vec<IntegerMatrix>,
}

impl ChainComplex {
    pub fn new(generators: Vec<Vec<String>>, boundaries: Vec<IntegerMatrix>) -> Result<Self> {
        let c = Self::new_unchecked(generators, boundaries)?;
        c.check_square_zero()?;
        Ok(c)
    }

    /// Checks shapes only.
    pub(crate) fn new_unchecked(
        generators: Vec<Vec<String>>,
        boundaries: Vec<IntegerMatrix>,
    ) -> Result<Self> {
        if boundaries.len() + 1 != generators.len().max(1) {
            return Err(Error::DimensionMismatch(format!(
                "{} degrees need {} boundary maps, got {}",
                generators.len(),
                generators.len().saturating_sub(1),
                boundaries.len()
            )));
        }
        for (i, b) in boundaries.iter().enumerate() {
            let n = i + 1;
            if b.rows() != generators[n - 1].len() || b.cols() != generators[n].len() {
                return Err(Error::DimensionMismatch(format!(
                    "boundary in degree {n} is {}x{}, expected {}x{}",
                    b.rows(),
                    b.cols(),
                    generators[n - 1].len(),
                    generators[n].len()
                )));
            }
        }
        Ok(ChainComplex {
            generators,
            boundaries,
        })
    }

    /// The complex with one generator in degree zero.
    pub fn point() -> Self {
        ChainComplex {
            generators: vec![vec!["pt".to_string()]],
            boundaries: Vec::new(),
        }
    }

    pub fn check_square_zero(&self) -> Result<()> {
        self.boundaries
            .par_windows(2)
            .enumerate()
            .try_for_each(|(i, w)| {
                if w[0].mul(&w[1])?.is_zero() {
                    Ok(())
                } else {
                    Err(Error::BoundarySquareNonzero { degree: i + 2 })
                }
            })
    }

    /// Highest degree with storage, or `None` for the zero complex.
    pub fn top_degree(&self) -> Option<usize> {
        self.generators.len().checked_sub(1)
    }

    pub fn rank(&self, n: usize) -> usize {
        self.generators.get(n).map_or(0, Vec::len)
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.generators.iter().map(Vec::len).collect()
    }

    pub fn generators(&self, n: usize) -> &[String] {
        self.generators.get(n).map_or(&[], Vec::as_slice)
    }

    /// `∂_n : C_n -> C_{n-1}`; `None` when it is the zero map by grading.
    pub fn boundary(&self, n: usize) -> Option<&IntegerMatrix> {
        n.checked_sub(1).and_then(|i| self.boundaries.get(i))
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.generators
            .iter()
            .enumerate()
            .map(|(i, g)| if i % 2 == 0 { g.len() as i64 } else { -(g.len() as i64) })
            .sum()
    }

    pub fn homology(&self) -> GradedAbelianGroup {
        match self.top_degree() {
            Some(top) => self.homology_in(0..=top),
            None => GradedAbelianGroup::zero(),
        }
    }

    /// Homology in the given degrees only; other degrees are reported as
    /// zero. Boundary reductions run in parallel and are assembled in degree
    /// order.
    pub fn homology_in(&self, degrees: RangeInclusive<usize>) -> GradedAbelianGroup {
        let (lo, hi) = (*degrees.start(), *degrees.end());
        if lo > hi {
            return GradedAbelianGroup::zero();
        }
        // ∂_lo ..= ∂_{hi+1}
        let forms: Vec<Option<SmithForm>> = (lo..=hi + 1)
            .into_par_iter()
            .map(|n| self.boundary(n).map(smith_normal_form))
            .collect();
        let rank_of = |n: usize| forms[n - lo].as_ref().map_or(0, |s| s.rank);
        let mut groups = vec![AbelianGroup::zero(); lo];
        for n in lo..=hi {
            let betti = self.rank(n) - rank_of(n) - rank_of(n + 1);
            let torsion = forms[n + 1 - lo]
                .as_ref()
                .map_or_else(Vec::new, |s| s.invariant_factors.clone());
            groups.push(AbelianGroup { betti, torsion });
        }
        GradedAbelianGroup::new(groups)
    }

    pub fn direct_sum(&self, other: &ChainComplex) -> ChainComplex {
        let len = self.generators.len().max(other.generators.len());
        let mut generators = Vec::with_capacity(len);
        for n in 0..len {
            let mut g = self.generators(n).to_vec();
            g.extend(other.generators(n).iter().cloned());
            generators.push(g);
        }
        let mut boundaries = Vec::new();
        for n in 1..len {
            let (r1, c1) = (self.rank(n - 1), self.rank(n));
            let mut triplets: Vec<(usize, usize, Int)> = Vec::new();
            if let Some(b) = self.boundary(n) {
                triplets.extend(b.triplets().map(|(r, c, v)| (r, c, v.clone())));
            }
            if let Some(b) = other.boundary(n) {
                triplets.extend(b.triplets().map(|(r, c, v)| (r + r1, c + c1, v.clone())));
            }
            let rows = r1 + other.rank(n - 1);
            let cols = c1 + other.rank(n);
            boundaries.push(
                IntegerMatrix::from_triplets(rows, cols, triplets).expect("block indices in range"),
            );
        }
        ChainComplex {
            generators,
            boundaries,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut degrees = BTreeMap::new();
        for (n, g) in self.generators.iter().enumerate() {
            let boundary = self.boundary(n).map(MatrixJson::from);
            degrees.insert(
                n.to_string(),
                DegreeJson {
                    generators: g.clone(),
                    boundary,
                },
            );
        }
        serde_json::to_value(ComplexJson { degrees }).expect("chain complexes serialize")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let parsed: ComplexJson =
            serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let mut by_degree: BTreeMap<usize, DegreeJson> = BTreeMap::new();
        for (k, v) in parsed.degrees {
            let n = k
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad degree key {k:?}")))?;
            by_degree.insert(n, v);
        }
        let top = by_degree.keys().next_back().copied();
        let len = top.map_or(0, |t| t + 1);
        let mut generators = vec![Vec::new(); len];
        let mut boundaries = Vec::new();
        for n in 0..len {
            if let Some(d) = by_degree.get(&n) {
                generators[n] = d.generators.clone();
            }
        }
        for n in 1..len {
            let (rows, cols) = (generators[n - 1].len(), generators[n].len());
            let m = match by_degree.get(&n).and_then(|d| d.boundary.as_ref()) {
                Some(b) => {
                    if b.rows != rows || b.cols != cols {
                        return Err(Error::DimensionMismatch(format!(
                            "boundary in degree {n} declared {}x{}, expected {rows}x{cols}",
                            b.rows, b.cols
                        )));
                    }
                    IntegerMatrix::from_triplets(rows, cols, b.entries.iter().cloned())?
                }
                None => IntegerMatrix::zeros(rows, cols),
            };
            boundaries.push(m);
        }
        ChainComplex::new(generators, boundaries)
    }
}

#[derive(Serialize, Deserialize)]
struct ComplexJson {
    degrees: BTreeMap<String, DegreeJson>,
}

#[derive(Serialize, Deserialize)]
struct DegreeJson {
    generators: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    boundary: Option<MatrixJson>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    fn complex(dims: &[usize], maps: &[Vec<Vec<i64>>]) -> Result<ChainComplex> {
        let generators = dims.iter().enumerate().map(|(i, &d)| names(&format!("c{i}_"), d)).collect();
        let boundaries = maps
            .iter()
            .zip(dims.windows(2))
            .map(|(m, w)| {
                if m.is_empty() {
                    Ok(IntegerMatrix::zeros(w[0], w[1]))
                } else {
                    IntegerMatrix::from_dense(m)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        ChainComplex::new(generators, boundaries)
    }

    #[test]
    fn circle() {
        let c = complex(&[1, 1], &[vec![vec![0]]]).unwrap();
        let h = c.homology();
        assert_eq!(h.degree(0), AbelianGroup::free(1));
        assert_eq!(h.degree(1), AbelianGroup::free(1));
    }

    #[test]
    fn projective_plane() {
        let c = complex(&[1, 1, 1], &[vec![vec![0]], vec![vec![2]]]).unwrap();
        let h = c.homology();
        assert_eq!(h.degree(0), AbelianGroup::free(1));
        assert_eq!(h.degree(1), AbelianGroup::new(0, vec![Int::from(2)]));
        assert!(h.degree(2).is_zero());
        assert_eq!(h.to_string(), "H0 = Z, H1 = Z/2");
    }

    #[test]
    fn square_nonzero_is_rejected() {
        let err = complex(&[1, 1, 1], &[vec![vec![1]], vec![vec![1]]]).unwrap_err();
        assert_eq!(err, Error::BoundarySquareNonzero { degree: 2 });
        assert!(matches!(
            complex(&[1, 2], &[vec![vec![1]]]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn direct_sum_adds_homology() {
        let a = complex(&[1, 1], &[vec![vec![0]]]).unwrap();
        let b = complex(&[1, 1, 1], &[vec![vec![0]], vec![vec![2]]]).unwrap();
        let s = a.direct_sum(&b);
        assert_eq!(s.homology(), a.homology().direct_sum(&b.homology()));
        assert_eq!(s.homology().degree(1).to_string(), "Z + Z/2");
    }

    #[test]
    fn partial_range() {
        let c = complex(&[1, 1, 1], &[vec![vec![0]], vec![vec![2]]]).unwrap();
        let h = c.homology_in(1..=1);
        assert!(h.degree(0).is_zero());
        assert_eq!(h.degree(1).torsion, vec![Int::from(2)]);
    }

    #[test]
    fn json_roundtrip() {
        let c = complex(&[2, 3, 1], &[vec![vec![1, 1, 0], vec![-1, -1, 0]], vec![vec![1], vec![-1], vec![0]]]).unwrap();
        let v = c.to_json();
        assert_eq!(v["degrees"]["1"]["boundary"]["entries"][0], serde_json::json!([0, 0, 1]));
        assert_eq!(ChainComplex::from_json(&v).unwrap(), c);
    }

    #[test]
    fn torsion_sums_are_chains() {
        let g = AbelianGroup::new(0, vec![Int::from(2)]).direct_sum(&AbelianGroup::new(0, vec![Int::from(3)]));
        assert_eq!(g.torsion, vec![Int::from(6)]);
        let g = AbelianGroup::new(1, vec![Int::from(4), Int::from(6), Int::from(1)]);
        assert_eq!(g.torsion, vec![Int::from(2), Int::from(12)]);
    }
}
