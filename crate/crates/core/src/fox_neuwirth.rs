//! Cellular chains for coloured configuration spaces of `R^d` with sign-twisted
//! coefficients.
//!
//! Points of a configuration are sorted lexicographically. Two consecutive
//! points are separated at depth `s` when they agree in the first `s - 1`
//! coordinates and differ in coordinate `s`. A Fox-Neuwirth cell is a word of
//! colours with a depth between consecutive letters; it has dimension
//! `n*d - Σ(s_i - 1)`. Points of the same colour are indistinguishable, so
//! cells of the coloured quotient are words in the colours themselves.
//!
//! The complex built here is the compactly supported cochain complex of this
//! stratification with coefficients in the sign system, reindexed by
//! Poincaré duality: a word of depth sum `Σ(s_i - 1) = i` is a generator in
//! homological degree `i`, and homology equals the twisted homology of the
//! configuration space.
//!
//! Sign conventions. A cell is parametrized by, for each coordinate `c`
//! from 1 to `d`, the values of coordinate `c` on each run of points that
//! agree in coordinates `1..c-1` and are separated in `c`, in run order.
//! Merging two columns at level `j` shuffles their `(j+1)`-subgroups; the
//! incidence number is the sign of the resulting reordering of parameters,
//! the position of the new level-`j` parameter, and the character
//! `Π sgn(σ_i)^(t_i + d)` of the permutation realigning same-colour points
//! (the `+ d` accounts for the orientation character of `R^{nd}`).

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::homology::{ChainComplex, GradedAbelianGroup, Int, IntegerMatrix};
use crate::{Error, Limits, Result};

/// Colour names with positive multiplicities; `n = |α|` is the total.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ColourMultiset {
    colours: Vec<(String, usize)>,
}

impl ColourMultiset {
    /// Colours keep the given order; zero counts are dropped.
    pub fn new<I, S>(counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut colours: Vec<(String, usize)> = Vec::new();
        for (name, count) in counts {
            let name = name.into();
            if colours.iter().any(|(c, _)| *c == name) {
                return Err(Error::InvalidColours(format!("colour {name:?} listed twice")));
            }
            if count > 0 {
                colours.push((name, count));
            }
        }
        if colours.len() > u8::MAX as usize {
            return Err(Error::InvalidColours("too many colours".into()));
        }
        Ok(ColourMultiset { colours })
    }

    /// Colours named `"0"`, `"1"`, ... with the given counts.
    pub fn from_counts(counts: &[usize]) -> Self {
        ColourMultiset::new(counts.iter().enumerate().map(|(i, &c)| (i.to_string(), c)))
            .expect("distinct generated names")
    }

    pub fn total(&self) -> usize {
        self.colours.iter().map(|(_, c)| c).sum()
    }

    pub fn colours(&self) -> &[(String, usize)] {
        &self.colours
    }

    pub fn counts(&self) -> Vec<usize> {
        self.colours.iter().map(|(_, c)| *c).collect()
    }

    pub fn count(&self, colour: &str) -> usize {
        self.colours
            .iter()
            .find(|(c, _)| c == colour)
            .map_or(0, |(_, n)| *n)
    }

    /// `|α|! / Π α_i!`, the number of distinct colour words.
    pub fn multinomial(&self) -> u128 {
        let mut acc: u128 = 1;
        let mut placed: u128 = 0;
        for (_, c) in &self.colours {
            for j in 1..=*c as u128 {
                placed += 1;
                acc = acc * placed / j;
            }
        }
        acc
    }
}

impl fmt::Display for ColourMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.colours.iter().map(|(c, n)| format!("{c}:{n}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Parity bit per colour; odd colours twist by the sign of permutations of
/// their points.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParityMap {
    bits: BTreeMap<String, u8>,
}

impl ParityMap {
    pub fn new(bits: BTreeMap<String, u8>) -> Result<Self> {
        if let Some((c, b)) = bits.iter().find(|(_, &b)| b > 1) {
            return Err(Error::InvalidColours(format!("parity of {c:?} is {b}, not a bit")));
        }
        Ok(ParityMap { bits })
    }

    pub fn trivial(alpha: &ColourMultiset) -> Self {
        ParityMap {
            bits: alpha.colours.iter().map(|(c, _)| (c.clone(), 0)).collect(),
        }
    }

    pub fn constant(alpha: &ColourMultiset, bit: u8) -> Self {
        ParityMap {
            bits: alpha.colours.iter().map(|(c, _)| (c.clone(), bit & 1)).collect(),
        }
    }

    pub fn set(&mut self, colour: impl Into<String>, bit: u8) {
        self.bits.insert(colour.into(), bit & 1);
    }

    pub fn get(&self, colour: &str) -> Option<u8> {
        self.bits.get(colour).copied()
    }

    /// Parity bits in the colour order of `alpha`.
    fn resolve(&self, alpha: &ColourMultiset) -> Result<Vec<u8>> {
        alpha
            .colours
            .iter()
            .map(|(c, _)| {
                self.get(c)
                    .ok_or_else(|| Error::InvalidColours(format!("no parity for colour {c:?}")))
            })
            .collect()
    }
}

/// A Fox-Neuwirth cell: colour indices and the `n - 1` depths between them.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FNWord {
    pub letters: Vec<u8>,
    pub depths: Vec<u8>,
}

impl FNWord {
    /// `Σ(s_i - 1)`, the homological degree after duality.
    pub fn degree(&self) -> usize {
        self.depths.iter().map(|&s| s as usize - 1).sum()
    }

    /// Dimension of the cell, `n*d - degree`.
    pub fn cell_dimension(&self, d: usize) -> usize {
        self.letters.len() * d - self.degree()
    }
}

impl fmt::Display for FNWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, "[{}]", self.depths[i - 1])?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

fn check_bounds(alpha: &ColourMultiset, d: usize, limits: &Limits) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidColours("dimension must be positive".into()));
    }
    limits.check("points |alpha|", alpha.total(), limits.max_points)?;
    limits.check("dimension d", d, limits.max_dimension)
}

/// Distinct arrangements of the letters, in lexicographic order.
fn colour_words(alpha: &ColourMultiset) -> Vec<Vec<u8>> {
    let mut word: Vec<u8> = alpha
        .colours
        .iter()
        .enumerate()
        .flat_map(|(i, (_, c))| std::iter::repeat_n(i as u8, *c))
        .collect();
    let mut out = vec![word.clone()];
    // next permutation
    loop {
        let Some(i) = (1..word.len()).rev().find(|&i| word[i - 1] < word[i]) else {
            break;
        };
        let j = (i..word.len()).rev().find(|&j| word[j] > word[i - 1]).expect("pivot exists");
        word.swap(i - 1, j);
        word[i..].reverse();
        out.push(word.clone());
    }
    out
}

/// Depth sequences of length `len` with entries in `1..=d` and degree at
/// most `max_degree`, grouped by degree.
fn depth_sequences(len: usize, d: usize, max_degree: usize) -> Vec<Vec<Vec<u8>>> {
    fn go(
        len: usize,
        d: usize,
        budget: usize,
        cur: &mut Vec<u8>,
        deg: usize,
        out: &mut Vec<Vec<Vec<u8>>>,
    ) {
        if cur.len() == len {
            out[deg].push(cur.clone());
            return;
        }
        for s in 1..=d {
            if deg + s - 1 > budget {
                break;
            }
            cur.push(s as u8);
            go(len, d, budget, cur, deg + s - 1, out);
            cur.pop();
        }
    }
    let top = max_degree.min(len * (d - 1));
    let mut out = vec![Vec::new(); top + 1];
    go(len, d, top, &mut Vec::with_capacity(len), 0, &mut out);
    out
}

/// Cells by homological degree, up to `max_degree`.
fn cells_up_to(alpha: &ColourMultiset, d: usize, max_degree: usize) -> Vec<Vec<FNWord>> {
    let n = alpha.total();
    if n == 0 {
        return vec![vec![FNWord {
            letters: Vec::new(),
            depths: Vec::new(),
        }]];
    }
    let words = colour_words(alpha);
    depth_sequences(n - 1, d, max_degree)
        .into_iter()
        .map(|seqs| {
            let mut cells = Vec::with_capacity(words.len() * seqs.len());
            for w in &words {
                for s in &seqs {
                    cells.push(FNWord {
                        letters: w.clone(),
                        depths: s.clone(),
                    });
                }
            }
            cells
        })
        .collect()
}

/// All cells of `C^α(R^d)`, indexed by homological degree `0..=(d-1)(n-1)`.
/// Cell dimension is `n*d` minus the index.
pub fn fn_cells(alpha: &ColourMultiset, d: usize, limits: &Limits) -> Result<Vec<Vec<FNWord>>> {
    check_bounds(alpha, d, limits)?;
    Ok(cells_up_to(alpha, d, usize::MAX))
}

/// The twisted Fox-Neuwirth complex; homology is `M_•(R^d; α)`.
pub fn fn_complex(
    alpha: &ColourMultiset,
    d: usize,
    parity: &ParityMap,
    limits: &Limits,
) -> Result<ChainComplex> {
    fn_complex_truncated(alpha, d, parity, usize::MAX, limits)
}

/// The complex in degrees `0..=max_degree` only. Homology is correct in
/// degrees below `max_degree`.
pub fn fn_complex_truncated(
    alpha: &ColourMultiset,
    d: usize,
    parity: &ParityMap,
    max_degree: usize,
    limits: &Limits,
) -> Result<ChainComplex> {
    check_bounds(alpha, d, limits)?;
    let twist: Vec<u8> = parity
        .resolve(alpha)?
        .into_iter()
        .map(|t| (t as usize + d) as u8 % 2)
        .collect();
    let cells = cells_up_to(alpha, d, max_degree);
    let mut boundaries = Vec::with_capacity(cells.len().saturating_sub(1));
    for i in 1..cells.len() {
        let index: HashMap<&FNWord, usize> =
            cells[i - 1].iter().enumerate().map(|(k, w)| (w, k)).collect();
        let columns: Vec<Vec<(usize, i64)>> = cells[i]
            .par_iter()
            .map(|w| boundary_of(w, d, &twist, &index))
            .collect::<Result<_>>()?;
        let triplets = columns
            .into_iter()
            .enumerate()
            .flat_map(|(col, entries)| entries.into_iter().map(move |(row, v)| (row, col, Int::from(v))));
        boundaries.push(IntegerMatrix::from_triplets(
            cells[i - 1].len(),
            cells[i].len(),
            triplets,
        )?);
    }
    let generators = cells
        .iter()
        .map(|list| list.iter().map(FNWord::to_string).collect())
        .collect();
    ChainComplex::new(generators, boundaries)
}

/// `1 + #{depths <= c}` over a slice of depths.
fn runs(depths: &[u8], c: usize) -> usize {
    1 + depths.iter().filter(|&&s| s as usize <= c).count()
}

/// Boundary of one word as `(row, coefficient)` pairs, rows indexing the
/// words of one lower degree.
fn boundary_of(
    f: &FNWord,
    d: usize,
    twist: &[u8],
    index: &HashMap<&FNWord, usize>,
) -> Result<Vec<(usize, i64)>> {
    let n = f.letters.len();
    let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
    for j in 1..d {
        let mut start = 0;
        while start < n {
            // maximal run [start, end] with internal depths > j
            let mut end = start;
            while end + 1 < n && f.depths[end] as usize > j {
                end += 1;
            }
            if end > start {
                merge_terms(f, d, j, start, end, twist, index, &mut acc)?;
            }
            start = end + 1;
        }
    }
    Ok(acc.into_iter().filter(|&(_, v)| v != 0).collect())
}

#[allow(clippy::too_many_arguments)]
fn merge_terms(
    f: &FNWord,
    d: usize,
    j: usize,
    start: usize,
    end: usize,
    twist: &[u8],
    index: &HashMap<&FNWord, usize>,
    acc: &mut BTreeMap<usize, i64>,
) -> Result<()> {
    // (j+1)-subgroups as point ranges
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut g0 = start;
    for q in start..end {
        if f.depths[q] as usize == j + 1 {
            groups.push((g0, q));
            g0 = q + 1;
        }
    }
    groups.push((g0, end));
    let m = groups.len();
    if m < 2 {
        return Ok(());
    }
    let group_runs: Vec<Vec<usize>> = groups
        .iter()
        .map(|&(a, b)| (0..=d).map(|c| runs(&f.depths[a..b], c)).collect())
        .collect();
    for mask in 1u32..(1 << m) - 1 {
        let in_a = |g: usize| mask >> g & 1 == 1;
        let mut letters = f.letters[..start].to_vec();
        let mut depths = f.depths[..start].to_vec();
        let mut sources: Vec<usize> = Vec::new();
        let order: Vec<usize> = (0..m).filter(|&g| in_a(g)).chain((0..m).filter(|&g| !in_a(g))).collect();
        let size_a = order.iter().filter(|&&g| in_a(g)).count();
        for (k, &g) in order.iter().enumerate() {
            if k > 0 {
                depths.push(if k == size_a { j as u8 } else { (j + 1) as u8 });
            }
            let (a, b) = groups[g];
            for p in a..=b {
                letters.push(f.letters[p]);
                sources.push(p);
                if p < b {
                    depths.push(f.depths[p]);
                }
            }
        }
        if end + 1 < f.letters.len() {
            depths.extend_from_slice(&f.depths[end..]);
            letters.extend_from_slice(&f.letters[end + 1..]);
        }
        let e = FNWord { letters, depths };

        // position of the new level-j parameter
        let q = start + sources.iter().take_while(|&&p| in_a(group_of(&groups, p))).count() - 1;
        let mut exponent: usize = (1..j).map(|c| runs(&e.depths, c)).sum::<usize>()
            + e.depths[..q].iter().filter(|&&s| s as usize <= j).count()
            + 1
            + 1;
        // reordering of parameters at levels above j
        for x in (0..m).filter(|&g| in_a(g)) {
            for y in (0..x).filter(|&g| !in_a(g)) {
                for c in j + 1..=d {
                    exponent += group_runs[x][c] * group_runs[y][c];
                }
            }
        }
        // realignment of same-colour points
        for &(ya, yb) in groups.iter().enumerate().filter(|(g, _)| in_a(*g)).map(|(_, r)| r) {
            for y in ya..=yb {
                let colour = f.letters[y];
                if twist[colour as usize] == 0 {
                    continue;
                }
                exponent += (start..y)
                    .filter(|&x| !in_a(group_of(&groups, x)) && f.letters[x] == colour)
                    .count();
            }
        }
        let row = *index.get(&e).ok_or_else(|| {
            Error::InvalidColours(format!("boundary word {e} of {f} is not a cell"))
        })?;
        let sign = if exponent.is_multiple_of(2) { 1 } else { -1 };
        *acc.entry(row).or_insert(0) += sign;
    }
    Ok(())
}

fn group_of(groups: &[(usize, usize)], p: usize) -> usize {
    groups
        .iter()
        .position(|&(a, b)| a <= p && p <= b)
        .expect("point inside the run")
}

/// `M_•(R^d; α)` in degrees `degrees`.
pub fn twisted_homology(
    alpha: &ColourMultiset,
    d: usize,
    parity: &ParityMap,
    degrees: std::ops::RangeInclusive<usize>,
    limits: &Limits,
) -> Result<GradedAbelianGroup> {
    let hi = *degrees.end();
    let c = fn_complex_truncated(alpha, d, parity, hi.saturating_add(1), limits)?;
    let top = c.top_degree().unwrap_or(0);
    Ok(c.homology_in(*degrees.start()..=hi.min(top)))
}

/// Input shape `{"alpha":[{"colour":..,"count":..}], "d":.., "parity":{..}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ColouredInput {
    pub alpha: Vec<ColourCount>,
    pub d: usize,
    #[serde(default)]
    pub parity: BTreeMap<String, u8>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ColourCount {
    pub colour: String,
    pub count: usize,
}

impl ColouredInput {
    /// Resolves the input; colours missing from `parity` are even.
    pub fn resolve(&self) -> Result<(ColourMultiset, ParityMap)> {
        let alpha = ColourMultiset::new(self.alpha.iter().map(|c| (c.colour.clone(), c.count)))?;
        if let Some(c) = self.parity.keys().find(|c| !self.alpha.iter().any(|a| &a.colour == *c)) {
            return Err(Error::InvalidColours(format!("parity given for unknown colour {c:?}")));
        }
        let mut parity = ParityMap::trivial(&alpha);
        for (c, &b) in &self.parity {
            if b > 1 {
                return Err(Error::InvalidColours(format!("parity of {c:?} is {b}, not a bit")));
            }
            parity.set(c.clone(), b);
        }
        Ok((alpha, parity))
    }
}
