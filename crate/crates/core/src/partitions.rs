//! Ordered set partitions, the stacking monoid and its free generators.
//!
//! A partition of `{1..n}` is stored as a restricted growth string: entry
//! `i` is the index of the block containing `i + 1`, and blocks are numbered
//! in order of their minima. This is exactly the canonical form (blocks sorted
//! internally and by minima), so structural equality is monoid equality.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Limits, Result};

/// A canonical partition of `{1..n}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition {
    rgs: Vec<u16>,
    weight: usize,
}

impl Partition {
    /// The neutral element of the stacking monoid.
    pub fn empty() -> Self {
        Partition::default()
    }

    /// Builds a partition from a restricted growth string.
    pub fn from_rgs(rgs: Vec<u16>) -> Result<Self> {
        let mut next = 0u16;
        for &b in &rgs {
            if b > next {
                return Err(Error::InvalidPartition(format!(
                    "{rgs:?} is not a restricted growth string"
                )));
            }
            if b == next {
                next += 1;
            }
        }
        Ok(Partition {
            rgs,
            weight: next as usize,
        })
    }

    fn from_rgs_unchecked(rgs: Vec<u16>) -> Self {
        let weight = rgs.iter().map(|&b| b as usize + 1).max().unwrap_or(0);
        Partition { rgs, weight }
    }

    /// Canonicalizes a list of blocks over `{1..n}`.
    ///
    /// Blocks may be given in any order and unsorted; they must be
    /// non-empty, pairwise disjoint, and cover an initial segment of the
    /// positive integers.
    pub fn canonicalize(raw_blocks: &[Vec<usize>]) -> Result<Self> {
        let n: usize = raw_blocks.iter().map(Vec::len).sum();
        let mut owner: Vec<Option<usize>> = vec![None; n];
        for (b, block) in raw_blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition(format!("block {} is empty", b + 1)));
            }
            for &x in block {
                if x == 0 || x > n {
                    return Err(Error::InvalidPartition(format!(
                        "element {x} is outside the ground set {{1..{n}}} (gap or out of range)"
                    )));
                }
                if let Some(prev) = owner[x - 1] {
                    return Err(Error::InvalidPartition(format!(
                        "element {x} occurs in blocks {} and {} (overlap)",
                        prev + 1,
                        b + 1
                    )));
                }
                owner[x - 1] = Some(b);
            }
        }
        // every slot is filled: n elements, no repeats, all within 1..=n
        let mut relabel: Vec<Option<u16>> = vec![None; raw_blocks.len()];
        let mut next = 0u16;
        let rgs = owner
            .into_iter()
            .map(|o| {
                let b = o.expect("covered");
                *relabel[b].get_or_insert_with(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect();
        Ok(Partition {
            rgs,
            weight: raw_blocks.len(),
        })
    }

    /// `|xi|`, the size of the ground set.
    pub fn len(&self) -> usize {
        self.rgs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rgs.is_empty()
    }

    /// `#xi`, the number of blocks.
    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn rgs(&self) -> &[u16] {
        &self.rgs
    }

    /// Blocks as sorted lists of 1-based elements, ordered by minima.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.weight];
        for (i, &b) in self.rgs.iter().enumerate() {
            blocks[b as usize].push(i + 1);
        }
        blocks
    }

    /// `K(xi)`, the list of block sizes in block order.
    pub fn profile(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.weight];
        for &b in &self.rgs {
            sizes[b as usize] += 1;
        }
        sizes
    }

    /// The stacking product: `other` is shifted by `|self|` and appended.
    pub fn stack(&self, other: &Partition) -> Partition {
        let shift = self.weight as u16;
        let mut rgs = Vec::with_capacity(self.len() + other.len());
        rgs.extend_from_slice(&self.rgs);
        rgs.extend(other.rgs.iter().map(|&b| b + shift));
        Partition {
            rgs,
            weight: self.weight + other.weight,
        }
    }

    /// Stacks a sequence of partitions left to right.
    pub fn stack_all<'a, I>(parts: I) -> Partition
    where
        I: IntoIterator<Item = &'a Partition>,
    {
        parts
            .into_iter()
            .fold(Partition::empty(), |acc, p| acc.stack(p))
    }

    /// Deletes the block with 1-based index `index` and relabels the
    /// remaining ground set order-preservingly.
    pub fn remove_block(&self, index: usize) -> Result<Partition> {
        if index == 0 || index > self.weight {
            return Err(Error::BlockIndexOutOfRange {
                index,
                weight: self.weight,
            });
        }
        let removed = (index - 1) as u16;
        let rgs = self
            .rgs
            .iter()
            .filter(|&&b| b != removed)
            .map(|&b| if b > removed { b - 1 } else { b })
            .collect();
        Ok(Partition {
            rgs,
            weight: self.weight - 1,
        })
    }

    /// Cut positions `m` (1 <= m < n) at which no block straddles, i.e. every
    /// block lies entirely in `{1..m}` or in `{m+1..n}`.
    fn clean_cuts(&self) -> Vec<usize> {
        let mut last = vec![0usize; self.weight];
        for (i, &b) in self.rgs.iter().enumerate() {
            last[b as usize] = i;
        }
        let mut reach = 0usize;
        let mut cuts = Vec::new();
        for (i, &b) in self.rgs.iter().enumerate() {
            reach = reach.max(last[b as usize]);
            if reach == i && i + 1 < self.len() {
                cuts.push(i + 1);
            }
        }
        cuts
    }

    /// True iff the partition is a non-empty entanglement type.
    pub fn is_indecomposable(&self) -> bool {
        !self.is_empty() && self.clean_cuts().is_empty()
    }

    /// The unique factorization into entanglement types.
    pub fn factorize(&self) -> Vec<EntanglementType> {
        if self.is_empty() {
            return Vec::new();
        }
        let mut bounds = self.clean_cuts();
        bounds.push(self.len());
        let mut factors = Vec::with_capacity(bounds.len());
        let mut start = 0usize;
        let mut offset = 0u16;
        for end in bounds {
            let rgs: Vec<u16> = self.rgs[start..end].iter().map(|&b| b - offset).collect();
            let part = Partition::from_rgs_unchecked(rgs);
            offset += part.weight as u16;
            factors.push(EntanglementType::from_indecomposable(part));
            start = end;
        }
        factors
    }

    /// Smallest `w` with `xi` in the submonoid generated by types of weight
    /// at most `w`.
    pub fn filtration_level(&self) -> usize {
        self.factorize()
            .iter()
            .map(EntanglementType::weight)
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Partition({self})")
    }
}

/// Blocks joined by `|`, elements by `,`; the empty partition prints as `()`.
impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("()");
        }
        let text = self
            .blocks()
            .iter()
            .map(|b| {
                b.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect::<Vec<_>>()
            .join("|");
        f.write_str(&text)
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "()" || s == "∅" {
            return Ok(Partition::empty());
        }
        let blocks = s
            .split('|')
            .map(|block| {
                block
                    .split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<usize>()
                            .map_err(|e| Error::Parse(format!("bad element {x:?}: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::canonicalize(&blocks)
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.blocks().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let blocks = Vec::<Vec<usize>>::deserialize(deserializer)?;
        Partition::canonicalize(&blocks).map_err(serde::de::Error::custom)
    }
}

/// An indecomposable partition together with its weight and profile.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub struct EntanglementType {
    partition: Partition,
    profile: Vec<usize>,
}

impl EntanglementType {
    pub fn new(partition: Partition) -> Result<Self> {
        if !partition.is_indecomposable() {
            return Err(Error::InvalidPartition(format!(
                "{partition} is not an entanglement type"
            )));
        }
        Ok(Self::from_indecomposable(partition))
    }

    fn from_indecomposable(partition: Partition) -> Self {
        let profile = partition.profile();
        EntanglementType { partition, profile }
    }

    /// The single-block type `({1..k})` of weight one.
    pub fn trivial(k: usize) -> Self {
        assert!(k >= 1, "entanglement types are non-empty");
        Self::from_indecomposable(Partition::from_rgs_unchecked(vec![0; k]))
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn into_partition(self) -> Partition {
        self.partition
    }

    /// `#e`, the number of blocks.
    pub fn weight(&self) -> usize {
        self.profile.len()
    }

    /// `|e|`, the size of the ground set.
    pub fn size(&self) -> usize {
        self.partition.len()
    }

    pub fn profile(&self) -> &[usize] {
        &self.profile
    }
}

impl fmt::Display for EntanglementType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.partition.fmt(f)
    }
}

/// Constraints for the backtracking enumerator.
#[derive(Clone, Copy)]
struct Shape {
    max_block: usize,
    max_blocks: usize,
    /// If set, every block must have exactly this size.
    uniform: Option<usize>,
}

/// Visits every restricted growth string of length `n` satisfying `shape`,
/// in lexicographic order.
fn visit_partitions(n: usize, shape: Shape, visit: &mut dyn FnMut(&[u16])) {
    fn go(
        n: usize,
        shape: Shape,
        rgs: &mut Vec<u16>,
        sizes: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[u16]),
    ) {
        let i = rgs.len();
        if i == n {
            if let Some(k) = shape.uniform {
                if sizes.iter().any(|&s| s != k) {
                    return;
                }
            }
            visit(rgs);
            return;
        }
        if let Some(k) = shape.uniform {
            let deficit: usize = sizes.iter().map(|&s| k - s).sum();
            if deficit > n - i {
                return;
            }
        }
        for b in 0..=sizes.len() {
            if b == sizes.len() {
                if sizes.len() == shape.max_blocks {
                    break;
                }
                sizes.push(0);
            } else if sizes[b] == shape.max_block {
                continue;
            }
            sizes[b] += 1;
            rgs.push(b as u16);
            go(n, shape, rgs, sizes, visit);
            rgs.pop();
            sizes[b] -= 1;
            if sizes[b] == 0 {
                sizes.pop();
            }
        }
    }
    let mut rgs = Vec::with_capacity(n);
    let mut sizes = Vec::new();
    go(n, shape, &mut rgs, &mut sizes, visit);
}

/// All canonical partitions of `{1..n}`, in lexicographic order of their
/// restricted growth strings.
pub fn enumerate_partitions(n: usize, limits: &Limits) -> Result<Vec<Partition>> {
    limits.check("partition size n", n, limits.max_partition_size)?;
    let mut out = Vec::new();
    visit_partitions(
        n,
        Shape {
            max_block: n.max(1),
            max_blocks: n,
            uniform: None,
        },
        &mut |rgs| out.push(Partition::from_rgs_unchecked(rgs.to_vec())),
    );
    Ok(out)
}

/// All entanglement types of size `n`.
pub fn enumerate_types(n: usize, limits: &Limits) -> Result<Vec<EntanglementType>> {
    limits.check("partition size n", n, limits.max_partition_size)?;
    let mut out = Vec::new();
    if n == 0 {
        return Ok(out);
    }
    visit_partitions(
        n,
        Shape {
            max_block: n,
            max_blocks: n,
            uniform: None,
        },
        &mut |rgs| {
            let p = Partition::from_rgs_unchecked(rgs.to_vec());
            if p.is_indecomposable() {
                out.push(EntanglementType::from_indecomposable(p));
            }
        },
    );
    Ok(out)
}

/// All entanglement types of size `n` whose block sizes all lie in
/// `allowed` and whose weight is at most `max_weight`.
pub fn enumerate_types_with_blocks(
    n: usize,
    allowed: &[usize],
    max_weight: usize,
    limits: &Limits,
) -> Result<Vec<EntanglementType>> {
    limits.check("partition size n", n, limits.max_partition_size)?;
    let mut out = Vec::new();
    let Some(&largest) = allowed.iter().max() else {
        return Ok(out);
    };
    if n == 0 {
        return Ok(out);
    }
    visit_partitions(
        n,
        Shape {
            max_block: largest,
            max_blocks: max_weight.min(n),
            uniform: None,
        },
        &mut |rgs| {
            let p = Partition::from_rgs_unchecked(rgs.to_vec());
            if p.profile().iter().all(|s| allowed.contains(s)) && p.is_indecomposable() {
                out.push(EntanglementType::from_indecomposable(p));
            }
        },
    );
    Ok(out)
}

/// The elements of `E[k]` of weight `w`: indecomposable partitions of
/// `{1..wk}` into `w` blocks of size `k`.
pub fn enumerate_types_uniform(k: usize, w: usize, limits: &Limits) -> Result<Vec<EntanglementType>> {
    if k == 0 || w == 0 {
        return Err(Error::InvalidPartition(format!(
            "uniform types need k >= 1 and w >= 1, got k = {k}, w = {w}"
        )));
    }
    limits.check("partition size w*k", w * k, limits.max_partition_size)?;
    let mut out = Vec::new();
    visit_partitions(
        w * k,
        Shape {
            max_block: k,
            max_blocks: w,
            uniform: Some(k),
        },
        &mut |rgs| {
            let p = Partition::from_rgs_unchecked(rgs.to_vec());
            if p.is_indecomposable() {
                out.push(EntanglementType::from_indecomposable(p));
            }
        },
    );
    Ok(out)
}

/// Bell numbers `B_0..=B_n` via the Bell triangle.
pub fn bell_numbers(n: usize) -> Vec<BigUint> {
    let mut bells = vec![BigUint::one()];
    let mut row = vec![BigUint::one()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(row.last().expect("non-empty row").clone());
        for x in &row {
            let v = next.last().expect("non-empty") + x;
            next.push(v);
        }
        bells.push(next[0].clone());
        row = next;
    }
    bells.truncate(n + 1);
    bells
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// Number of partitions of `{1..wk}` into `w` blocks of size `k`:
/// `(wk)! / (k!^w w!)`.
pub fn uniform_partition_count(k: usize, w: usize) -> BigUint {
    factorial(w * k) / (factorial(k).pow(w as u32) * factorial(w))
}

/// Counts of indecomposables obtained by inverting the generating series of
/// all partitions, using `P(x) = 1 / (1 - E(x))`.
///
/// Without `k`, entry `n - 1` is the number of types of size `n`. With
/// `Some(k)`, the grading is by weight inside `E[k]`, and entry `w - 1` is
/// the number of types with `w` blocks of size `k`.
pub fn count_types_by_inversion(n_max: usize, k: Option<usize>) -> Vec<BigUint> {
    let totals: Vec<BigInt> = match k {
        None => bell_numbers(n_max).into_iter().map(BigInt::from).collect(),
        Some(k) => (0..=n_max)
            .map(|w| BigInt::from(uniform_partition_count(k, w)))
            .collect(),
    };
    // P_n = sum_{j=1..n} E_j P_{n-j}
    let mut gens: Vec<BigInt> = vec![BigInt::zero(); n_max + 1];
    for n in 1..=n_max {
        let mut e = totals[n].clone();
        for j in 1..n {
            e -= &gens[j] * &totals[n - j];
        }
        gens[n] = e;
    }
    gens.into_iter()
        .skip(1)
        .map(|e| e.to_biguint().expect("indecomposable counts are non-negative"))
        .collect()
}
