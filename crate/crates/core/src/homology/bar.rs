//! The discrete cluster monoid and its weight-graded bar complex.
//!
//! An element is a partition together with one non-basepoint label per
//! block, where a block of size `k` takes labels in `1..=m_k`. The product
//! stacks partitions and concatenates labels, so the monoid is free on the
//! elements whose partition is an entanglement type.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ChainComplex, Int, IntegerMatrix};
use crate::partitions::{enumerate_partitions, Partition};
use crate::{Error, Limits, Result};

/// The monoid of labelled partitions for a system of finite pointed label
/// sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteMonoidD {
    /// Number of non-basepoint labels for clusters of size `k`; sizes not
    /// listed have none.
    counts: BTreeMap<usize, usize>,
    max_weight: usize,
}

/// `[ξ; x]`: a partition with a label for each block, in block order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MonoidElement {
    pub partition: Partition,
    pub labels: Vec<u32>,
}

impl MonoidElement {
    pub fn identity() -> Self {
        MonoidElement {
            partition: Partition::empty(),
            labels: Vec::new(),
        }
    }

    pub fn new(partition: Partition, labels: Vec<u32>) -> Result<Self> {
        if labels.len() != partition.weight() {
            return Err(Error::InvalidLabels(format!(
                "{} labels for {} blocks",
                labels.len(),
                partition.weight()
            )));
        }
        if labels.contains(&0) {
            return Err(Error::InvalidLabels("label 0 is the basepoint".into()));
        }
        Ok(MonoidElement { partition, labels })
    }

    pub fn is_identity(&self) -> bool {
        self.partition.is_empty()
    }

    /// `|ξ|`, the grading of the bar complex.
    pub fn weight(&self) -> usize {
        self.partition.len()
    }

    pub fn multiply(&self, other: &MonoidElement) -> MonoidElement {
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        MonoidElement {
            partition: self.partition.stack(&other.partition),
            labels,
        }
    }
}

impl fmt::Display for MonoidElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.labels.iter().map(u32::to_string).collect();
        write!(f, "{}:{}", self.partition, labels.join(","))
    }
}

/// Splits an element along the factorization of its partition.
///
/// The factors of a stacked partition occupy consecutive intervals, so
/// their blocks are consecutive in block order and the labels split as
/// consecutive runs.
pub fn decompose_monoid_element(m: &MonoidElement) -> Vec<MonoidElement> {
    let mut out = Vec::new();
    let mut offset = 0;
    for e in m.partition.factorize() {
        let w = e.weight();
        out.push(MonoidElement {
            partition: e.into_partition(),
            labels: m.labels[offset..offset + w].to_vec(),
        });
        offset += w;
    }
    out
}

impl DiscreteMonoidD {
    /// `counts[k]` is the number of non-basepoint labels for size `k`.
    pub fn new(counts: BTreeMap<usize, usize>, max_weight: usize) -> Result<Self> {
        if counts.contains_key(&0) {
            return Err(Error::InvalidLabels("cluster sizes start at 1".into()));
        }
        Ok(DiscreteMonoidD { counts, max_weight })
    }

    pub fn label_count(&self, k: usize) -> usize {
        self.counts.get(&k).copied().unwrap_or(0)
    }

    pub fn max_weight(&self) -> usize {
        self.max_weight
    }

    pub fn contains(&self, m: &MonoidElement) -> bool {
        m.weight() <= self.max_weight
            && m.partition
                .profile()
                .iter()
                .zip(&m.labels)
                .all(|(&k, &x)| x >= 1 && (x as usize) <= self.label_count(k))
    }

    /// All elements of weight `w`, ordered by partition then labels.
    pub fn elements_of_weight(&self, w: usize, limits: &Limits) -> Result<Vec<MonoidElement>> {
        self.check_weight(w, limits)?;
        let mut out = Vec::new();
        for p in enumerate_partitions(w, limits)? {
            let ranges: Vec<u32> = p.profile().iter().map(|&k| self.label_count(k) as u32).collect();
            if ranges.contains(&0) {
                continue;
            }
            let mut labels = vec![1u32; ranges.len()];
            'odometer: loop {
                out.push(MonoidElement {
                    partition: p.clone(),
                    labels: labels.clone(),
                });
                let mut i = labels.len();
                loop {
                    if i == 0 {
                        break 'odometer;
                    }
                    i -= 1;
                    if labels[i] < ranges[i] {
                        labels[i] += 1;
                        continue 'odometer;
                    }
                    labels[i] = 1;
                }
            }
        }
        Ok(out)
    }

    fn check_weight(&self, w: usize, limits: &Limits) -> Result<()> {
        limits.check("bar weight", w, self.max_weight.min(limits.max_bar_weight))
    }
}

/// The normalized bar complex of `monoid` in weight `n`.
///
/// Degree `s` is spanned by `[m_1 | ... | m_s]` with every `m_i` a
/// non-identity element and `Σ|m_i| = n`; weight zero is the single empty
/// bar in degree zero. The differential keeps only the inner faces
/// `Σ_{i=1}^{s-1} (-1)^i [.. | m_i m_{i+1} | ..]`, since the outer faces
/// leave the weight-`n` piece. Degrees above `max_degree` are dropped.
pub fn build_bar_complex(
    monoid: &DiscreteMonoidD,
    n: usize,
    max_degree: usize,
    limits: &Limits,
) -> Result<ChainComplex> {
    monoid.check_weight(n, limits)?;
    if n == 0 {
        return Ok(ChainComplex::point());
    }
    let by_weight: Vec<Vec<MonoidElement>> = (0..=n)
        .map(|w| {
            if w == 0 {
                Ok(Vec::new())
            } else {
                monoid.elements_of_weight(w, limits)
            }
        })
        .collect::<Result<_>>()?;
    let mut index: HashMap<&MonoidElement, u32> = HashMap::new();
    let mut elements: Vec<&MonoidElement> = Vec::new();
    for list in &by_weight {
        for m in list {
            index.insert(m, elements.len() as u32);
            elements.push(m);
        }
    }

    let top = n.min(max_degree);
    // chains[s]: bars of length s in weight n, as element indices
    let mut chains: Vec<Vec<Vec<u32>>> = vec![Vec::new(); top + 1];
    for s in 1..=top {
        compositions(n, s, &mut |parts| {
            let mut cur: Vec<u32> = Vec::with_capacity(s);
            push_bars(parts, &by_weight, &index, &mut cur, &mut chains[s]);
        });
    }
    let lookup: Vec<HashMap<&[u32], usize>> = chains
        .iter()
        .map(|list| list.iter().enumerate().map(|(i, c)| (c.as_slice(), i)).collect())
        .collect();

    let mut boundaries = Vec::with_capacity(top);
    for s in 1..=top {
        let mut triplets = Vec::new();
        for (col, bar) in chains[s].iter().enumerate() {
            for i in 1..s {
                let product = elements[bar[i - 1] as usize].multiply(elements[bar[i] as usize]);
                let mut face = Vec::with_capacity(s - 1);
                face.extend_from_slice(&bar[..i - 1]);
                face.push(index[&product]);
                face.extend_from_slice(&bar[i + 1..]);
                let row = lookup[s - 1][face.as_slice()];
                let sign = if i % 2 == 0 { 1 } else { -1 };
                triplets.push((row, col, Int::from(sign)));
            }
        }
        boundaries.push(IntegerMatrix::from_triplets(
            chains[s - 1].len(),
            chains[s].len(),
            triplets,
        )?);
    }
    let generators = chains
        .iter()
        .map(|list| {
            list.iter()
                .map(|bar| {
                    let parts: Vec<String> = bar.iter().map(|&i| elements[i as usize].to_string()).collect();
                    format!("[{}]", parts.join(" ; "))
                })
                .collect()
        })
        .collect();
    ChainComplex::new(generators, boundaries)
}

/// Calls `f` with every composition of `n` into `s` positive parts, in
/// lexicographic order.
fn compositions(n: usize, s: usize, f: &mut dyn FnMut(&[usize])) {
    fn go(rest: usize, slots: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if slots == 0 {
            if rest == 0 {
                f(cur);
            }
            return;
        }
        for first in 1..=rest.saturating_sub(slots - 1) {
            cur.push(first);
            go(rest - first, slots - 1, cur, f);
            cur.pop();
        }
    }
    go(n, s, &mut Vec::with_capacity(s), f);
}

fn push_bars(
    parts: &[usize],
    by_weight: &[Vec<MonoidElement>],
    index: &HashMap<&MonoidElement, u32>,
    cur: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    let Some((&w, rest)) = parts.split_first() else {
        out.push(cur.clone());
        return;
    };
    for m in &by_weight[w] {
        cur.push(index[m]);
        push_bars(rest, by_weight, index, cur, out);
        cur.pop();
    }
}
