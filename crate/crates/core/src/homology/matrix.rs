use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use serde::{Deserialize, Serialize};

use super::Int;
use crate::{Error, Result};

/// Sparse integer matrix stored by rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(u32, Int)>>,
}

/// `(row, col, value)` with zero-based indices.
pub type Triplet = (usize, usize, Int);

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            data: vec![Vec::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let data = (0..n).map(|i| vec![(i as u32, Int::ONE)]).collect();
        IntegerMatrix {
            rows: n,
            cols: n,
            data,
        }
    }

    /// Builds a matrix from triplets; repeated positions are summed.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = Triplet>,
    {
        let mut acc: Vec<BTreeMap<u32, Int>> = vec![BTreeMap::new(); rows];
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({r}, {c}) outside a {rows}x{cols} matrix"
                )));
            }
            let slot = acc[r].entry(c as u32).or_insert(Int::ZERO);
            *slot = &*slot + &v;
        }
        let data = acc
            .into_iter()
            .map(|row| row.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        Ok(IntegerMatrix { rows, cols, data })
    }

    pub fn from_dense(entries: &[Vec<i64>]) -> Result<Self> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        if entries.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged dense matrix".into()));
        }
        let triplets = entries.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(move |(j, &v)| (i, j, Int::from(v)))
        });
        Self::from_triplets(rows, cols, triplets)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn row(&self, r: usize) -> &[(u32, Int)] {
        &self.data[r]
    }

    pub fn get(&self, r: usize, c: usize) -> Int {
        match self.data[r].binary_search_by_key(&(c as u32), |e| e.0) {
            Ok(pos) => self.data[r][pos].1.clone(),
            Err(_) => Int::ZERO,
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Int)> + '_ {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c as usize, v)))
    }

    pub fn transpose(&self) -> IntegerMatrix {
        let mut data: Vec<Vec<(u32, Int)>> = vec![Vec::new(); self.cols];
        for (r, c, v) in self.triplets() {
            data[c].push((r as u32, v.clone()));
        }
        IntegerMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Product `self * rhs`.
    pub fn mul(&self, rhs: &IntegerMatrix) -> Result<IntegerMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut data = Vec::with_capacity(self.rows);
        let mut acc: BTreeMap<u32, Int> = BTreeMap::new();
        for row in &self.data {
            acc.clear();
            for (k, a) in row {
                for (c, b) in &rhs.data[*k as usize] {
                    let slot = acc.entry(*c).or_insert(Int::ZERO);
                    *slot = &*slot + &(a * b);
                }
            }
            data.push(
                acc.iter()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(c, v)| (*c, v.clone()))
                    .collect(),
            );
        }
        Ok(IntegerMatrix {
            rows: self.rows,
            cols: rhs.cols,
            data,
        })
    }

    /// Applies row permutation `row_perm` (old index -> new index) and column
    /// permutation `col_perm`.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> Result<IntegerMatrix> {
        if row_perm.len() != self.rows || col_perm.len() != self.cols {
            return Err(Error::DimensionMismatch("permutation length".into()));
        }
        let triplets = self
            .triplets()
            .map(|(r, c, v)| (row_perm[r], col_perm[c], v.clone()));
        Self::from_triplets(self.rows, self.cols, triplets)
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, Int)>,
}

impl From<&IntegerMatrix> for MatrixJson {
    fn from(m: &IntegerMatrix) -> Self {
        MatrixJson {
            rows: m.rows,
            cols: m.cols,
            entries: m.triplets().map(|(r, c, v)| (r, c, v.clone())).collect(),
        }
    }
}

/// Rank and elementary divisors of an integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmithForm {
    pub rank: usize,
    /// The elementary divisors greater than one, as a divisibility chain.
    /// The remaining `rank - invariant_factors.len()` divisors are 1.
    pub invariant_factors: Vec<Int>,
}

impl SmithForm {
    /// All `rank` elementary divisors, ones included.
    pub fn divisors(&self) -> Vec<Int> {
        let ones = self.rank - self.invariant_factors.len();
        std::iter::repeat_n(Int::ONE, ones)
            .chain(self.invariant_factors.iter().cloned())
            .collect()
    }
}

/// Smith normal form over the integers.
///
/// Sparse elimination on unit pivots runs first, choosing at each step the
/// shortest column and within it the shortest row (Markowitz-style fill
/// control). Whatever is left has no unit entries and is reduced densely
/// with a minimal-absolute-value pivot rule.
pub fn smith_normal_form(m: &IntegerMatrix) -> SmithForm {
    let mut elim = UnitEliminator::new(m);
    let unit_rank = elim.run();
    let residual = elim.residual();
    let diagonal = dense_diagonalize(residual);
    let mut factors: Vec<Int> = diagonal.into_iter().filter(|d| !d.is_zero()).collect();
    let rank = unit_rank + factors.len();
    normalize_chain(&mut factors);
    factors.retain(|d| !d.is_unit());
    SmithForm {
        rank,
        invariant_factors: factors,
    }
}

/// Turns a list of positive diagonal entries into a divisibility chain by
/// repeated `(a, b) -> (gcd, lcm)`.
pub(crate) fn normalize_chain(d: &mut [Int]) {
    for x in d.iter_mut() {
        *x = x.abs();
    }
    d.sort();
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = d[i].gcd(&d[j]);
            if g != d[i] {
                let l = d[i].lcm(&d[j]);
                d[i] = g;
                d[j] = l;
            }
        }
    }
    d.sort();
}

struct UnitEliminator {
    rows: Vec<Vec<(u32, Int)>>,
    row_alive: Vec<bool>,
    /// Candidate rows per column; a superset of the true support.
    cols: Vec<Vec<u32>>,
    col_alive: Vec<bool>,
    ncols: usize,
}

impl UnitEliminator {
    fn new(m: &IntegerMatrix) -> Self {
        let mut cols = vec![Vec::new(); m.cols];
        for (r, row) in m.data.iter().enumerate() {
            for (c, _) in row {
                cols[*c as usize].push(r as u32);
            }
        }
        UnitEliminator {
            rows: m.data.clone(),
            row_alive: vec![true; m.rows],
            cols,
            col_alive: vec![true; m.cols],
            ncols: m.cols,
        }
    }

    fn entry(&self, r: u32, c: u32) -> Option<&Int> {
        let row = &self.rows[r as usize];
        row.binary_search_by_key(&c, |e| e.0).ok().map(|p| &row[p].1)
    }

    fn clean_col(&mut self, c: u32) {
        let mut list = std::mem::take(&mut self.cols[c as usize]);
        list.sort_unstable();
        list.dedup();
        list.retain(|&r| self.row_alive[r as usize] && self.entry(r, c).is_some());
        self.cols[c as usize] = list;
    }

    fn run(&mut self) -> usize {
        let mut heap: BinaryHeap<Reverse<(usize, u32)>> = (0..self.ncols)
            .filter(|&c| !self.cols[c].is_empty())
            .map(|c| Reverse((self.cols[c].len(), c as u32)))
            .collect();
        let mut rank = 0;
        while let Some(Reverse((len, c))) = heap.pop() {
            if !self.col_alive[c as usize] {
                continue;
            }
            self.clean_col(c);
            let actual = self.cols[c as usize].len();
            if actual == 0 {
                continue;
            }
            if actual != len {
                heap.push(Reverse((actual, c)));
                continue;
            }
            let pivot = self.cols[c as usize]
                .iter()
                .copied()
                .filter(|&r| self.entry(r, c).is_some_and(Int::is_unit))
                .min_by_key(|&r| (self.rows[r as usize].len(), r));
            let Some(r) = pivot else {
                continue;
            };
            for touched in self.eliminate(r, c) {
                if self.col_alive[touched as usize] {
                    heap.push(Reverse((self.cols[touched as usize].len(), touched)));
                }
            }
            rank += 1;
        }
        rank
    }

    /// Clears column `c` with the unit pivot at `(r, c)` and removes row `r`
    /// and column `c`. Returns the columns whose support changed.
    fn eliminate(&mut self, r: u32, c: u32) -> Vec<u32> {
        let pivot_row = std::mem::take(&mut self.rows[r as usize]);
        self.row_alive[r as usize] = false;
        self.col_alive[c as usize] = false;
        let v = pivot_row
            .iter()
            .find(|e| e.0 == c)
            .map(|e| e.1.clone())
            .expect("pivot entry");
        let targets: Vec<u32> = self.cols[c as usize]
            .iter()
            .copied()
            .filter(|&i| i != r)
            .collect();
        let mut touched: Vec<u32> = pivot_row.iter().map(|e| e.0).filter(|&j| j != c).collect();
        for i in targets {
            let a = self.entry(i, c).cloned().expect("column support is clean");
            // v is a unit, so v^-1 = v
            let f = &a * &v;
            let (merged, fills) = sub_scaled(&self.rows[i as usize], &f, &pivot_row);
            self.rows[i as usize] = merged;
            for j in fills {
                self.cols[j as usize].push(i);
            }
        }
        self.cols[c as usize].clear();
        touched.sort_unstable();
        touched.dedup();
        touched
    }

    fn residual(&self) -> Vec<Vec<Int>> {
        let live_rows: Vec<usize> = (0..self.rows.len())
            .filter(|&r| self.row_alive[r] && !self.rows[r].is_empty())
            .collect();
        let mut col_index: BTreeMap<u32, usize> = BTreeMap::new();
        for &r in &live_rows {
            for (c, _) in &self.rows[r] {
                col_index.insert(*c, 0);
            }
        }
        for (k, slot) in col_index.values_mut().enumerate() {
            *slot = k;
        }
        let width = col_index.len();
        live_rows
            .iter()
            .map(|&r| {
                let mut dense = vec![Int::ZERO; width];
                for (c, v) in &self.rows[r] {
                    dense[col_index[c]] = v.clone();
                }
                dense
            })
            .collect()
    }
}

/// `row - f * pivot` on sorted sparse rows. Also returns the columns that
/// were zero in `row` and are nonzero in the result.
fn sub_scaled(row: &[(u32, Int)], f: &Int, pivot: &[(u32, Int)]) -> (Vec<(u32, Int)>, Vec<u32>) {
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let mut fills = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < pivot.len() {
        let take_row = j == pivot.len() || (i < row.len() && row[i].0 < pivot[j].0);
        let take_pivot = i == row.len() || (j < pivot.len() && pivot[j].0 < row[i].0);
        if take_row {
            out.push(row[i].clone());
            i += 1;
        } else if take_pivot {
            let v = Int::ZERO.sub_mul(f, &pivot[j].1);
            if !v.is_zero() {
                fills.push(pivot[j].0);
                out.push((pivot[j].0, v));
            }
            j += 1;
        } else {
            let v = row[i].1.sub_mul(f, &pivot[j].1);
            if !v.is_zero() {
                out.push((row[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    (out, fills)
}

/// Diagonalizes a dense matrix by unimodular row and column operations and
/// returns the diagonal.
fn dense_diagonalize(mut a: Vec<Vec<Int>>) -> Vec<Int> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    for t in 0..m.min(n) {
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, x) in row.iter().enumerate().skip(t) {
                if !x.is_zero()
                    && best.is_none_or(|(bi, bj)| x.cmp_abs(&a[bi][bj]).is_lt())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else {
            break;
        };
        a.swap(t, bi);
        for row in a.iter_mut() {
            row.swap(t, bj);
        }
        'reduce: loop {
            let p = a[t][t].clone();
            for i in t + 1..m {
                if a[i][t].is_zero() {
                    continue;
                }
                let (q, _) = a[i][t].div_mod_floor(&p);
                let (pivot_rows, rest) = a.split_at_mut(i);
                let src = &pivot_rows[t];
                for (dst, s) in rest[0].iter_mut().zip(src).skip(t) {
                    *dst = dst.sub_mul(&q, s);
                }
                if !a[i][t].is_zero() {
                    a.swap(t, i);
                    continue 'reduce;
                }
            }
            for j in t + 1..n {
                if a[t][j].is_zero() {
                    continue;
                }
                let (q, _) = a[t][j].div_mod_floor(&p);
                for row in a.iter_mut().skip(t) {
                    let s = row[t].clone();
                    row[j] = row[j].sub_mul(&q, &s);
                }
                if !a[t][j].is_zero() {
                    for row in a.iter_mut() {
                        row.swap(t, j);
                    }
                    continue 'reduce;
                }
            }
            break;
        }
        diag.push(a[t][t].abs());
    }
    diag
}
