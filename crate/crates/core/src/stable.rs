//! Stable homology of vertical configuration spaces of `k`-clusters,
//! assembled from twisted homology of coloured configuration spaces.
//!
//! Colours are entanglement types in `E[k]`. The distinguished colour `e0`
//! is the single-block type; every other type `e` has parity
//! `p(#e - 1) mod 2`. A tuple `λ` counts non-trivial types, and `λ[n]` pads
//! it with `e0` up to `n` points. The stable answer in degree `g` is
//! `⊕_λ M_{g - p s(λ)}(R^{p+1}; λ[∞])` with `s(λ) = Σ λ_e (#e - 1)`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::fox_neuwirth::{twisted_homology, ColourMultiset, ParityMap};
use crate::homology::{GradedAbelianGroup, Int};
use crate::partitions::{enumerate_types_uniform, EntanglementType};
use crate::{Error, Limits, Result};

/// Name of the stabilizing colour.
pub const E0: &str = "e0";

/// `p(#e - 1) mod 2`.
pub fn parity_of_type(e: &EntanglementType, p: usize) -> u8 {
    (p * (e.weight() - 1) % 2) as u8
}

/// `(r, s)` with `r = Σ α_e #e` and `s = r - |α|`.
pub fn r_and_s(alpha: &[(EntanglementType, usize)]) -> (usize, usize) {
    let r: usize = alpha.iter().map(|(e, c)| c * e.weight()).sum();
    let size: usize = alpha.iter().map(|(_, c)| c).sum();
    (r, r - size)
}

/// A finitely supported count of non-trivial types in `E[k]`, kept in
/// canonical order (by weight, then type, then count).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LambdaTuple {
    k: usize,
    entries: Vec<(EntanglementType, usize)>,
}

impl LambdaTuple {
    pub fn empty(k: usize) -> Self {
        LambdaTuple {
            k,
            entries: Vec::new(),
        }
    }

    pub fn new(k: usize, entries: Vec<(EntanglementType, usize)>) -> Result<Self> {
        let mut merged: BTreeMap<(usize, EntanglementType), usize> = BTreeMap::new();
        for (e, c) in entries {
            if e.profile().iter().any(|&b| b != k) {
                return Err(Error::InvalidColours(format!("{e} is not in E[{k}]")));
            }
            if e.weight() == 1 {
                return Err(Error::InvalidColours("e0 is not part of a lambda tuple".into()));
            }
            if c > 0 {
                *merged.entry((e.weight(), e)).or_insert(0) += c;
            }
        }
        Ok(LambdaTuple {
            k,
            entries: merged.into_iter().map(|((_, e), c)| (e, c)).collect(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn entries(&self) -> &[(EntanglementType, usize)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `|λ|`.
    pub fn size(&self) -> usize {
        self.entries.iter().map(|(_, c)| c).sum()
    }

    /// `s(λ) = Σ λ_e (#e - 1)`.
    pub fn s(&self) -> usize {
        self.entries.iter().map(|(e, c)| c * (e.weight() - 1)).sum()
    }

    fn sort_key(&self) -> Vec<(usize, &EntanglementType, usize)> {
        self.entries.iter().map(|(e, c)| (e.weight(), e, *c)).collect()
    }
}

impl PartialOrd for LambdaTuple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LambdaTuple {
    fn cmp(&self, other: &Self) -> Ordering {
        self.k
            .cmp(&other.k)
            .then_with(|| self.sort_key().cmp(&other.sort_key()))
    }
}

impl fmt::Display for LambdaTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return f.write_str("()");
        }
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|(e, c)| if *c == 1 { format!("[{e}]") } else { format!("{c}*[{e}]") })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl Serialize for LambdaTuple {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// `λ[n]`: `λ` plus `n - |λ|` copies of `e0` (absent when zero).
pub fn lambda_bracket(lambda: &LambdaTuple, n: usize) -> Result<Vec<(EntanglementType, usize)>> {
    let size = lambda.size();
    if n < size {
        return Err(Error::InvalidColours(format!("n = {n} is below |lambda| = {size}")));
    }
    let mut out = Vec::with_capacity(lambda.entries.len() + 1);
    if n > size {
        out.push((EntanglementType::trivial(lambda.k), n - size));
    }
    out.extend(lambda.entries.iter().cloned());
    Ok(out)
}

/// Colour names and parities of a type multiset for the Fox-Neuwirth engine.
pub fn colour_data(alpha: &[(EntanglementType, usize)], p: usize) -> Result<(ColourMultiset, ParityMap)> {
    let name = |e: &EntanglementType| {
        if e.weight() == 1 {
            E0.to_string()
        } else {
            e.to_string()
        }
    };
    let colours = ColourMultiset::new(alpha.iter().map(|(e, c)| (name(e), *c)))?;
    let mut parity = ParityMap::trivial(&colours);
    for (e, _) in alpha {
        parity.set(name(e), parity_of_type(e, p));
    }
    Ok((colours, parity))
}

/// All `λ` over `E[k]` with `p s(λ) <= max_degree`, in canonical order.
pub fn enumerate_lambda(k: usize, p: usize, max_degree: usize, limits: &Limits) -> Result<Vec<LambdaTuple>> {
    if k == 0 || p == 0 {
        return Err(Error::InvalidColours("need k >= 1 and p >= 1".into()));
    }
    let s_max = max_degree / p;
    let mut types: Vec<EntanglementType> = Vec::new();
    if k >= 2 {
        for w in 2..=s_max + 1 {
            types.extend(enumerate_types_uniform(k, w, limits)?);
        }
    }
    let mut out = Vec::new();
    let mut counts = vec![0usize; types.len()];
    fn go(i: usize, budget: usize, types: &[EntanglementType], counts: &mut [usize], out: &mut Vec<Vec<(EntanglementType, usize)>>) {
        if i == types.len() {
            out.push(
                types
                    .iter()
                    .zip(counts.iter())
                    .filter(|(_, &c)| c > 0)
                    .map(|(e, &c)| (e.clone(), c))
                    .collect(),
            );
            return;
        }
        let cost = types[i].weight() - 1;
        let mut c = 0;
        while c * cost <= budget {
            counts[i] = c;
            go(i + 1, budget - c * cost, types, counts, out);
            c += 1;
        }
        counts[i] = 0;
    }
    let mut raw = Vec::new();
    go(0, s_max, &types, &mut counts, &mut raw);
    for entries in raw {
        out.push(LambdaTuple::new(k, entries)?);
    }
    out.sort();
    Ok(out)
}

/// `M_•(R^{p+1}; λ[∞])` through the certified degrees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StableModule {
    pub lambda: LambdaTuple,
    pub p: usize,
    pub requested_max_degree: usize,
    /// Highest degree `g` whose value was seen at two consecutive `n` with
    /// `n - |λ| >= 2g`; `None` if not even degree 0 could be certified.
    pub certified_max_degree: Option<usize>,
    pub group: GradedAbelianGroup,
    /// Entry `g` is the `n` at which degree `g` was read off.
    pub stable_at_n: Vec<usize>,
}

impl StableModule {
    pub fn is_complete(&self) -> bool {
        self.certified_max_degree == Some(self.requested_max_degree)
    }
}

/// Stabilizes `M_•(R^{p+1}; λ[n])` in degrees `<= max_degree`.
///
/// Degree `g` is read off at `n = |λ| + 2g` and confirmed at `n + 1`. Every
/// computed pair of consecutive `n` must agree in all degrees
/// `<= (n - |λ|)/2`; a disagreement is reported as
/// [`Error::StabilityViolation`]. Degrees needing more points than
/// `limits.max_points` are left uncertified.
pub fn stabilize_m(lambda: &LambdaTuple, p: usize, max_degree: usize, limits: &Limits) -> Result<StableModule> {
    let base = lambda.size();
    let d = p + 1;
    // the largest n that still has a successor within bounds
    let feasible_top = limits.max_points.checked_sub(1).filter(|&t| t >= base);
    let wanted_top = base + 2 * max_degree;
    let top = feasible_top.map(|t| t.min(wanted_top));
    let Some(top) = top else {
        return Ok(StableModule {
            lambda: lambda.clone(),
            p,
            requested_max_degree: max_degree,
            certified_max_degree: None,
            group: GradedAbelianGroup::zero(),
            stable_at_n: Vec::new(),
        });
    };
    let ns: Vec<usize> = (base..=top + 1).collect();
    let groups: Vec<GradedAbelianGroup> = ns
        .par_iter()
        .map(|&n| {
            let alpha = lambda_bracket(lambda, n)?;
            let (colours, parity) = colour_data(&alpha, p)?;
            twisted_homology(&colours, d, &parity, 0..=max_degree, limits)
        })
        .collect::<Result<_>>()?;
    for (i, pair) in groups.windows(2).enumerate() {
        let n = ns[i];
        let range = ((n - base) / 2).min(max_degree);
        for g in 0..=range {
            if pair[0].degree(g) != pair[1].degree(g) {
                return Err(Error::StabilityViolation {
                    context: format!("lambda {lambda}, p = {p}"),
                    degree: g,
                    n,
                });
            }
        }
    }
    let certified = ((top - base) / 2).min(max_degree);
    let stable_at_n: Vec<usize> = (0..=certified).map(|g| base + 2 * g).collect();
    let group = GradedAbelianGroup::new(
        (0..=certified)
            .map(|g| groups[2 * g].degree(g))
            .collect(),
    );
    Ok(StableModule {
        lambda: lambda.clone(),
        p,
        requested_max_degree: max_degree,
        certified_max_degree: Some(certified),
        group,
        stable_at_n,
    })
}

/// One summand of an assembled degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContributionReport {
    pub lambda: LambdaTuple,
    pub shift: usize,
    pub stable_at_n: usize,
    pub betti: usize,
    pub torsion: Vec<Int>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeReport {
    pub degree: usize,
    pub betti: usize,
    pub torsion: Vec<Int>,
    pub contributions: Vec<ContributionReport>,
    pub certified_max_degree: Option<usize>,
}

/// Stable homology with per-`λ` provenance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableHomology {
    pub k: usize,
    pub p: usize,
    pub requested_max_degree: usize,
    pub certified_max_degree: Option<usize>,
    pub modules: Vec<StableModule>,
    pub group: GradedAbelianGroup,
}

impl StableHomology {
    pub fn is_complete(&self) -> bool {
        self.certified_max_degree == Some(self.requested_max_degree)
    }

    /// One report per certified degree.
    pub fn degree_reports(&self) -> Vec<DegreeReport> {
        let Some(top) = self.certified_max_degree else {
            return Vec::new();
        };
        (0..=top)
            .map(|g| {
                let contributions = self
                    .modules
                    .iter()
                    .filter_map(|m| {
                        let shift = self.p * m.lambda.s();
                        let local = g.checked_sub(shift)?;
                        let part = m.group.degree(local);
                        if part.is_zero() {
                            return None;
                        }
                        Some(ContributionReport {
                            lambda: m.lambda.clone(),
                            shift,
                            stable_at_n: m.stable_at_n[local],
                            betti: part.betti,
                            torsion: part.torsion,
                        })
                    })
                    .collect();
                let total = self.group.degree(g);
                DegreeReport {
                    degree: g,
                    betti: total.betti,
                    torsion: total.torsion,
                    contributions,
                    certified_max_degree: self.certified_max_degree,
                }
            })
            .collect()
    }
}

/// `⊕_λ M_{• - p s(λ)}(R^{p+1}; λ[∞])` in degrees `<= max_degree`.
///
/// When some summand cannot be certified far enough, the result covers
/// only the degrees where every summand is certified; check
/// [`StableHomology::is_complete`].
pub fn stable_homology(k: usize, p: usize, max_degree: usize, limits: &Limits) -> Result<StableHomology> {
    let lambdas = enumerate_lambda(k, p, max_degree, limits)?;
    let modules: Vec<StableModule> = lambdas
        .par_iter()
        .map(|l| stabilize_m(l, p, max_degree - p * l.s(), limits))
        .collect::<Result<_>>()?;
    // degree g needs every summand with shift <= g certified through g - shift
    let mut certified: Option<usize> = Some(max_degree);
    for m in &modules {
        let shift = p * m.lambda.s();
        let reach = match m.certified_max_degree {
            Some(c) => Some(shift + c),
            None => shift.checked_sub(1),
        };
        certified = match (certified, reach) {
            (Some(a), Some(b)) => Some(a.min(b)),
            _ => None,
        };
    }
    let mut group = GradedAbelianGroup::zero();
    if let Some(top) = certified {
        for m in &modules {
            let shift = p * m.lambda.s();
            group = group.direct_sum(&m.group.shift(shift).truncate(top));
        }
    }
    Ok(StableHomology {
        k,
        p,
        requested_max_degree: max_degree,
        certified_max_degree: certified,
        modules,
        group,
    })
}

/// One `α` of an associated-graded or predicted sum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlphaTerm {
    pub lambda: LambdaTuple,
    pub n: usize,
    pub shift: usize,
    pub group: GradedAbelianGroup,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssembledSum {
    pub r: usize,
    pub max_degree: usize,
    pub terms: Vec<AlphaTerm>,
    pub group: GradedAbelianGroup,
    pub conjectural: bool,
}

/// `⊕_{r(α)=r, s(α)=s} M_{• - p s}(R^{p+1}; α)` in degrees `<= max_degree`.
///
/// The `α` are `λ[r - s]` for the `λ` with `s(λ) = s` and `|λ| <= r - s`.
pub fn associated_graded(
    r: usize,
    s: usize,
    k: usize,
    p: usize,
    max_degree: usize,
    limits: &Limits,
) -> Result<AssembledSum> {
    let terms = graded_terms(r, s, k, p, max_degree, limits)?;
    let group = terms
        .iter()
        .fold(GradedAbelianGroup::zero(), |acc, t| acc.direct_sum(&t.group));
    Ok(AssembledSum {
        r,
        max_degree,
        terms,
        group,
        conjectural: false,
    })
}

fn graded_terms(
    r: usize,
    s: usize,
    k: usize,
    p: usize,
    max_degree: usize,
    limits: &Limits,
) -> Result<Vec<AlphaTerm>> {
    let shift = p * s;
    if shift > max_degree || s >= r.max(1) {
        return Ok(Vec::new());
    }
    let n = r - s;
    let lambdas: Vec<LambdaTuple> = enumerate_lambda(k, p, shift, limits)?
        .into_iter()
        .filter(|l| l.s() == s && l.size() <= n)
        .collect();
    lambdas
        .par_iter()
        .map(|l| {
            let alpha = lambda_bracket(l, n)?;
            let (colours, parity) = colour_data(&alpha, p)?;
            let m = twisted_homology(&colours, p + 1, &parity, 0..=max_degree - shift, limits)?;
            Ok(AlphaTerm {
                lambda: l.clone(),
                n,
                shift,
                group: m.shift(shift).truncate(max_degree),
            })
        })
        .collect()
}

/// `⊕_{r(α)=r} M_{• - p s(α)}(R^{p+1}; α)`, the conjectural homology of the
/// unstable space with `r` clusters. Always flagged conjectural.
pub fn predicted_unstable(r: usize, k: usize, p: usize, max_degree: usize, limits: &Limits) -> Result<AssembledSum> {
    let mut terms = Vec::new();
    for s in 0..r.max(1) {
        if p * s > max_degree {
            break;
        }
        terms.extend(graded_terms(r, s, k, p, max_degree, limits)?);
    }
    let group = terms
        .iter()
        .fold(GradedAbelianGroup::zero(), |acc, t| acc.direct_sum(&t.group));
    Ok(AssembledSum {
        r,
        max_degree,
        terms,
        group,
        conjectural: true,
    })
}
