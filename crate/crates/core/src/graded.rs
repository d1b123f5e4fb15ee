//! Graded vector spaces over a field and the wedge-sum formulas that express
//! the homology of cluster bar constructions through label homology.
//!
//! Label spaces enter only through their reduced homology ranks. A label
//! module is taken as complete data: nothing is assumed above its highest
//! listed degree.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::partitions::{enumerate_types_with_blocks, EntanglementType};
use crate::{Error, Limits, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    Rational,
    /// `F_p` for a prime `p`.
    Prime(u64),
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => f.write_str("Q"),
            Field::Prime(p) => write!(f, "F{p}"),
        }
    }
}

/// Ranks of a graded vector space in degrees `0..=max_degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedModule {
    field: Field,
    ranks: BTreeMap<usize, usize>,
    max_degree: usize,
}

impl GradedModule {
    pub fn zero(field: Field, max_degree: usize) -> Self {
        GradedModule {
            field,
            ranks: BTreeMap::new(),
            max_degree,
        }
    }

    /// Builds a module from `(degree, rank)` pairs, summing repeats and
    /// dropping everything above `max_degree`.
    pub fn from_ranks<I>(field: Field, ranks: I, max_degree: usize) -> Self
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut m = GradedModule::zero(field, max_degree);
        for (d, r) in ranks {
            m.add_rank(d, r);
        }
        m
    }

    /// Rank one in degree `dim`: the reduced homology of a sphere.
    pub fn sphere(field: Field, dim: usize) -> Self {
        GradedModule::from_ranks(field, [(dim, 1)], dim)
    }

    fn add_rank(&mut self, degree: usize, rank: usize) {
        if rank > 0 && degree <= self.max_degree {
            *self.ranks.entry(degree).or_insert(0) += rank;
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn rank(&self, degree: usize) -> usize {
        self.ranks.get(&degree).copied().unwrap_or(0)
    }

    pub fn ranks(&self) -> &BTreeMap<usize, usize> {
        &self.ranks
    }

    /// Ranks in degrees `0..=max_degree` as a dense list.
    pub fn rank_vector(&self) -> Vec<usize> {
        (0..=self.max_degree).map(|d| self.rank(d)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.ranks.is_empty()
    }

    /// Lowest degree with nonzero rank.
    pub fn connectivity(&self) -> Option<usize> {
        self.ranks.keys().next().copied()
    }

    pub fn shift(&self, by: usize, max_degree: usize) -> Self {
        GradedModule::from_ranks(
            self.field,
            self.ranks.iter().map(|(&d, &r)| (d + by, r)),
            max_degree,
        )
    }

    pub fn truncate(&self, max_degree: usize) -> Self {
        GradedModule::from_ranks(self.field, self.ranks.iter().map(|(&d, &r)| (d, r)), max_degree)
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let mut out = self.truncate(self.max_degree.min(other.max_degree));
        for (&d, &r) in &other.ranks {
            out.add_rank(d, r);
        }
        Ok(out)
    }

    /// Künneth over a field: ranks convolve.
    pub fn tensor(&self, other: &Self, max_degree: usize) -> Result<Self> {
        self.same_field(other)?;
        let mut out = GradedModule::zero(self.field, max_degree);
        for (&a, &r) in &self.ranks {
            for (&b, &s) in &other.ranks {
                out.add_rank(a + b, r * s);
            }
        }
        Ok(out)
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::InvalidLabels(format!(
                "cannot combine modules over {} and {}",
                self.field, other.field
            )))
        }
    }
}

impl fmt::Display for GradedModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ranks.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .ranks
            .iter()
            .map(|(d, r)| format!("{}^{r}[{d}]", self.field))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

#[derive(Serialize, Deserialize)]
struct GradedModuleJson {
    field: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<u64>,
    ranks: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_degree: Option<usize>,
}

impl Serialize for GradedModule {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let (field, p) = match self.field {
            Field::Rational => ("Q".to_string(), None),
            Field::Prime(p) => ("Fp".to_string(), Some(p)),
        };
        GradedModuleJson {
            field,
            p,
            ranks: self.ranks.iter().map(|(d, r)| (d.to_string(), *r)).collect(),
            max_degree: Some(self.max_degree),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GradedModule {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = GradedModuleJson::deserialize(deserializer)?;
        let field = match (raw.field.as_str(), raw.p) {
            ("Q", _) => Field::Rational,
            ("Fp", Some(p)) if p >= 2 => Field::Prime(p),
            _ => return Err(D::Error::custom("field must be \"Q\" or \"Fp\" with a prime p")),
        };
        let mut ranks = Vec::new();
        for (k, r) in raw.ranks {
            let d = k
                .parse::<usize>()
                .map_err(|_| D::Error::custom(format!("bad degree {k:?}")))?;
            ranks.push((d, r));
        }
        let top = ranks.iter().map(|&(d, _)| d).max().unwrap_or(0);
        Ok(GradedModule::from_ranks(field, ranks, raw.max_degree.unwrap_or(top)))
    }
}

/// The label space attached to clusters of one size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelData {
    /// A finite pointed set with this many non-basepoint elements.
    Discrete(usize),
    /// Reduced homology of the label space.
    Module(GradedModule),
}

/// Label spaces indexed by cluster size; absent sizes carry only the
/// basepoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelSystem {
    field: Field,
    labels: BTreeMap<usize, LabelData>,
}

impl LabelSystem {
    pub fn new(field: Field, labels: BTreeMap<usize, LabelData>) -> Result<Self> {
        if labels.contains_key(&0) {
            return Err(Error::InvalidLabels("cluster sizes start at 1".into()));
        }
        for data in labels.values() {
            if let LabelData::Module(m) = data {
                if m.field() != field {
                    return Err(Error::InvalidLabels(format!(
                        "label module over {} in a system over {field}",
                        m.field()
                    )));
                }
            }
        }
        Ok(LabelSystem { field, labels })
    }

    /// Finite pointed sets: `counts[k]` non-basepoint labels for size `k`.
    pub fn discrete(field: Field, counts: &BTreeMap<usize, usize>) -> Self {
        let labels = counts
            .iter()
            .filter(|(&k, _)| k > 0)
            .map(|(&k, &m)| (k, LabelData::Discrete(m)))
            .collect();
        LabelSystem { field, labels }
    }

    /// `S^dim` at size `k` only.
    pub fn sphere_at(field: Field, k: usize, dim: usize) -> Self {
        let data = if dim == 0 {
            LabelData::Discrete(1)
        } else {
            LabelData::Module(GradedModule::sphere(field, dim))
        };
        LabelSystem {
            field,
            labels: [(k, data)].into_iter().collect(),
        }
    }

    /// `S^0` at every size `1..=max_size`.
    pub fn zero_spheres(field: Field, max_size: usize) -> Self {
        LabelSystem::discrete(field, &(1..=max_size).map(|k| (k, 1)).collect())
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.labels.keys().copied()
    }

    pub fn get(&self, k: usize) -> Option<&LabelData> {
        self.labels.get(&k)
    }

    /// Reduced homology of `X_k`.
    pub fn reduced_homology(&self, k: usize) -> Result<GradedModule> {
        match self.labels.get(&k) {
            None => Err(Error::MissingLabel(k)),
            Some(LabelData::Discrete(m)) => Ok(GradedModule::from_ranks(self.field, [(0, *m)], 0)),
            Some(LabelData::Module(m)) => Ok(m.clone()),
        }
    }

    /// Non-basepoint counts when every label is a finite pointed set.
    pub fn discrete_counts(&self) -> Option<BTreeMap<usize, usize>> {
        self.labels
            .iter()
            .map(|(&k, d)| match d {
                LabelData::Discrete(m) => Some((k, *m)),
                LabelData::Module(_) => None,
            })
            .collect()
    }

    /// Keeps only size `k`.
    pub fn restrict_to(&self, k: usize) -> Self {
        LabelSystem {
            field: self.field,
            labels: self
                .labels
                .iter()
                .filter(|(&j, _)| j == k)
                .map(|(&j, d)| (j, d.clone()))
                .collect(),
        }
    }

    /// Sizes whose label space has nonzero reduced homology, with the
    /// lowest such degree.
    fn active_sizes(&self) -> Result<BTreeMap<usize, usize>> {
        let mut out = BTreeMap::new();
        for k in self.sizes() {
            if let Some(c) = self.reduced_homology(k)?.connectivity() {
                out.insert(k, c);
            }
        }
        Ok(out)
    }
}

/// Reduced homology of `X_{k_1} ∧ ... ∧ X_{k_r}` up to `max_degree`.
pub fn smash_homology(labels: &LabelSystem, profile: &[usize], max_degree: usize) -> Result<GradedModule> {
    let mut acc = GradedModule::from_ranks(labels.field(), [(0, 1)], max_degree);
    for &k in profile {
        acc = acc.tensor(&labels.reduced_homology(k)?, max_degree)?;
    }
    Ok(acc)
}

/// The suspension of every label by `p`.
pub fn segal_formula(labels: &LabelSystem, p: usize) -> Result<LabelSystem> {
    if p == 0 {
        return Ok(labels.clone());
    }
    let mut out = BTreeMap::new();
    for k in labels.sizes() {
        let h = labels.reduced_homology(k)?;
        out.insert(k, LabelData::Module(h.shift(p, h.max_degree() + p)));
    }
    LabelSystem::new(labels.field(), out)
}

/// How far the sum over entanglement types was carried out.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    /// Every type contributing in degrees `<= complete_through` was summed.
    pub complete_through: usize,
    /// Types with more blocks than this contribute only above the bound.
    pub max_weight: usize,
    pub max_size: usize,
    pub types_summed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormulaResult {
    pub module: GradedModule,
    pub certificate: Certificate,
}

/// Grading of the summands of a formula by the entanglement type.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grading {
    /// By `#e`, the number of blocks.
    Weight,
    /// By `|e|`, the number of particles.
    Size,
}

/// Shape of a wedge formula: type `e` contributes the smash homology of its
/// labels shifted up by `base + step * (#e - 1)`.
#[derive(Clone, Copy)]
struct Shift {
    base: usize,
    step: usize,
}

impl Shift {
    fn of(&self, e: &EntanglementType) -> usize {
        self.base + self.step * (e.weight() - 1)
    }
}

fn wedge_formula(
    labels: &LabelSystem,
    shift: Shift,
    max_degree: usize,
    limits: &Limits,
) -> Result<FormulaResult> {
    let active = labels.active_sizes()?;
    let field = labels.field();
    let Some(&c_min) = active.values().min() else {
        // every label is contractible: the wedge is empty
        return Ok(FormulaResult {
            module: GradedModule::zero(field, max_degree),
            certificate: Certificate {
                complete_through: max_degree,
                max_weight: 0,
                max_size: 0,
                types_summed: 0,
            },
        });
    };
    let k_max = *active.keys().next_back().expect("non-empty");
    // a type of weight w contributes no lower than base + w*c_min + (w-1)*step
    let per_block = c_min + shift.step;
    let max_weight = if per_block >= 1 {
        if shift.base + c_min > max_degree {
            0
        } else {
            1 + (max_degree - shift.base - c_min) / per_block
        }
    } else if active.keys().all(|&k| k == 1) {
        1
    } else {
        return Err(Error::NonCertifiable(format!(
            "labels of sizes {:?} have degree-0 homology, so infinitely many types contribute \
             in degree {}; use a grading by weight or size",
            active.keys().filter(|k| active[*k] == 0).collect::<Vec<_>>(),
            shift.base
        )));
    };
    let allowed: Vec<usize> = active.keys().copied().collect();
    let max_size = max_weight * k_max;
    let mut module = GradedModule::zero(field, max_degree);
    let mut types_summed = 0;
    for n in 1..=max_size {
        for e in enumerate_types_with_blocks(n, &allowed, max_weight, limits)? {
            let s = shift.of(&e);
            if s > max_degree {
                continue;
            }
            let part = smash_homology(labels, e.profile(), max_degree - s)?;
            module = module.direct_sum(&part.shift(s, max_degree))?;
            types_summed += 1;
        }
    }
    Ok(FormulaResult {
        module,
        certificate: Certificate {
            complete_through: max_degree,
            max_weight,
            max_size,
            types_summed,
        },
    })
}

fn graded_wedge_formula(
    labels: &LabelSystem,
    shift: Shift,
    grading: Grading,
    max_grade: usize,
    max_degree: usize,
    limits: &Limits,
) -> Result<BTreeMap<usize, GradedModule>> {
    let active = labels.active_sizes()?;
    let allowed: Vec<usize> = active.keys().copied().collect();
    let field = labels.field();
    let mut out: BTreeMap<usize, GradedModule> = (1..=max_grade)
        .map(|g| (g, GradedModule::zero(field, max_degree)))
        .collect();
    let Some(&k_max) = allowed.last() else {
        return Ok(out);
    };
    let max_size = match grading {
        Grading::Weight => max_grade * k_max,
        Grading::Size => max_grade,
    };
    for n in 1..=max_size {
        for e in enumerate_types_with_blocks(n, &allowed, max_grade, limits)? {
            let g = match grading {
                Grading::Weight => e.weight(),
                Grading::Size => e.size(),
            };
            let s = shift.of(&e);
            if g > max_grade || s > max_degree {
                continue;
            }
            let part = smash_homology(labels, e.profile(), max_degree - s)?.shift(s, max_degree);
            let slot = out.get_mut(&g).expect("grade in range");
            *slot = slot.direct_sum(&part)?;
        }
    }
    Ok(out)
}

fn filtered(labels: &LabelSystem, k_filter: Option<usize>) -> LabelSystem {
    match k_filter {
        Some(k) => labels.restrict_to(k),
        None => labels.clone(),
    }
}

/// Reduced homology of the bar construction of the cluster algebra on the
/// line: `⊕_e H̃_{•-1}(X^{∧K(e)})`.
///
/// Fails with [`Error::NonCertifiable`] when infinitely many types would
/// contribute below `max_degree`; [`bar_formula_graded`] handles those
/// cases grade by grade.
pub fn bar_formula(
    labels: &LabelSystem,
    k_filter: Option<usize>,
    max_degree: usize,
    limits: &Limits,
) -> Result<FormulaResult> {
    wedge_formula(&filtered(labels, k_filter), Shift { base: 1, step: 0 }, max_degree, limits)
}

/// [`bar_formula`] split by the weight or size of the contributing types,
/// for grades `1..=max_grade`. Each grade is a finite sum.
pub fn bar_formula_graded(
    labels: &LabelSystem,
    k_filter: Option<usize>,
    grading: Grading,
    max_grade: usize,
    max_degree: usize,
    limits: &Limits,
) -> Result<BTreeMap<usize, GradedModule>> {
    graded_wedge_formula(
        &filtered(labels, k_filter),
        Shift { base: 1, step: 0 },
        grading,
        max_grade,
        max_degree,
        limits,
    )
}

/// Reduced homology of the `(p+1)`-fold delooping of vertical cluster
/// configurations: `⊕_e H̃_{• - (p+1) - p(#e-1)}(X^{∧K(e)})`.
pub fn iterated_formula(
    labels: &LabelSystem,
    p: usize,
    max_degree: usize,
    limits: &Limits,
) -> Result<FormulaResult> {
    if p == 0 {
        return Err(Error::InvalidLabels("iterated formula needs p >= 1".into()));
    }
    wedge_formula(labels, Shift { base: p + 1, step: p }, max_degree, limits)
}

/// [`iterated_formula`] split by the weight or size of the contributing
/// types.
pub fn iterated_formula_graded(
    labels: &LabelSystem,
    p: usize,
    grading: Grading,
    max_grade: usize,
    max_degree: usize,
    limits: &Limits,
) -> Result<BTreeMap<usize, GradedModule>> {
    graded_wedge_formula(
        labels,
        Shift { base: p + 1, step: p },
        grading,
        max_grade,
        max_degree,
        limits,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::{enumerate_types, enumerate_types_uniform};

    const Q: Field = Field::Rational;

    fn limits() -> Limits {
        Limits::default()
    }

    #[test]
    fn smash_examples() {
        let s0 = LabelSystem::sphere_at(Q, 1, 0);
        assert_eq!(smash_homology(&s0, &[1], 3).unwrap().rank_vector(), vec![1, 0, 0, 0]);
        let two = LabelSystem::discrete(Q, &[(2, 2)].into_iter().collect());
        assert_eq!(smash_homology(&two, &[2, 2], 0).unwrap().rank(0), 4);
        let s1 = LabelSystem::sphere_at(Q, 1, 1);
        assert_eq!(smash_homology(&s1, &[1, 1], 3).unwrap().rank_vector(), vec![0, 0, 1, 0]);
        assert_eq!(smash_homology(&s1, &[2], 3), Err(Error::MissingLabel(2)));
    }

    #[test]
    fn bar_of_zero_sphere_at_one() {
        let r = bar_formula(&LabelSystem::sphere_at(Q, 1, 0), None, 4, &limits()).unwrap();
        assert_eq!(r.module.rank_vector(), vec![0, 1, 0, 0, 0]);
        assert_eq!(r.certificate.types_summed, 1);
    }

    #[test]
    fn contractible_labels_give_zero() {
        let points = LabelSystem::discrete(Q, &[(1, 0), (2, 0)].into_iter().collect());
        assert!(bar_formula(&points, None, 5, &limits()).unwrap().module.is_zero());
    }

    #[test]
    fn zero_spheres_need_a_grading() {
        let s = LabelSystem::zero_spheres(Q, 6);
        assert!(matches!(bar_formula(&s, None, 2, &limits()), Err(Error::NonCertifiable(_))));
        let by_size = bar_formula_graded(&s, None, Grading::Size, 6, 2, &limits()).unwrap();
        for n in 1..=6 {
            let expected = enumerate_types(n, &limits()).unwrap().len();
            assert_eq!(by_size[&n].rank_vector(), vec![0, expected, 0]);
        }
    }

    #[test]
    fn weight_graded_pairs() {
        let s = LabelSystem::sphere_at(Q, 2, 0);
        let by_weight = bar_formula_graded(&s, None, Grading::Weight, 4, 1, &limits()).unwrap();
        let ranks: Vec<usize> = (1..=4).map(|w| by_weight[&w].rank(1)).collect();
        let oracle: Vec<usize> = (1..=4)
            .map(|w| enumerate_types_uniform(2, w, &limits()).unwrap().len())
            .collect();
        assert_eq!(ranks, oracle);
        assert_eq!(ranks, vec![1, 2, 10, 74]);
    }

    #[test]
    fn iterated_examples() {
        let s = LabelSystem::sphere_at(Q, 2, 0);
        let r = iterated_formula(&s, 1, 4, &limits()).unwrap();
        assert_eq!(r.module.rank(2), 1);
        assert_eq!(r.module.rank(3), 2);
        assert_eq!(r.module.rank(4), 10);
        assert_eq!(r.certificate.max_weight, 3);
        let r = iterated_formula(&LabelSystem::sphere_at(Q, 1, 0), 2, 6, &limits()).unwrap();
        assert_eq!(r.module.ranks().iter().collect::<Vec<_>>(), vec![(&3, &1)]);
    }

    #[test]
    fn segal_shift() {
        let s = LabelSystem::sphere_at(Q, 3, 0);
        assert_eq!(segal_formula(&s, 0).unwrap(), s);
        let s2 = segal_formula(&s, 2).unwrap();
        assert_eq!(s2.reduced_homology(3).unwrap().ranks().iter().collect::<Vec<_>>(), vec![(&2, &1)]);
    }

    #[test]
    fn segal_then_bar_matches_iterated() {
        for p in 1..=3 {
            let s = LabelSystem::sphere_at(Q, 2, 0);
            let shifted = segal_formula(&s, p).unwrap();
            let via_bar = bar_formula(&shifted, None, 6 + p, &limits()).unwrap().module;
            let direct = iterated_formula(&s, p, 6 + p, &limits()).unwrap().module;
            assert!(!direct.is_zero());
            assert_eq!(via_bar, direct, "p = {p}");
        }
    }

    #[test]
    fn label_shift_moves_each_weight_by_its_block_count() {
        let base = LabelSystem::new(
            Q,
            [(2, LabelData::Module(GradedModule::from_ranks(Q, [(1, 2)], 1)))].into_iter().collect(),
        )
        .unwrap();
        let up = segal_formula(&base, 1).unwrap();
        let a = iterated_formula_graded(&base, 1, Grading::Weight, 3, 12, &limits()).unwrap();
        let b = iterated_formula_graded(&up, 1, Grading::Weight, 3, 12, &limits()).unwrap();
        for w in 1..=3 {
            assert!(!a[&w].is_zero());
            assert_eq!(a[&w].shift(w, 12), b[&w], "weight {w}");
        }
        // with a single cluster size of one, every type has one block
        let one = LabelSystem::sphere_at(Q, 1, 2);
        let a = iterated_formula(&one, 2, 10, &limits()).unwrap().module;
        let b = iterated_formula(&segal_formula(&one, 1).unwrap(), 2, 10, &limits()).unwrap().module;
        assert_eq!(a.shift(1, 10), b);
    }

    #[test]
    fn json_shape() {
        let m = GradedModule::from_ranks(Field::Prime(3), [(0, 1), (2, 4)], 3);
        let v = serde_json::to_value(&m).unwrap();
        assert_eq!(v["field"], "Fp");
        assert_eq!(v["p"], 3);
        assert_eq!(v["ranks"]["2"], 4);
        let back: GradedModule = serde_json::from_value(v).unwrap();
        assert_eq!(back, m);
    }
}
