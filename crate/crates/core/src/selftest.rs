//! A deterministic invariant suite over every module.
//!
//! The report depends only on the seed and the limits, never on timing or
//! thread scheduling, so runs can be compared byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::fox_neuwirth::{fn_complex, ColourMultiset, ParityMap};
use crate::geometry::{random_line_configuration, MooreElement};
use crate::graded::{bar_formula_graded, iterated_formula, Field, Grading, LabelSystem};
use crate::homology::{
    build_bar_complex, decompose_monoid_element, smith_normal_form, AbelianGroup, DiscreteMonoidD,
    Int, IntegerMatrix, MonoidElement,
};
use crate::partitions::{
    count_types_by_inversion, enumerate_types, enumerate_types_uniform, Partition,
};
use crate::stable::stable_homology;
use crate::{Limits, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
}

impl SelftestReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// One line per check.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{status} {}: {}", c.name, c.detail);
        }
        out
    }
}

type Check = fn(&mut ChaCha8Rng, &Limits) -> Result<(bool, String)>;

const CHECKS: &[(&str, Check)] = &[
    ("free-monoid-roundtrip", free_monoid_roundtrip),
    ("type-counts", type_counts),
    ("smith-form-permutation", smith_form_permutation),
    ("bar-homology", bar_homology),
    ("chi-homomorphism", chi_homomorphism),
    ("fox-neuwirth-known-answers", fox_neuwirth_known_answers),
    ("fox-neuwirth-square-zero", fox_neuwirth_square_zero),
    ("stable-homology", stable_check),
    ("iterated-formula", iterated_check),
];

/// Runs every check with its own generator derived from `seed`.
pub fn run_selftest(seed: u64, limits: &Limits) -> SelftestReport {
    let checks = CHECKS
        .iter()
        .enumerate()
        .map(|(i, (name, check))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            match check(&mut rng, limits) {
                Ok((passed, detail)) => CheckResult { name, passed, detail },
                Err(e) => CheckResult {
                    name,
                    passed: false,
                    detail: format!("error: {e}"),
                },
            }
        })
        .collect();
    SelftestReport { seed, checks }
}

fn random_partition(rng: &mut ChaCha8Rng, max_len: usize) -> Partition {
    let n = rng.gen_range(0..=max_len);
    let mut rgs = Vec::with_capacity(n);
    let mut blocks = 0u16;
    for _ in 0..n {
        let b = rng.gen_range(0..=blocks);
        if b == blocks {
            blocks += 1;
        }
        rgs.push(b);
    }
    Partition::from_rgs(rgs).expect("generated restricted growth string")
}

fn free_monoid_roundtrip(rng: &mut ChaCha8Rng, _: &Limits) -> Result<(bool, String)> {
    let trials = 2000;
    let mut ok = 0;
    for _ in 0..trials {
        let a = random_partition(rng, 6);
        let b = random_partition(rng, 6);
        let ab = a.stack(&b);
        let mut joint = a.factorize();
        joint.extend(b.factorize());
        let rebuilt = Partition::stack_all(joint.iter().map(|e| e.partition()));
        if ab.factorize() == joint
            && rebuilt == ab
            && ab.filtration_level() == a.filtration_level().max(b.filtration_level())
        {
            ok += 1;
        }
    }
    Ok((ok == trials, format!("{ok}/{trials} roundtrips")))
}

fn type_counts(_: &mut ChaCha8Rng, limits: &Limits) -> Result<(bool, String)> {
    let n_max = 8.min(limits.max_partition_size);
    let by_enumeration: Vec<usize> = (1..=n_max)
        .map(|n| enumerate_types(n, limits).map(|v| v.len()))
        .collect::<Result<_>>()?;
    let by_series: Vec<usize> = count_types_by_inversion(n_max, None)
        .iter()
        .map(|c| c.to_string().parse().expect("small count"))
        .collect();
    let uniform: Vec<usize> = (1..=4)
        .map(|w| enumerate_types_uniform(2, w, limits).map(|v| v.len()))
        .collect::<Result<_>>()?;
    let uniform_series: Vec<usize> = count_types_by_inversion(4, Some(2))
        .iter()
        .map(|c| c.to_string().parse().expect("small count"))
        .collect();
    let passed = by_enumeration == by_series && uniform == uniform_series;
    Ok((passed, format!("sizes 1..={n_max}: {by_enumeration:?}; E[2] weights 1..=4: {uniform:?}")))
}

fn smith_form_permutation(rng: &mut ChaCha8Rng, _: &Limits) -> Result<(bool, String)> {
    let trials = 200;
    let mut ok = 0;
    let mut torsion_seen = 0;
    for _ in 0..trials {
        let rows = rng.gen_range(1..=6);
        let cols = rng.gen_range(1..=6);
        let dense: Vec<Vec<i64>> = (0..rows)
            .map(|_| (0..cols).map(|_| rng.gen_range(-3..=3)).collect())
            .collect();
        let m = IntegerMatrix::from_dense(&dense)?;
        let mut rp: Vec<usize> = (0..rows).collect();
        let mut cp: Vec<usize> = (0..cols).collect();
        for i in (1..rows).rev() {
            rp.swap(i, rng.gen_range(0..=i));
        }
        for i in (1..cols).rev() {
            cp.swap(i, rng.gen_range(0..=i));
        }
        let s = smith_normal_form(&m);
        let chain = s
            .invariant_factors
            .windows(2)
            .all(|w| w[1].div_mod_floor(&w[0]).1.is_zero());
        if chain && s == smith_normal_form(&m.permuted(&rp, &cp)?) {
            ok += 1;
        }
        torsion_seen += usize::from(!s.invariant_factors.is_empty());
    }
    Ok((ok == trials, format!("{ok}/{trials} invariant, {torsion_seen} with torsion")))
}

fn bar_homology(_: &mut ChaCha8Rng, limits: &Limits) -> Result<(bool, String)> {
    let systems: [&[(usize, usize)]; 4] = [&[(1, 1)], &[(1, 2), (2, 1)], &[(2, 2)], &[(1, 1), (2, 1), (3, 1)]];
    let mut passed = true;
    let mut ranks = Vec::new();
    for counts in systems {
        let counts: BTreeMap<usize, usize> = counts.iter().copied().collect();
        let monoid = DiscreteMonoidD::new(counts.clone(), 4)?;
        let labels = LabelSystem::discrete(Field::Rational, &counts);
        let formula = bar_formula_graded(&labels, None, Grading::Size, 4, 2, limits)?;
        for n in 1..=4 {
            let h = build_bar_complex(&monoid, n, n, limits)?.homology();
            let free = h.groups().iter().all(AbelianGroup::is_free);
            let low = h.groups().iter().skip(2).all(AbelianGroup::is_zero);
            passed &= free && low && h.betti(1) == formula[&n].rank(1);
            ranks.push(h.betti(1));
        }
        for m in monoid.elements_of_weight(4, limits)? {
            let back = decompose_monoid_element(&m)
                .iter()
                .fold(MonoidElement::identity(), |acc, f| acc.multiply(f));
            passed &= back == m;
        }
    }
    Ok((passed, format!("degree-1 ranks {ranks:?}")))
}

fn chi_homomorphism(rng: &mut ChaCha8Rng, _: &Limits) -> Result<(bool, String)> {
    let trials = 1000;
    let mut ok = 0;
    let one = num_rational::BigRational::from_integer(1.into());
    for _ in 0..trials {
        let na = rng.gen_range(0..=3);
        let nb = rng.gen_range(0..=3);
        let a = random_line_configuration(rng, na, 3, 2);
        let b = random_line_configuration(rng, nb, 3, 2);
        let ab = MooreElement::new(one.clone(), a.clone())?.concat(&MooreElement::new(one.clone(), b.clone())?)?;
        let mut good = ab.configuration().chi()? == a.chi()?.stack(&b.chi()?);
        if !a.is_empty() {
            let i = rng.gen_range(0..a.clusters().len());
            let block = a.block_index(i)?;
            good &= a.remove_cluster(i)?.chi()? == a.chi()?.remove_block(block)?;
        }
        ok += usize::from(good);
    }
    Ok((ok == trials, format!("{ok}/{trials} pairs")))
}

fn homology_of(counts: &[usize], d: usize, bit: u8, limits: &Limits) -> Result<Vec<AbelianGroup>> {
    let a = ColourMultiset::from_counts(counts);
    let parity = ParityMap::constant(&a, bit);
    Ok(fn_complex(&a, d, &parity, limits)?.homology().groups().to_vec())
}

fn fox_neuwirth_known_answers(_: &mut ChaCha8Rng, limits: &Limits) -> Result<(bool, String)> {
    let z = AbelianGroup::free(1);
    let two = AbelianGroup::new(0, vec![Int::from(2)]);
    let cases: Vec<(&str, Vec<AbelianGroup>, Vec<AbelianGroup>)> = vec![
        ("(1,1) d=2", homology_of(&[1, 1], 2, 0, limits)?, vec![z.clone(), z.clone()]),
        ("(2) d=2", homology_of(&[2], 2, 0, limits)?, vec![z.clone(), z.clone()]),
        ("(2) d=2 odd", homology_of(&[2], 2, 1, limits)?, vec![two.clone()]),
        ("(2) d=3", homology_of(&[2], 3, 0, limits)?, vec![z.clone(), two.clone()]),
        ("(3) d=2", homology_of(&[3], 2, 0, limits)?, vec![z.clone(), z.clone()]),
        ("(4) d=2", homology_of(&[4], 2, 0, limits)?, vec![z.clone(), z.clone(), two]),
    ];
    let failed: Vec<&str> = cases.iter().filter(|c| c.1 != c.2).map(|c| c.0).collect();
    Ok((failed.is_empty(), format!("{} cases, failed {failed:?}", cases.len())))
}

fn fox_neuwirth_square_zero(rng: &mut ChaCha8Rng, limits: &Limits) -> Result<(bool, String)> {
    let mut built = 0;
    let mut cells = 0;
    for _ in 0..30 {
        let colours = rng.gen_range(1..=3);
        let mut counts: Vec<usize> = (0..colours).map(|_| rng.gen_range(1..=2)).collect();
        while counts.iter().sum::<usize>() > 5 {
            counts.pop();
        }
        let d = rng.gen_range(1..=3);
        let a = ColourMultiset::from_counts(&counts);
        let mut parity = ParityMap::trivial(&a);
        for i in 0..counts.len() {
            parity.set(i.to_string(), rng.gen_range(0..=1));
        }
        // construction verifies the square
        let c = fn_complex(&a, d, &parity, limits)?;
        cells += c.ranks().iter().sum::<usize>();
        built += 1;
    }
    Ok((true, format!("{built} complexes, {cells} cells")))
}

fn stable_check(_: &mut ChaCha8Rng, limits: &Limits) -> Result<(bool, String)> {
    let h = stable_homology(2, 1, 1, limits)?;
    let k1 = stable_homology(1, 1, 2, limits)?;
    let passed = h.is_complete()
        && h.group.degree(0) == AbelianGroup::free(1)
        && h.group.degree(1) == AbelianGroup::free(3)
        && k1.is_complete();
    Ok((passed, format!("k=2 p=1: {}; k=1 p=1: {}", h.group, k1.group)))
}

fn iterated_check(_: &mut ChaCha8Rng, limits: &Limits) -> Result<(bool, String)> {
    let labels = LabelSystem::sphere_at(Field::Rational, 2, 0);
    let r = iterated_formula(&labels, 1, 5, limits)?;
    let ranks: Vec<usize> = (2..=5).map(|d| r.module.rank(d)).collect();
    Ok((ranks == [1, 2, 10, 74], format!("degrees 2..=5: {ranks:?}")))
}
