//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clusterhom::fox_neuwirth::{fn_complex, twisted_homology, ColourMultiset, ParityMap};
use clusterhom::geometry::{random_line_configuration, MooreElement};
use clusterhom::graded::{bar_formula_graded, iterated_formula, Field, Grading, LabelSystem};
use clusterhom::homology::{build_bar_complex, smith_normal_form, DiscreteMonoidD};
use clusterhom::partitions::{count_types_by_inversion, enumerate_types};
use clusterhom::selftest::run_selftest;
use clusterhom::stable::{
    colour_data, enumerate_lambda, lambda_bracket, stabilize_m, stable_homology, LambdaTuple,
};
use clusterhom::{AbelianGroup, EntanglementType, GradedAbelianGroup, Int, IntegerMatrix, Limits, Partition};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: clusterhom::Error) -> String {
    e.to_string()
}

fn random_partition(rng: &mut ChaCha8Rng, n: usize) -> Partition {
    let mut rgs = Vec::with_capacity(n);
    let mut blocks = 0u16;
    for _ in 0..n {
        let b = rng.gen_range(0..=blocks);
        if b == blocks {
            blocks += 1;
        }
        rgs.push(b);
    }
    Partition::from_rgs(rgs).unwrap()
}

fn free_monoid_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10_000 {
        let total = rng.gen_range(0..=12);
        let split = rng.gen_range(0..=total);
        let a = random_partition(&mut rng, split);
        let b = random_partition(&mut rng, total - split);
        let ab = a.stack(&b);
        let factors = ab.factorize();
        ensure(factors.iter().all(|e| e.partition().is_indecomposable()), || {
            format!("non-indecomposable factor of {ab}")
        })?;
        let mut joint = a.factorize();
        joint.extend(b.factorize());
        ensure(factors == joint, || format!("factorization of {a} * {b} is not the concatenation"))?;
        ensure(Partition::stack_all(factors.iter().map(EntanglementType::partition)) == ab, || {
            format!("{ab} does not rebuild from its factors")
        })?;
    }
    let enumerated: Vec<String> = (1..=10)
        .map(|n| enumerate_types(n, &Limits::default()).map(|v| v.len().to_string()))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    let inverted: Vec<String> = count_types_by_inversion(10, None).iter().map(|c| c.to_string()).collect();
    ensure(enumerated == inverted, || format!("enumeration {enumerated:?} vs inversion {inverted:?}"))?;
    Ok(format!("10000 roundtrips; type counts {}", enumerated.join(",")))
}

fn bar_oracle_suite() -> Outcome {
    let limits = Limits::default();
    let mut checked = 0;
    let mut systems = 0;
    for m1 in 0..=3 {
        for m2 in 0..=3 {
            for m3 in 0..=3 {
                let counts: BTreeMap<usize, usize> =
                    [(1, m1), (2, m2), (3, m3)].into_iter().filter(|&(_, m)| m > 0).collect();
                let monoid = DiscreteMonoidD::new(counts.clone(), 6).map_err(err)?;
                let labels = LabelSystem::discrete(Field::Rational, &counts);
                let formula =
                    bar_formula_graded(&labels, None, Grading::Size, 6, 2, &limits).map_err(err)?;
                let mut expected: BTreeMap<usize, usize> = (1..=6).map(|n| (n, 0)).collect();
                for n in 1..=6 {
                    for e in enumerate_types(n, &limits).map_err(err)? {
                        let product: usize = e
                            .profile()
                            .iter()
                            .map(|k| counts.get(k).copied().unwrap_or(0))
                            .product();
                        *expected.get_mut(&n).unwrap() += product;
                    }
                }
                for n in 1..=6 {
                    let h = build_bar_complex(&monoid, n, n, &limits).map_err(err)?.homology();
                    let tag = format!("counts ({m1},{m2},{m3}), weight {n}");
                    ensure(h.groups().iter().all(AbelianGroup::is_free), || format!("torsion at {tag}: {h}"))?;
                    ensure(h.groups().iter().skip(2).all(AbelianGroup::is_zero), || {
                        format!("homology above degree 1 at {tag}: {h}")
                    })?;
                    ensure(h.betti(1) == expected[&n], || {
                        format!("{tag}: H1 rank {} but type sum {}", h.betti(1), expected[&n])
                    })?;
                    let f = formula.get(&n).map_or(0, |m| m.rank(1));
                    ensure(f == expected[&n], || format!("{tag}: formula rank {f} but type sum {}", expected[&n]))?;
                    checked += 1;
                }
                systems += 1;
            }
        }
    }
    Ok(format!("{systems} label systems, {checked} weights"))
}

fn chi_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let one = BigRational::from_integer(1.into());
    let mut faces = 0;
    for _ in 0..10_000 {
        let na = rng.gen_range(0..=4);
        let nb = rng.gen_range(0..=4);
        let a = random_line_configuration(&mut rng, na, 3, 3);
        let b = random_line_configuration(&mut rng, nb, 3, 3);
        let ab = MooreElement::new(one.clone(), a.clone())
            .and_then(|x| x.concat(&MooreElement::new(one.clone(), b.clone())?))
            .map_err(err)?;
        let c = ab.configuration();
        let chi = c.chi().map_err(err)?;
        let stacked = a.chi().map_err(err)?.stack(&b.chi().map_err(err)?);
        ensure(chi == stacked, || format!("chi of concatenation {chi} differs from {stacked}"))?;
        for i in 0..c.clusters().len() {
            let lhs = c.remove_cluster(i).and_then(|x| x.chi()).map_err(err)?;
            let rhs = chi.remove_block(c.block_index(i).map_err(err)?).map_err(err)?;
            ensure(lhs == rhs, || format!("face {i} of {chi}: {lhs} vs {rhs}"))?;
            faces += 1;
        }
    }
    Ok(format!("10000 pairs, {faces} faces"))
}

fn integer_partitions(n: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if n == 0 {
        out.push(prefix.clone());
        return;
    }
    for part in (1..=n.min(max)).rev() {
        prefix.push(part);
        integer_partitions(n - part, part, prefix, out);
        prefix.pop();
    }
}

fn fn_homology(counts: &[usize], d: usize, bit: u8) -> Result<GradedAbelianGroup, String> {
    let a = ColourMultiset::from_counts(counts);
    let parity = ParityMap::constant(&a, bit);
    Ok(fn_complex(&a, d, &parity, &Limits::default()).map_err(err)?.homology())
}

fn graded(groups: Vec<AbelianGroup>) -> GradedAbelianGroup {
    GradedAbelianGroup::new(groups)
}

fn fox_neuwirth_suite() -> Outcome {
    let limits = Limits::default();
    let mut complexes = 0;
    for n in 1..=6 {
        let mut shapes = Vec::new();
        integer_partitions(n, n, &mut Vec::new(), &mut shapes);
        for counts in shapes {
            let a = ColourMultiset::from_counts(&counts);
            // twists only matter on colours with repeated points
            let repeated: Vec<usize> = (0..counts.len()).filter(|&i| counts[i] >= 2).collect();
            for mask in 0..1u32 << repeated.len() {
                let mut parity = ParityMap::trivial(&a);
                for (bit, &i) in repeated.iter().enumerate() {
                    parity.set(a.colours()[i].0.clone(), ((mask >> bit) & 1) as u8);
                }
                for d in 1..=3 {
                    let c = fn_complex(&a, d, &parity, &limits).map_err(err)?;
                    c.check_square_zero().map_err(err)?;
                    complexes += 1;
                }
            }
        }
    }
    let z = AbelianGroup::free(1);
    let two = AbelianGroup::new(0, vec![Int::from(2)]);
    let known = [
        ("M(R^2;(1,1))", fn_homology(&[1, 1], 2, 0)?, graded(vec![z.clone(), z.clone()])),
        ("M(R^2;(2))", fn_homology(&[2], 2, 0)?, graded(vec![z.clone(), z.clone()])),
        ("M(R^2;(2)) odd", fn_homology(&[2], 2, 1)?, graded(vec![two.clone()])),
        ("M(R^3;(2))", fn_homology(&[2], 3, 0)?, graded(vec![z.clone(), two])),
    ];
    for (name, got, want) in known {
        ensure(got == want, || format!("{name} = {got}, expected {want}"))?;
    }
    for n in 2..=4 {
        let h = fn_homology(&[n], 2, 0)?;
        ensure(h.degree(1) == z, || format!("H1(C_{n}(R^2)) = {}", h.degree(1)))?;
    }
    Ok(format!("{complexes} complexes square to zero; known answers exact"))
}

fn stabilization_suite() -> Outcome {
    let limits = Limits::default();
    let (k, p) = (2, 1);
    let lambdas: Vec<LambdaTuple> = enumerate_lambda(k, p, 1, &limits)
        .map_err(err)?
        .into_iter()
        .filter(|l| l.is_empty() || l.entries().iter().all(|(e, _)| e.weight() == 2))
        .collect();
    ensure(lambdas.len() == 3, || format!("expected 3 tuples, got {}", lambdas.len()))?;
    let mut pairs = 0;
    for lambda in &lambdas {
        let base = lambda.size();
        let homology: Vec<GradedAbelianGroup> = (base..=6)
            .map(|n| {
                let alpha = lambda_bracket(lambda, n)?;
                let (colours, parity) = colour_data(&alpha, p)?;
                twisted_homology(&colours, p + 1, &parity, 0..=3, &limits)
            })
            .collect::<Result<_, _>>()
            .map_err(err)?;
        for (i, pair) in homology.windows(2).enumerate() {
            let n = base + i;
            for g in 0..=(n - base) / 2 {
                ensure(pair[0].betti(g) == pair[1].betti(g), || {
                    format!("lambda {lambda}: degree {g} rank changes from n = {n} to {}", n + 1)
                })?;
                pairs += 1;
            }
        }
        let capped = Limits { max_points: 7, ..limits };
        stabilize_m(lambda, p, 2, &capped).map_err(err)?;
    }
    Ok(format!("{} tuples, {pairs} stable-range comparisons", lambdas.len()))
}

/// `M_0` of a connected coloured configuration space: the coinvariants of
/// the sign character, presented by one relation per colour.
fn coinvariants_oracle(alpha: &[(EntanglementType, usize)], p: usize) -> AbelianGroup {
    let relations: Vec<i64> = alpha
        .iter()
        .map(|(e, c)| {
            let odd = (p * (e.weight() - 1)) % 2 == 1;
            if *c >= 2 && odd {
                2
            } else {
                0
            }
        })
        .collect();
    let m = IntegerMatrix::from_dense(&[relations]).unwrap();
    let snf = smith_normal_form(&m);
    AbelianGroup::new(1 - snf.rank, snf.invariant_factors)
}

fn stable_suite() -> Outcome {
    let limits = Limits::default();
    for p in 1..=2 {
        let pipeline = stable_homology(1, p, 2, &limits).map_err(err)?;
        ensure(pipeline.is_complete(), || format!("k=1 p={p} not certified"))?;
        let a = ColourMultiset::from_counts(&[6]);
        let direct = twisted_homology(&a, p + 1, &ParityMap::trivial(&a), 0..=2, &limits).map_err(err)?;
        let direct_next = {
            let a = ColourMultiset::from_counts(&[7]);
            twisted_homology(&a, p + 1, &ParityMap::trivial(&a), 0..=2, &limits).map_err(err)?
        };
        ensure(direct == direct_next, || format!("C_n(R^{}) not stable by n = 6", p + 1))?;
        ensure(pipeline.group == direct, || {
            format!("k=1 p={p}: pipeline {} vs direct {direct}", pipeline.group)
        })?;
    }

    let (k, p) = (2, 1);
    let mut degree_one = AbelianGroup::zero();
    for lambda in enumerate_lambda(k, p, 1, &limits).map_err(err)? {
        let s = lambda.s();
        let module = stabilize_m(&lambda, p, 1 - p * s, &limits).map_err(err)?;
        let n = module.stable_at_n[0];
        let oracle = coinvariants_oracle(&lambda_bracket(&lambda, n).map_err(err)?, p);
        ensure(module.group.degree(0) == oracle, || {
            format!("M_0 of {lambda}: engine {} vs coinvariants {oracle}", module.group.degree(0))
        })?;
        degree_one = degree_one.direct_sum(&module.group.degree(1 - p * s));
    }
    let h = stable_homology(k, p, 1, &limits).map_err(err)?;
    ensure(h.is_complete(), || "k=2 p=1 not certified".into())?;
    ensure(h.group.degree(0) == AbelianGroup::free(1), || format!("degree 0 = {}", h.group.degree(0)))?;
    ensure(h.group.degree(1) == AbelianGroup::free(3), || format!("degree 1 = {}", h.group.degree(1)))?;
    ensure(degree_one == h.group.degree(1), || format!("hand assembly {degree_one} vs {}", h.group.degree(1)))?;
    Ok(format!("k=1 matches direct for p=1,2; k=2 p=1: {}", h.group))
}

fn formula_suite() -> Outcome {
    let labels = LabelSystem::sphere_at(Field::Rational, 2, 0);
    let r = iterated_formula(&labels, 1, 5, &Limits::default()).map_err(err)?;
    let ranks: Vec<usize> = (0..=5).map(|d| r.module.rank(d)).collect();
    ensure(ranks == [0, 0, 1, 2, 10, 74], || format!("ranks {ranks:?}"))?;
    Ok(format!("ranks in degrees 0..=5: {ranks:?}"))
}

fn determinism_suite() -> Outcome {
    let reports: Vec<String> = [1, 4, 8]
        .into_iter()
        .map(|threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| run_selftest(2024, &Limits::default()).render())
        })
        .collect();
    ensure(reports.iter().all(|r| r == &reports[0]), || "selftest output depends on thread count".into())?;
    ensure(!reports[0].contains("FAIL"), || reports[0].clone())?;
    Ok(format!("{} identical bytes across 1, 4, 8 threads", reports[0].len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 free monoid", free_monoid_suite, Duration::from_secs(10)),
        ("2 discrete bar oracle", bar_oracle_suite, Duration::from_secs(120)),
        ("3 chi homomorphism", chi_suite, Duration::from_secs(10)),
        ("4 fox-neuwirth known answers", fox_neuwirth_suite, Duration::from_secs(300)),
        ("5 stabilization", stabilization_suite, Duration::from_secs(600)),
        ("6 stable homology end to end", stable_suite, Duration::from_secs(900)),
        ("7 formula evaluators", formula_suite, Duration::from_secs(1)),
        ("8 determinism", determinism_suite, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => Err(format!("{detail}; over budget of {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} ({:.2} s)", elapsed.as_secs_f64()),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail} ({:.2} s)", elapsed.as_secs_f64());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
