use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use clusterhom::fox_neuwirth::fn_complex;
use clusterhom::homology::{build_bar_complex, smith_normal_form};
use clusterhom::partitions::{count_types_by_inversion, enumerate_types};
use clusterhom::stable::stable_homology;
use clusterhom::Limits;
use clusterhom_bench::{fn_case, fn_case_name, mixed_monoid, prebuilt_fn_complex, FN_CASES};

fn partitions(c: &mut Criterion) {
    let limits = Limits::default();
    let mut group = c.benchmark_group("partitions");
    for n in [6, 8, 9] {
        group.bench_with_input(BenchmarkId::new("enumerate_types", n), &n, |b, &n| {
            b.iter(|| enumerate_types(black_box(n), &limits).unwrap())
        });
    }
    group.bench_function("count_by_inversion/60", |b| b.iter(|| count_types_by_inversion(black_box(60), None)));
    group.finish();
}

fn fox_neuwirth(c: &mut Criterion) {
    let limits = Limits::default();
    let mut group = c.benchmark_group("fox_neuwirth");
    for &(counts, d) in FN_CASES {
        let (alpha, parity) = fn_case(counts);
        let name = fn_case_name(counts, d);
        group.bench_function(BenchmarkId::new("build", &name), |b| {
            b.iter(|| fn_complex(&alpha, d, &parity, &limits).unwrap())
        });
        let complex = prebuilt_fn_complex(counts, d);
        group.bench_function(BenchmarkId::new("homology", &name), |b| b.iter(|| complex.homology()));
    }
    group.finish();
}

fn smith(c: &mut Criterion) {
    let complex = prebuilt_fn_complex(&[2, 2, 1], 3);
    let widest = (1..=complex.top_degree().unwrap_or(0))
        .filter_map(|n| complex.boundary(n))
        .max_by_key(|m| m.nnz())
        .expect("complex has a boundary")
        .clone();
    c.bench_function("smith_normal_form/fn_boundary", |b| b.iter(|| smith_normal_form(black_box(&widest))));
}

fn bar(c: &mut Criterion) {
    let limits = Limits::default();
    let monoid = mixed_monoid(6);
    let mut group = c.benchmark_group("bar_complex");
    group.sample_size(10);
    for n in [4, 5, 6] {
        group.bench_with_input(BenchmarkId::new("build_and_homology", n), &n, |b, &n| {
            b.iter(|| build_bar_complex(&monoid, n, n, &limits).unwrap().homology())
        });
    }
    group.finish();
}

fn stable(c: &mut Criterion) {
    let limits = Limits::default();
    let mut group = c.benchmark_group("stable");
    group.sample_size(10);
    group.bench_function("k2_p1_degree2", |b| b.iter(|| stable_homology(2, 1, 2, &limits).unwrap()));
    group.finish();
}

criterion_group!(benches, partitions, fox_neuwirth, smith, bar, stable);
criterion_main!(benches);
