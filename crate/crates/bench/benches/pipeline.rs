use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use gkw_core::catalog::by_name;
use gkw_core::reduction::{quotient_at_point, sample_level_set, type_table};

fn pointwise(c: &mut Criterion) {
    let mut g = c.benchmark_group("quotient_at_point");
    for name in ["cpn-2", "grassmann-2-3", "hyperkahler-flat"] {
        let sc = by_name(name).unwrap().scenario;
        let point = sample_level_set(&sc, 1, sc.seed).unwrap().points.remove(0);
        g.bench_function(name, |bench| {
            bench.iter(|| quotient_at_point(black_box(&sc), black_box(&point)).unwrap())
        });
    }
    g.finish();
}

fn tables(c: &mut Criterion) {
    let mut g = c.benchmark_group("type_table");
    g.sample_size(10);
    for name in ["cpn-2", "cpn-3"] {
        let sc = by_name(name).unwrap().scenario;
        g.bench_function(name, |bench| {
            bench.iter(|| type_table(black_box(&sc)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, pointwise, tables);
criterion_main!(benches);
