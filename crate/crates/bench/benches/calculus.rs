use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gkw_bench::{dense_poly, section};
use gkw_core::catalog::by_name;
use gkw_core::courant_bracket;
use gkw_core::exterior::Ambient;

fn polynomials(c: &mut Criterion) {
    let mut g = c.benchmark_group("polynomial_product");
    for n in [2, 3] {
        let a = dense_poly(n, 3);
        let b = dense_poly(n, 2);
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |bench, _| {
            bench.iter(|| black_box(&a) * black_box(&b))
        });
    }
    g.finish();
}

fn brackets(c: &mut Criterion) {
    let mut g = c.benchmark_group("courant_bracket");
    for n in [2, 3] {
        let a = section(n, 2, 0);
        let b = section(n, 2, 1);
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |bench, _| {
            bench.iter(|| courant_bracket(black_box(&a), black_box(&b)))
        });
    }
    g.finish();
}

fn maurer_cartan(c: &mut Criterion) {
    let mut g = c.benchmark_group("maurer_cartan_residual");
    for name in ["cpn-3", "grassmann-2-3"] {
        let eps = by_name(name).unwrap().eps.unwrap();
        g.bench_function(name, |bench| {
            bench.iter(|| {
                black_box(&eps)
                    .maurer_cartan_residual(Ambient::StandardComplex)
                    .unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, polynomials, brackets, maurer_cartan);
criterion_main!(benches);
