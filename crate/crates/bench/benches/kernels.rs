use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use selberg_gas::averages::mc_density_matrix;
use selberg_gas::ensembles::{sample_jue_halfhalf, RngStream};
use selberg_gas::fisherhartwig::toeplitz_determinant;
use selberg_gas::heine::heine_average;
use selberg_gas::quadrature::{gauss_rule, RuleKind};
use selberg_gas::specfun::{log_barnes_g, log_gamma};
use selberg_gas::{Boundary, DensityMatrixQuery, SymbolSpec};

fn specfun(c: &mut Criterion) {
    c.bench_function("log_gamma", |b| b.iter(|| log_gamma(black_box(7.3))));
    c.bench_function("log_barnes_g", |b| b.iter(|| log_barnes_g(black_box(41.5))));
}

fn quadrature(c: &mut Criterion) {
    c.bench_function("gauss_jacobi_64", |b| {
        b.iter(|| gauss_rule(RuleKind::Jacobi { alpha: 0.5, beta: -0.5 }, black_box(64)))
    });
}

fn heine(c: &mut Criterion) {
    c.bench_function("heine_charge_n40", |b| {
        b.iter(|| heine_average(0.5, 0.5, black_box(40), &|_| 1.0, &[(0.5, 2.0)], 0, 1e-13))
    });
}

fn sampling(c: &mut Criterion) {
    c.bench_function("recurrence_sample_n14", |b| {
        let mut k = 0;
        b.iter(|| {
            k += 1;
            sample_jue_halfhalf(14, &mut RngStream::new(1, k))
        })
    });
    let mut g = c.benchmark_group("mc");
    g.sample_size(10);
    let q = DensityMatrixQuery::new(14, 0.2, 0.8, Boundary::Dirichlet);
    g.bench_function("dirichlet_n14_m1000", |b| b.iter(|| mc_density_matrix(&q, 1000, black_box(7))));
    g.finish();
}

fn toeplitz(c: &mut Criterion) {
    let sym = SymbolSpec::toeplitz(vec![], vec![(0.0, 0.5)]).unwrap();
    let mut g = c.benchmark_group("toeplitz");
    g.sample_size(10);
    g.bench_function("fh_size48", |b| b.iter(|| toeplitz_determinant(&sym, black_box(48))));
    g.finish();
}

criterion_group!(benches, specfun, quadrature, heine, sampling, toeplitz);
criterion_main!(benches);
