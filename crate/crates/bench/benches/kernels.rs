use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use oodlab_bench::{full_binary_class, skewed_pair, uniform_exponential};
use oodlab_core::junta::verify_all;
use oodlab_core::lab::engines::{run_marginal_match, InstanceParams};
use oodlab_core::lab::{grue, sweep, GrueParams, SweepParams};
use oodlab_core::rational::q;
use oodlab_core::{alpha_bounds, alpha_exact, vc_dimension_exact, AlphaQuery};

fn alpha(c: &mut Criterion) {
    let mut g = c.benchmark_group("alpha");
    for size in [12, 18, 22] {
        let (d, dp) = skewed_pair(size);
        g.bench_with_input(BenchmarkId::new("exact_skewed", size), &size, |b, _| {
            b.iter(|| alpha_exact(&AlphaQuery::new(&d, &dp, q(1, 2)).unwrap()).unwrap())
        });
    }
    let (u, e) = uniform_exponential(1.0, 10_000);
    g.bench_function("exact_uniform_exponential_10k", |b| {
        b.iter(|| alpha_exact(&AlphaQuery::new(&u, &e, q(1, 2)).unwrap()).unwrap())
    });
    g.bench_function("bounds_uniform_exponential_10k", |b| {
        b.iter(|| alpha_bounds(&AlphaQuery::new(&u, &e, q(1, 2)).unwrap()))
    });
    g.finish();
}

fn vc(c: &mut Criterion) {
    let mut g = c.benchmark_group("vc");
    g.sample_size(10);
    for n in [2, 3] {
        let class = full_binary_class(n);
        g.bench_with_input(BenchmarkId::new("full_class", n), &n, |b, _| {
            b.iter(|| vc_dimension_exact(black_box(&class), 32).unwrap())
        });
    }
    g.finish();
}

fn lab(c: &mut Criterion) {
    let mut g = c.benchmark_group("lab");
    g.sample_size(10);
    let scenario = grue(GrueParams::new(8)).unwrap();
    let params = SweepParams {
        m_grid: vec![0, 1, 2, 4, 8, 16, 32, 64, 128, 256],
        trials: 200,
        epsilon: 0.1,
        delta: 0.1,
        seed: 1,
        bound_constants: vec![1.0],
    };
    g.bench_function("grue_sweep_200_trials", |b| {
        b.iter(|| sweep(&scenario, &["sparse", "unrestricted"], &params, None).unwrap())
    });
    let instances = InstanceParams {
        instances: 50,
        ..InstanceParams::default()
    };
    g.bench_function("marginal_match_50", |b| b.iter(|| run_marginal_match(&instances, 1).unwrap()));
    g.bench_function("square_wave_all_m12", |b| b.iter(|| verify_all(black_box(12)).unwrap()));
    g.finish();
}

criterion_group!(benches, alpha, vc, lab);
criterion_main!(benches);
