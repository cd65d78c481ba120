//! Sequential vs rayon-parallel Jacobian evaluation on the two nonlinear
//! families, plus plan compilation time.
//!
//! Run with `cargo bench -p orkit`. The `parallel` feature must be enabled
//! (it is by default).

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use orkit::generators::{clnlbeam, cont5_1, ClnlbeamConfig, Cont51Config};
use orkit::nlexpr::{compile_jacobian, JacobianPlan, NonlinearModel};
use rand::{Rng, SeedableRng};

fn seeded_point(m: &NonlinearModel, seed: u64) -> Vec<f64> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (1..=m.num_variables() as u32)
        .map(|c| {
            let (lb, ub) = m.bounds(c);
            let lo = lb.max(-1.0);
            let hi = ub.min(1.0);
            rng.random_range(lo..=hi)
        })
        .collect()
}

fn bench_family(c: &mut Criterion, name: &str, build: impl Fn(usize) -> (JacobianPlan, Vec<f64>), sizes: &[usize]) {
    let mut group = c.benchmark_group(name);
    for &n in sizes {
        let (plan, x) = build(n);
        group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, _| {
            b.iter(|| plan.evaluate_sequential(black_box(&x)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, _| {
            b.iter(|| plan.evaluate_parallel(black_box(&x)).unwrap())
        });
    }
    group.finish();
}

fn jacobian_eval(c: &mut Criterion) {
    bench_family(
        c,
        "clnlbeam_eval",
        |n| {
            let m = clnlbeam(&ClnlbeamConfig { n }).unwrap();
            let x = seeded_point(&m, 1);
            (compile_jacobian(&m), x)
        },
        &[5_000, 50_000],
    );
    bench_family(
        c,
        "cont5_1_eval",
        |n| {
            let m = cont5_1(&Cont51Config { n }).unwrap();
            let x = seeded_point(&m, 2);
            (compile_jacobian(&m), x)
        },
        &[100, 200],
    );
}

fn plan_compile(c: &mut Criterion) {
    c.bench_function("clnlbeam_compile_5000", |b| {
        let m = clnlbeam(&ClnlbeamConfig { n: 5_000 }).unwrap();
        b.iter(|| compile_jacobian(black_box(&m)))
    });
}

criterion_group!(benches, jacobian_eval, plan_compile);
criterion_main!(benches);
