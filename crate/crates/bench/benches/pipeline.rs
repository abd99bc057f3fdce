use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use screening_bench::{beta_grid, canonical_interval};
use screening_core::audit::{sweep_impossibility, SweepTarget};
use screening_core::ext::ExtReal;
use screening_core::gauss::hazard;
use screening_core::mc::mc_posterior_mean;
use screening_core::model::AdmissionRule;
use screening_core::posterior::{
    hiring_grade_threshold, posterior_mean_threshold, posterior_moment,
};

fn bench_hazard(c: &mut Criterion) {
    c.bench_function("hazard_grid_1k", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for i in 0..1000 {
                let x = -40.0 + 80.0 * i as f64 / 999.0;
                acc += hazard(black_box(x)).unwrap();
            }
            acc
        })
    });
}

fn bench_posterior(c: &mut Criterion) {
    let scenario = canonical_interval();
    c.bench_function("posterior_closed_form", |b| {
        b.iter(|| {
            posterior_mean_threshold(
                &scenario.pop1,
                1.0,
                ExtReal::Finite(black_box(0.3)),
                black_box(-0.2),
            )
            .unwrap()
        })
    });
    let rule = AdmissionRule::step(vec![(0.0, 0.5), (1.0, 1.0)]).unwrap();
    c.bench_function("posterior_moment_quadrature", |b| {
        b.iter(|| posterior_moment(&scenario.pop1, 1.0, &rule, black_box(0.4), 1).unwrap())
    });
    c.bench_function("hiring_grade_threshold", |b| {
        b.iter(|| hiring_grade_threshold(&scenario.pop1, 1.0, &rule, black_box(0.5)).unwrap())
    });
}

fn bench_sweep(c: &mut Criterion) {
    let scenario = canonical_interval();
    let betas = beta_grid(11);
    c.bench_function("sweep_multi_igm_11x11", |b| {
        b.iter(|| sweep_impossibility(&scenario, &betas, &betas, SweepTarget::MultiIgm).unwrap())
    });
}

fn bench_mc(c: &mut Criterion) {
    let scenario = canonical_interval();
    let rule = AdmissionRule::Threshold(ExtReal::Finite(0.0));
    let mut group = c.benchmark_group("mc");
    group.sample_size(10);
    group.bench_function("posterior_mean_1e5", |b| {
        b.iter(|| {
            mc_posterior_mean(&scenario.pop1, 1.0, &rule, 0.0, 0.02, 100_000, black_box(7))
                .unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, bench_hazard, bench_posterior, bench_sweep, bench_mc);
criterion_main!(benches);
