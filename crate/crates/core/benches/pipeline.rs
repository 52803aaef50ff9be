//! Benchmarks for the three parallel kernels: Monte Carlo truth,
//! cohort decomposition, and the bootstrap. With the `parallel` feature
//! each kernel is also run inside a single-thread rayon pool, so one
//! report shows the speedup; `cargo bench --no-default-features` times
//! the pure sequential build instead.

use criterion::{criterion_group, criterion_main, Criterion};

use riskdecomp::boot::{bootstrap_bands, BootstrapPlan};
use riskdecomp::hazards::{HazardModelSpec, ModelSpec};
use riskdecomp::pipeline::decompose_cohort;
use riskdecomp::sim::{emit_cohort, monte_carlo_truth, preset};

fn model() -> ModelSpec {
    ModelSpec::shared(HazardModelSpec {
        time_df: 2,
        covariates: vec![],
        treatment_time_interaction: true,
        ridge: 0.0,
    })
}

fn bench_kernels(c: &mut Criterion) {
    let truth_spec = preset("scenario2", 50_000, 7).unwrap();
    let cohort = emit_cohort(&preset("scenario1", 4_000, 8).unwrap()).unwrap();
    let boot_cohort = emit_cohort(&preset("scenario1", 800, 9).unwrap()).unwrap();
    let plan = BootstrapPlan { replicates: 8, seed: 3, level: 0.95 };
    let spec = model();

    let mut group = c.benchmark_group("kernels");
    group.sample_size(10);
    group.bench_function("monte_carlo_truth_50k", |b| {
        b.iter(|| monte_carlo_truth(std::hint::black_box(&truth_spec)).unwrap())
    });
    group.bench_function("decompose_cohort_4k", |b| {
        b.iter(|| decompose_cohort(std::hint::black_box(&cohort), &spec).unwrap())
    });
    group.bench_function("bootstrap_800x8", |b| {
        b.iter(|| bootstrap_bands(std::hint::black_box(&boot_cohort), &spec, &plan).unwrap())
    });

    #[cfg(feature = "parallel")]
    {
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        group.bench_function("monte_carlo_truth_50k_1thread", |b| {
            b.iter(|| single.install(|| monte_carlo_truth(std::hint::black_box(&truth_spec)).unwrap()))
        });
        group.bench_function("decompose_cohort_4k_1thread", |b| {
            b.iter(|| single.install(|| decompose_cohort(std::hint::black_box(&cohort), &spec).unwrap()))
        });
        group.bench_function("bootstrap_800x8_1thread", |b| {
            b.iter(|| single.install(|| bootstrap_bands(std::hint::black_box(&boot_cohort), &spec, &plan).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_kernels);
criterion_main!(benches);
