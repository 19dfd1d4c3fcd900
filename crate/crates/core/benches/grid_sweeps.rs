//! Parallel versus sequential node sweeps.
//!
//! Build with `--no-default-features` to see the sequential fallback; with
//! the `parallel` feature both executors are measured side by side.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use geodloom::config::{set_exec, Exec};
use geodloom::gallery::{random_perturbed, sphere_vertical};
use geodloom::gauss::{scan_admissibility, scan_times};
use geodloom::hypersurface::fundamental_data;
use std::hint::black_box;

fn bench_fundamental_data(c: &mut Criterion) {
    let chart = random_perturbed(2, 7, 0.05, 0.2, 0.5, 41).unwrap();
    let mut group = c.benchmark_group("fundamental_data");
    for exec in [Exec::Sequential, Exec::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            set_exec(exec);
            b.iter(|| black_box(fundamental_data(&chart).unwrap()));
        });
    }
    set_exec(Exec::default());
    group.finish();
}

fn bench_admissibility_scan(c: &mut Criterion) {
    let zeta = sphere_vertical(2, 15).unwrap();
    let times: Vec<f64> = scan_times().into_iter().step_by(8).collect();
    let mut group = c.benchmark_group("admissibility_scan");
    group.sample_size(10);
    for exec in [Exec::Sequential, Exec::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| black_box(scan_admissibility(&zeta, &times, exec)));
        });
    }
    group.finish();
}

criterion_group!(benches, bench_fundamental_data, bench_admissibility_scan);
criterion_main!(benches);
