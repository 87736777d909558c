//! Parallel and sequential execution of the heaviest kernels.

use ale_core::gh_space::GHConfig;
use ale_core::l2_harmonic::{build_omega, omega_norm};
use ale_core::obstruction::{d2_invariant, with_first_row_zero, Jet2, Jet4};
use ale_core::par::{self, Exec};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

const POLICIES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn omega_norm_bench(c: &mut Criterion) {
    let bundle = build_omega(&GHConfig::a_series(2, 1.0).unwrap()).unwrap();
    let mut group = c.benchmark_group("omega_norm_k2");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| par::with_exec(exec, || omega_norm(black_box(&bundle)).unwrap().value))
        });
    }
    group.finish();
}

fn d_invariant_bench(c: &mut Criterion) {
    let jet = with_first_row_zero(&Jet2::random(1, 1.0));
    let jet4 = Jet4::random(2, 1.0);
    let mut group = c.benchmark_group("d_invariant_fd");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                par::with_exec(exec, || {
                    d2_invariant(black_box(&jet), black_box(&jet4)).unwrap()
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, omega_norm_bench, d_invariant_bench);
criterion_main!(benches);
