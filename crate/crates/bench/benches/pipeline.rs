use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use friending_core::{
    build_cover_instance, compute_vmax, estimate_f_traces, preferential_attachment, raf, sample_batch, solve_greedy,
    sp, RafOptions, VmaxMode,
};
use friending_bench::busy_pair;

fn sampling(c: &mut Criterion) {
    let g = preferential_attachment(5_000, 7, 1).unwrap();
    let inst = busy_pair(&g);
    let mut group = c.benchmark_group("sample_batch");
    for l in [1_000u64, 10_000, 100_000] {
        group.bench_with_input(BenchmarkId::from_parameter(l), &l, |b, &l| {
            b.iter(|| black_box(sample_batch(&inst, l, 7).ones))
        });
    }
    group.finish();
}

fn cover(c: &mut Criterion) {
    let g = preferential_attachment(5_000, 7, 1).unwrap();
    let inst = busy_pair(&g);
    let batch = sample_batch(&inst, 100_000, 7);
    let p = batch.ones / 10;
    let instance = build_cover_instance(&batch, inst.candidates(), p).unwrap();
    c.bench_function("greedy_cover_100k", |b| b.iter(|| black_box(solve_greedy(&instance).unwrap().chosen.len())));
}

fn stages(c: &mut Criterion) {
    let g = preferential_attachment(5_000, 7, 1).unwrap();
    let inst = busy_pair(&g);
    c.bench_function("vmax_exact", |b| b.iter(|| black_box(compute_vmax(&inst, VmaxMode::Exact).len())));
    c.bench_function("sp_k20", |b| b.iter(|| black_box(sp(&inst, 20).unwrap().nodes.len())));
    let set = sp(&inst, 20).unwrap().nodes;
    c.bench_function("estimate_f_traces_10k", |b| {
        b.iter(|| black_box(estimate_f_traces(&inst, &set, 10_000, 3).unwrap().mean))
    });
    let opts = RafOptions { l_override: Some(20_000), f_check_samples: 0, pmax_epsilon_cap: 0.3, ..Default::default() };
    let mut group = c.benchmark_group("raf");
    group.sample_size(10);
    group.bench_function("l20k", |b| b.iter(|| black_box(raf(&inst, 0.1, 0.01, 10.0, &opts).unwrap().invitation.len())));
    group.finish();
}

criterion_group!(benches, sampling, cover, stages);
criterion_main!(benches);
