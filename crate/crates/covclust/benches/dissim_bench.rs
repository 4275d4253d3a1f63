//! Benchmarks for the dissimilarity kernel and the clustering pipeline.
//!
//! With the default `parallel` feature the pairwise/experiment benchmarks
//! run twice: once on the global rayon pool and once pinned to a single
//! thread, so the parallel speedup is visible in one report. Building with
//! `--no-default-features` benches the true sequential code path instead.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use covclust::cluster::online_cluster_from_matrix;
use covclust::generators::{build_offline_dataset, preset_params, Family};
use covclust::{offline_cluster, pairwise_matrix, path_dissimilarity, DissimConfig};

fn bench_single_pair(c: &mut Criterion) {
    let cfg = DissimConfig::default();
    let mut group = c.benchmark_group("path_dissimilarity");
    for n in [100usize, 250, 1000] {
        let (ds, _) =
            build_offline_dataset(Family::Ar1, &[-0.4, 0.6], 1, n, 7).expect("generation");
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| {
                black_box(path_dissimilarity(&ds.paths[0], &ds.paths[1], &cfg).unwrap())
            })
        });
    }
    group.finish();
}

fn bench_pairwise(c: &mut Criterion) {
    let cfg = DissimConfig::default();
    let params = preset_params(Family::Rotation);
    let (ds, gt) = build_offline_dataset(Family::Rotation, &params, 10, 200, 7).expect("generation");
    let kappa = gt.kappa as usize;

    let mut group = c.benchmark_group("pairwise_matrix_50x200");
    group.sample_size(10);

    #[cfg(feature = "parallel")]
    {
        group.bench_function("parallel", |b| {
            b.iter(|| black_box(pairwise_matrix(&ds, &cfg).unwrap()))
        });
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .expect("single-thread pool");
        group.bench_function("one-thread", |b| {
            b.iter(|| pool.install(|| black_box(pairwise_matrix(&ds, &cfg).unwrap())))
        });
    }
    #[cfg(not(feature = "parallel"))]
    group.bench_function("sequential", |b| {
        b.iter(|| black_box(pairwise_matrix(&ds, &cfg).unwrap()))
    });
    group.finish();

    let matrix = pairwise_matrix(&ds, &cfg).unwrap();
    let mut group = c.benchmark_group("clustering_50x200");
    group.bench_function("offline", |b| {
        b.iter(|| black_box(offline_cluster(&matrix, kappa).unwrap()))
    });
    group.bench_function("online_ensemble", |b| {
        b.iter(|| black_box(online_cluster_from_matrix(&matrix, kappa, cfg.weights).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, bench_single_pair, bench_pairwise);
criterion_main!(benches);
