//! Sequential vs data-parallel batch augmentation, plus per-stage costs.
//!
//! `cargo bench -p keeporig` compares worker counts on the rayon pool;
//! `cargo bench -p keeporig --no-default-features` runs the same groups on
//! the sequential fallback.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use keeporig::parallel::{map_indexed, PARALLEL};
use keeporig::pipeline::bench_images;
use keeporig::saliency::{compute_saliency, find_salient_region};
use keeporig::{augment, Method, PipelineConfig, RngStream, SaliencyProvider};

const BATCH: usize = 512;

fn worker_counts() -> Vec<usize> {
    let n = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let mut counts = vec![1, n.max(2)];
    counts.dedup();
    counts
}

fn batch(c: &mut Criterion) {
    let images = bench_images(BATCH, 32, 0);
    let mut group = c.benchmark_group(if PARALLEL {
        "batch/rayon"
    } else {
        "batch/sequential-build"
    });
    group.throughput(Throughput::Elements(BATCH as u64));
    group.sample_size(20);
    for method in [Method::KeepOriginal, Method::KeepAugment, Method::Cutout] {
        let cfg = PipelineConfig {
            method,
            keep_prob: 0.0,
            ..PipelineConfig::default()
        };
        for workers in worker_counts() {
            group.bench_with_input(BenchmarkId::new(method.as_str(), workers), &workers, |b, &workers| {
                b.iter(|| {
                    map_indexed(images.len(), workers, |i| {
                        let mut rng = RngStream::new(cfg.seed, i as u64);
                        augment(&images[i], &cfg, &mut rng, None).map(|(img, _)| img.into_raw().len())
                    })
                })
            });
        }
    }
    group.finish();
}

fn stages(c: &mut Criterion) {
    let img = bench_images(1, 64, 1).remove(0);
    let mut group = c.benchmark_group("stages/64x64");
    for provider in [SaliencyProvider::FineGrained, SaliencyProvider::GradientMagnitude] {
        group.bench_function(BenchmarkId::new("saliency", provider.as_str()), |b| {
            b.iter(|| compute_saliency(black_box(&img), provider).unwrap())
        });
    }
    let map = compute_saliency(&img, SaliencyProvider::FineGrained).unwrap();
    group.bench_function("window_search", |b| {
        b.iter(|| find_salient_region(black_box(&map), 0.5, 0.6, 0.1).unwrap())
    });
    let cfg = PipelineConfig {
        keep_prob: 0.0,
        ..PipelineConfig::default()
    };
    group.bench_function("augment_keep_original", |b| {
        b.iter(|| augment(black_box(&img), &cfg, &mut RngStream::new(0, 0), None).unwrap())
    });
    group.finish();
}

criterion_group!(benches, batch, stages);
criterion_main!(benches);
