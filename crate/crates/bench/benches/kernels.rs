use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use kornlab_core::kernels::{
    boundary_rank, eval_kernel, project_kernel, KernelElement, KernelSpace, PointCloud,
};
use kornlab_core::korn::lambda_min;
use kornlab_core::sampling;
use kornlab_core::symbol::{build_multiplier, sharp_ratio};
use kornlab_core::{Mat3, Vec3};

fn symbols(c: &mut Criterion) {
    let xi = Vec3::new(0.3, -1.2, 0.7);
    c.bench_function("build_multiplier", |b| {
        b.iter(|| build_multiplier(black_box(&xi)))
    });
    c.bench_function("sharp_ratio", |b| b.iter(|| sharp_ratio(black_box(&xi))));
    c.bench_function("lambda_min", |b| {
        b.iter(|| lambda_min(black_box([1, -2, 3])))
    });
}

fn kernels(c: &mut Criterion) {
    let mut rng = sampling::rng(3);
    let theta: Vec<f64> = (0..10).map(|i| 0.1 * i as f64 - 0.4).collect();
    let e = KernelElement::from_params(KernelSpace::Sdsc, &theta);
    let pts = sampling::general_position_points(&mut rng, 12, 1e-3);
    let samples: Vec<(Vec3, Mat3)> = pts.iter().map(|x| (*x, eval_kernel(&e, x))).collect();
    c.bench_function("project_kernel_12", |b| {
        b.iter(|| project_kernel(black_box(&samples), KernelSpace::Sdsc))
    });
    let cloud = PointCloud::new(pts).unwrap();
    c.bench_function("boundary_rank_12", |b| {
        b.iter(|| boundary_rank(black_box(&cloud)))
    });
}

criterion_group!(benches, symbols, kernels);
criterion_main!(benches);
