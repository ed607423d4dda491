use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use ort_bench::{cat_state, dense_lp, valley_problem};
use ort_core::rank2::{f_crit, ort_rank2_coherent, SpecialBasisPair};
use ort_core::roof::{ort_numeric, solve_lp, RoofOptions, RoofProblem};

fn simplex(c: &mut Criterion) {
    let mut group = c.benchmark_group("simplex");
    for cols in [1_000, 20_000] {
        let lp = dense_lp(7, cols);
        group.bench_function(format!("dense_7x{cols}"), |b| b.iter(|| solve_lp(black_box(&lp)).unwrap()));
    }
    group.finish();
}

fn roof(c: &mut Criterion) {
    let mut group = c.benchmark_group("roof");
    group.sample_size(10);
    let rank2 = RoofProblem::from_rank2(&cat_state()).unwrap();
    group.bench_function("rank2_default", |b| {
        b.iter(|| ort_numeric(black_box(&rank2), &RoofOptions::default()).unwrap())
    });
    let valley = valley_problem();
    let coarse = RoofOptions { resolution: Some((11, 12)), ..RoofOptions::default() };
    group.bench_function("rank3_coarse", |b| b.iter(|| ort_numeric(black_box(&valley), &coarse).unwrap()));
    group.finish();
}

fn rank2(c: &mut Criterion) {
    let state = cat_state();
    c.bench_function("rank2_closed_form", |b| b.iter(|| ort_rank2_coherent(black_box(&state)).unwrap()));
    let pair = SpecialBasisPair::cat(0.5).unwrap();
    c.bench_function("rank2_f_crit", |b| b.iter(|| f_crit(black_box(&pair), 0.5)));
}

criterion_group!(benches, simplex, roof, rank2);
criterion_main!(benches);
