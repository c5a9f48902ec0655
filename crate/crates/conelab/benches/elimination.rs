//! Parallel vs sequential elimination on the matrices the analysis
//! actually produces: a single fat condition matrix, and a whole cone
//! table.

use conelab::analysis::{cone_table, cone_table_seq, GenericityProtocol};
use conelab::catalog;
use conelab::geometry::ProjPoint;
use conelab::ideals::condition_matrix;
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn fat_condition_rank(c: &mut Criterion) {
    let f4 = catalog::named("F4").expect("built-in").config;
    let q = ProjPoint::from_i64(&[31, -47, 53, 71]);
    let m = condition_matrix(&f4, 5, Some((&q, 5)));
    let mut group = c.benchmark_group("fat_condition_rank_24pts_d5");
    group.sample_size(10);
    group.bench_function("parallel", |b| b.iter(|| black_box(&m).rank()));
    group.bench_function("sequential", |b| b.iter(|| black_box(&m).rank_seq()));
    group.finish();
}

fn cone_table_both(c: &mut Criterion) {
    let f4 = catalog::named("F4").expect("built-in").config;
    let protocol = GenericityProtocol::default();
    let mut group = c.benchmark_group("cone_table_24pts_d3_5");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| cone_table(black_box(&f4), 3, 5, &protocol).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| cone_table_seq(black_box(&f4), 3, 5, &protocol).unwrap())
    });
    group.finish();
}

criterion_group!(benches, fat_condition_rank, cone_table_both);
criterion_main!(benches);
