use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use rulelab_bench::{bench_grid, bench_rule};
use rulelab_core::engine::{step, PackedGrid, Stepper};
use rulelab_core::Boundary;
use std::hint::black_box;

fn engine(c: &mut Criterion) {
    let mut group = c.benchmark_group("step");
    for radius in [1u32, 2, 4] {
        let rule = bench_rule(radius);
        let grid = bench_grid(128, 128);
        group.throughput(Throughput::Elements((grid.len()) as u64));

        group.bench_with_input(BenchmarkId::new("naive", radius), &grid, |b, g| {
            b.iter(|| step(&rule, black_box(g), Boundary::Dead))
        });

        let stepper = Stepper::new(&rule, Boundary::Dead);
        let packed = PackedGrid::from_grid(&grid);
        group.bench_with_input(BenchmarkId::new("packed", radius), &packed, |b, g| {
            b.iter(|| stepper.step(black_box(g)))
        });
    }
    group.finish();

    let mut group = c.benchmark_group("packed_large");
    let rule = bench_rule(1);
    let stepper = Stepper::new(&rule, Boundary::Toroidal);
    let packed = PackedGrid::from_grid(&bench_grid(1024, 1024));
    group.throughput(Throughput::Elements(1024 * 1024));
    group.bench_function("life_1024", |b| b.iter(|| stepper.step(black_box(&packed))));
    group.finish();
}

criterion_group!(benches, engine);
criterion_main!(benches);
