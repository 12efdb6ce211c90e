use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use surftrap_bench::{drude_mirror, ladder_config, perfect_mirror, rb87_units};
use surftrap_core::casimir::default_grid;
use surftrap_core::regularization::regularize_table;
use surftrap_core::{axial_weight, first_band, DensityProfile, ProfileKind};

fn ladder(c: &mut Criterion) {
    let mut g = c.benchmark_group("first_band");
    g.sample_size(10);
    for n in [50_000usize, 200_000] {
        let cfg = ladder_config(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &cfg, |b, cfg| {
            b.iter(|| first_band(black_box(cfg), 14).unwrap())
        });
    }
    g.finish();
}

fn casimir_polder(c: &mut Criterion) {
    let mut g = c.benchmark_group("casimir_polder");
    let (pc, drude) = (perfect_mirror(), drude_mirror());
    g.bench_function("perfect_conductor_z1", |b| b.iter(|| pc.value(black_box(1.0)).unwrap()));
    g.bench_function("drude_z1", |b| b.iter(|| drude.value(black_box(1.0)).unwrap()));
    g.sample_size(10);
    g.bench_function("table_perfect_conductor", |b| {
        b.iter(|| pc.table(default_grid(30.0)).unwrap())
    });
    let table = pc.table(default_grid(30.0)).unwrap();
    let w = axial_weight(&DensityProfile::new(ProfileKind::Uniform, 200e-12), &rb87_units()).unwrap();
    g.bench_function("regularize_table_uniform", |b| {
        b.iter(|| regularize_table(black_box(&table), &w).unwrap())
    });
    g.finish();
}

criterion_group!(benches, ladder, casimir_polder);
criterion_main!(benches);
