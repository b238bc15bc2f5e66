use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use concord_bench::{fixture_copula, fixture_grid, fixture_sets};
use concord_core::concordance::integral_c_d_c;
use concord_core::identities::check_reflection_reduction;
use concord_core::symmetry::{apply, Symmetry};
use concord_core::{Copula, IndexSet, Measure};

fn grid_integrals(c: &mut Criterion) {
    let copula = fixture_copula(3, 4, 1);
    c.bench_function("self integral on 3d grid m=4", |b| {
        b.iter(|| integral_c_d_c(black_box(&copula)).unwrap())
    });
}

fn kappa_by_measure(c: &mut Criterion) {
    let copula = fixture_copula(4, 2, 2);
    let mut group = c.benchmark_group("kappa 4d grid m=2");
    for measure in Measure::ALL {
        group.bench_function(measure.name(), |b| {
            b.iter(|| measure.kappa(black_box(&copula)).unwrap())
        });
    }
    group.finish();
}

fn refreduce_instance(c: &mut Criterion) {
    let copula = fixture_copula(4, 2, 3);
    let (s, t) = fixture_sets(4);
    c.bench_function("reflection reduction check 4d", |b| {
        b.iter(|| {
            check_reflection_reduction(Measure::NelsenTau, black_box(&copula), &s, &t, false)
                .unwrap()
        })
    });
}

fn symmetry_sweep(c: &mut Criterion) {
    let grid = Copula::Grid(fixture_grid(3, 2, 4));
    let perms: Vec<Vec<usize>> = vec![
        vec![0, 1, 2],
        vec![0, 2, 1],
        vec![1, 0, 2],
        vec![1, 2, 0],
        vec![2, 0, 1],
        vec![2, 1, 0],
    ];
    c.bench_function("materialize all 48 symmetries of a 3d grid", |b| {
        b.iter(|| {
            for mask in 0u64..8 {
                let flips = IndexSet::new(3, (0..3).filter(|i| mask >> i & 1 == 1)).unwrap();
                for images in &perms {
                    let xi = Symmetry::canonical(flips.clone(), images.clone()).unwrap();
                    black_box(apply(&xi, &grid).unwrap());
                }
            }
        })
    });
}

criterion_group!(
    benches,
    grid_integrals,
    kappa_by_measure,
    refreduce_instance,
    symmetry_sweep
);
criterion_main!(benches);
