//! Shared fixtures for the benchmark targets.

use concord_core::generate::{random_grid, rng_from_seed};
use concord_core::{Copula, IndexSet, MassGrid};

pub fn fixture_grid(n: usize, m: usize, seed: u64) -> MassGrid {
    random_grid(&mut rng_from_seed(seed), n, m)
}

pub fn fixture_copula(n: usize, m: usize, seed: u64) -> Copula {
    Copula::Grid(fixture_grid(n, m, seed))
}

/// Disjoint set pair used by the reflection-reduction benchmark.
pub fn fixture_sets(n: usize) -> (IndexSet, IndexSet) {
    let s = IndexSet::new(n, [0, 2]).expect("in range");
    let t = IndexSet::new(n, [1]).expect("in range");
    (s, t)
}
