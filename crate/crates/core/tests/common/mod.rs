#![allow(dead_code)]

use tasp::gen::{generate_instance, Family, TopologyKind};
use tasp::{Instance, Rational};

pub fn r(v: i64) -> Rational {
    Rational::from_integer(v)
}

/// Small families (at most 10 nodes) cycling through all three topologies.
pub fn small_families(count: u64) -> Vec<Family> {
    (0..count)
        .map(|i| {
            let topology = [TopologyKind::Layered, TopologyKind::Grid, TopologyKind::Random][(i % 3) as usize];
            let k = (i / 3) as usize;
            let (nodes, layers, density) = match topology {
                TopologyKind::Layered => (5 + k % 6, 2 + k % 3, 0.4 + 0.1 * (i % 4) as f64),
                TopologyKind::Grid => {
                    let (nodes, rows) = [(4, 2), (6, 2), (6, 3), (8, 2), (9, 3), (10, 2)][k % 6];
                    (nodes, rows, 0.5)
                }
                TopologyKind::Random => (4 + k % 7, 3, 0.2 + 0.05 * (i % 4) as f64),
            };
            Family { topology, nodes, layers, density, cost_max: 3 + i % 8, rng_seed: 1000 + i }
        })
        .collect()
}

/// Every (family, seed) pair over the full seed range.
pub fn small_corpus(families: u64) -> Vec<Instance> {
    let mut out = Vec::new();
    for fam in small_families(families) {
        for seed in 0..27 {
            out.push(generate_instance(&fam.with_seed(seed)).expect("generator parameters are valid"));
        }
    }
    out
}
