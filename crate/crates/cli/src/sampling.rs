//! Seeded random inputs shared by `check` and `symbol`.

use kflow_core::linear_analysis::Vector3;
use kflow_core::{MilnorMetric, StructureConstants};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SeededRng = ChaCha8Rng;

/// Independent stream `stream` derived from the user seed.
pub fn rng(seed: u64, stream: u64) -> SeededRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn structure_constants(r: &mut SeededRng) -> StructureConstants {
    StructureConstants::new(r.random_range(-1..=1), r.random_range(-1..=1), r.random_range(-1..=1))
        .expect("entries in {-1, 0, 1}")
}

pub fn coefficient(r: &mut SeededRng) -> f64 {
    r.random_range(0.1..10.0)
}

pub fn metric(r: &mut SeededRng) -> MilnorMetric {
    MilnorMetric::new(coefficient(r), coefficient(r), coefficient(r)).expect("positive draws")
}

/// Covector with `|ζ| ≥ 0.1`.
pub fn covector(r: &mut SeededRng) -> Vector3<f64> {
    loop {
        let z = Vector3::new(
            r.random_range(-1.0..1.0),
            r.random_range(-1.0..1.0),
            r.random_range(-1.0..1.0),
        );
        if z.norm() >= 0.1 {
            return z;
        }
    }
}

pub fn upper(r: &mut SeededRng) -> [f64; 6] {
    std::array::from_fn(|_| r.random_range(-1.0..1.0))
}

pub fn permutation(r: &mut SeededRng) -> [usize; 3] {
    const P: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    P[r.random_range(0..6)]
}
