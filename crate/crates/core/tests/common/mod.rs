#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use typometrics::SeriesPair;

pub const SEED: u64 = 0x7970_6f6d;

/// Seeded random pairs with elements in [0.5, 10] and lengths in [2, 64].
pub fn corpus(count: usize) -> Vec<SeriesPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    (0..count)
        .map(|_| {
            let n = rng.random_range(2..=64);
            let a: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..=10.0)).collect();
            let p: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..=10.0)).collect();
            SeriesPair::new(a, p).expect("finite, equal length")
        })
        .collect()
}

/// Seeded scale factors for equivariance checks.
pub fn scales(count: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 1);
    (0..count).map(|_| rng.random_range(0.01..=100.0)).collect()
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1.0)
}
