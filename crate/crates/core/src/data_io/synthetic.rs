//! Small generated datasets for offline tests and demos.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dataset::Dataset;

/// Two classes in 2-D: unit disks centred at `(-1.5, 0)` and `(1.5, 0)`.
///
/// The disks are separated by a gap of 1. Labels alternate 0, 1, 0, …
pub fn separable_blobs(n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = i % 2;
        let centre = if label == 0 { -1.5 } else { 1.5 };
        let r = rng.random::<f64>().sqrt();
        let theta = rng.random_range(0.0..2.0 * PI);
        rows.push(vec![centre + r * theta.cos(), r * theta.sin()]);
        labels.push(label);
    }
    Dataset::from_rows(&rows, labels).expect("generated rows are rectangular")
}

/// `k` overlapping isotropic Gaussians (σ = 1) with means on a circle of radius 2.5.
pub fn gaussian_classes(n: usize, k: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 1.0).expect("valid std");
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = i % k;
        let angle = 2.0 * PI * label as f64 / k as f64;
        rows.push(vec![
            2.5 * angle.cos() + noise.sample(&mut rng),
            2.5 * angle.sin() + noise.sample(&mut rng),
        ]);
        labels.push(label);
    }
    Dataset::from_rows(&rows, labels).expect("generated rows are rectangular")
}

/// Two noisy concentric rings (radius 1 and 2); the class is the ring index
/// XOR the sign of `x·y`.
pub fn xor_rings(n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.15).expect("valid std");
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let ring = i % 2;
        let radius = 1.0 + ring as f64 + noise.sample(&mut rng);
        let theta = rng.random_range(0.0..2.0 * PI);
        let (x, y) = (radius * theta.cos(), radius * theta.sin());
        labels.push(ring ^ usize::from(x * y > 0.0));
        rows.push(vec![x, y]);
    }
    Dataset::from_rows(&rows, labels).expect("generated rows are rectangular")
}

/// Generator by name, as used in the dataset catalog.
pub fn generate(name: &str, n: usize, seed: u64) -> Option<Dataset> {
    match name {
        "blobs" => Some(separable_blobs(n, seed)),
        "gaussians3" => Some(gaussian_classes(n, 3, seed)),
        "xor-rings" => Some(xor_rings(n, seed)),
        _ => None,
    }
}

pub const GENERATORS: &[&str] = &["blobs", "gaussians3", "xor-rings"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blobs_have_unit_gap() {
        let ds = separable_blobs(200, 3);
        for i in 0..ds.n() {
            let x = ds.features()[(i, 0)];
            if ds.labels()[i] == 0 {
                assert!(x <= -0.5);
            } else {
                assert!(x >= 0.5);
            }
        }
    }

    #[test]
    fn generators_are_deterministic() {
        for name in GENERATORS {
            assert_eq!(generate(name, 30, 4), generate(name, 30, 4));
        }
        assert!(generate("nope", 3, 1).is_none());
    }

    #[test]
    fn three_gaussians_use_every_class() {
        assert_eq!(gaussian_classes(9, 3, 1).present_classes(), vec![0, 1, 2]);
    }
}
