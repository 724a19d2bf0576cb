//! Helpers shared by the integration suites.
#![allow(dead_code)] // each test target uses a different subset

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use unifinsler::metric::MetricDefn;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Largest gap between two sorted spectra viewed as multisets.
pub fn multiset_distance(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "spectra of different sizes");
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Catalog metrics with `phi_ss = 0` (the Hermitian-quadratic class).
pub const HERMITIAN_CLASS: [&str; 3] = ["euclidean", "hermitian", "bergman"];

/// Catalog metrics with `phi_ss != 0` somewhere.
pub const NON_HERMITIAN: [&str; 7] = [
    "convex-ball",
    "pseudoconvex-ball",
    "negative-curvature",
    "positive-curvature",
    "flat-exp",
    "flat-quadratic",
    "wrona",
];

/// Catalog metrics with a finite, guard-admissible `phi(1, 0)` (the ones
/// the unit-sphere experiment applies to).
pub const SPHERE_METRICS: [&str; 7] = [
    "euclidean",
    "hermitian",
    "pseudoconvex-ball",
    "positive-curvature",
    "flat-exp",
    "flat-quadratic",
    "wrona",
];

pub fn by_name(name: &str) -> MetricDefn {
    unifinsler::lookup(name).unwrap_or_else(|| panic!("catalog metric '{name}'"))
}
