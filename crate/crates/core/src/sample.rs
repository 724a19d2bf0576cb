//! Seeded random point/direction generation respecting each metric's
//! domain guard, with optional rejection to regions of strong convexity or
//! pseudoconvexity. Shared by the CLI's `--random` mode and the test
//! suites; all draws are deterministic given the RNG.

use num_complex::Complex64;
use rand::Rng;

use crate::geometry::PointDirection;
use crate::metric::{DomainGuard, MetricDefn};
use crate::tensors::{convex_verdict, pseudoconvex_verdict, ScalarData};

/// Upper bound on sampled `t` for a metric: comfortably inside the guard,
/// or a desk-scale default when unrestricted.
pub fn sample_t_max(metric: &MetricDefn) -> f64 {
    match metric.guard {
        DomainGuard::TBelow(bound) => 0.9 * bound,
        DomainGuard::TMinusSAbove(_) => 2.0,
        DomainGuard::Unrestricted => {
            // The positive-curvature body loses convexity past the unit
            // ball; stay inside it for sampling purposes.
            if metric.name.starts_with("positive-curvature") {
                0.9
            } else {
                1.5
            }
        }
    }
}

pub fn random_complex_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        if v.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-2 {
            return v;
        }
    }
}

/// A random guard-valid pair with `t` uniform in `(t_lo, t_max]`.
pub fn random_point<R: Rng + ?Sized>(metric: &MetricDefn, n: usize, rng: &mut R) -> PointDirection {
    let t_max = sample_t_max(metric);
    for _ in 0..10_000 {
        let mut z = random_complex_vector(n, rng);
        let v = random_complex_vector(n, rng);
        let t_target = rng.random_range(0.02..t_max);
        let norm: f64 = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let scale = (t_target.sqrt()) / norm;
        for za in z.iter_mut() {
            *za *= scale;
        }
        if let Ok(p) = PointDirection::new(z, v) {
            if metric.guard.admits(p.t, p.s) && metric.eval(p.t, p.s).is_ok() {
                return p;
            }
        }
    }
    panic!("metric '{}' admits no sampled points", metric.name);
}

/// A random point where the metric is strongly convex (rejection-sampled).
pub fn random_convex_point<R: Rng + ?Sized>(
    metric: &MetricDefn,
    n: usize,
    rng: &mut R,
) -> PointDirection {
    for _ in 0..10_000 {
        let p = random_point(metric, n, rng);
        if let Ok(sd) = ScalarData::new(metric, p.t, p.s) {
            if convex_verdict(&sd).is_positive() && sd.k_tilde > 1e-3 && sd.c0 > 1e-3 {
                return p;
            }
        }
    }
    panic!("metric '{}' has no sampled convex points", metric.name);
}

/// A random point where the metric is strongly pseudoconvex for this `n`.
pub fn random_pseudoconvex_point<R: Rng + ?Sized>(
    metric: &MetricDefn,
    n: usize,
    rng: &mut R,
) -> PointDirection {
    for _ in 0..10_000 {
        let p = random_point(metric, n, rng);
        if let Ok(sd) = ScalarData::new(metric, p.t, p.s) {
            if pseudoconvex_verdict(&sd, n).is_positive() && sd.k1.abs() > 1e-3 {
                return p;
            }
        }
    }
    panic!(
        "metric '{}' has no sampled pseudoconvex points",
        metric.name
    );
}
