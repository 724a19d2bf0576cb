//! The bridge between complex data `(z, v)` in C^n x C^n and real data
//! `(x, u)` in R^2n x R^2n, the scalar invariants `(r, t, s)`, the complex
//! structure `J`, and the closed-form first and second derivatives of `s`
//! with respect to the real coordinates.
//!
//! Conventions (fixed once, verified by tests):
//!   - `<z, v> = sum_a z^a * conj(v^a)` (first slot linear);
//!   - `x^a = Re z^a`, `x^{a+n} = Im z^a`, same for `u` from `v`;
//!   - `J x^a = x^{a+n}`, `J x^{a+n} = -x^a`;
//!   - hence `<z, v> = <x|u> + i <u|Jx>`.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{CMat, Mat};

/// Below this squared norm a direction counts as zero. Effectively only an
/// exact zero: the metric is positively homogeneous, so no relative scale
/// is natural.
pub const ZERO_DIRECTION_THRESHOLD: f64 = 1e-300;

/// `<z, v> = sum_a z^a * conj(v^a)`.
pub fn hermitian_inner(z: &[Complex64], v: &[Complex64]) -> Complex64 {
    z.iter().zip(v).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm_sq(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

/// Real coordinates of a complex vector: `(Re z^1.. Re z^n, Im z^1.. Im z^n)`.
pub fn realify(z: &[Complex64]) -> Vec<f64> {
    let n = z.len();
    let mut x = vec![0.0; 2 * n];
    for (a, za) in z.iter().enumerate() {
        x[a] = za.re;
        x[a + n] = za.im;
    }
    x
}

/// Inverse of [`realify`].
pub fn complexify(x: &[f64]) -> Vec<Complex64> {
    assert!(
        x.len().is_multiple_of(2),
        "real vector must have even length"
    );
    let n = x.len() / 2;
    (0..n).map(|a| Complex64::new(x[a], x[a + n])).collect()
}

/// The complex structure on real coordinates: `(Jw)^a = w^{a+n}`,
/// `(Jw)^{a+n} = -w^a`.
pub fn apply_j(w: &[f64]) -> Vec<f64> {
    assert!(
        w.len().is_multiple_of(2),
        "real vector must have even length"
    );
    let n = w.len() / 2;
    let mut out = vec![0.0; 2 * n];
    for a in 0..n {
        out[a] = w[a + n];
        out[a + n] = -w[a];
    }
    out
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `(r, t, s)` for a point/direction pair; errors on `v = 0`.
pub fn scalar_invariants(z: &[Complex64], v: &[Complex64]) -> Result<(f64, f64, f64)> {
    let r = norm_sq(v);
    if r.is_nan() || r <= ZERO_DIRECTION_THRESHOLD {
        return Err(Error::ZeroDirection);
    }
    let t = norm_sq(z);
    let s = hermitian_inner(z, v).norm_sqr() / r;
    Ok((r, t, s))
}

/// A base point and nonzero direction with all derived data:
/// real images, scalar invariants, and the inner product `<z, v>`.
#[derive(Debug, Clone)]
pub struct PointDirection {
    pub n: usize,
    pub z: Vec<Complex64>,
    pub v: Vec<Complex64>,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub r: f64,
    pub t: f64,
    pub s: f64,
    /// `<z, v>`; its real part is `<x|u>` and its imaginary part `<u|Jx>`.
    pub herm: Complex64,
}

impl PointDirection {
    pub fn new(z: Vec<Complex64>, v: Vec<Complex64>) -> Result<Self> {
        if z.len() != v.len() || z.is_empty() {
            return Err(Error::InvalidInvariants(format!(
                "z and v must be nonempty vectors of equal length, got {} and {}",
                z.len(),
                v.len()
            )));
        }
        let (r, t, s) = scalar_invariants(&z, &v)?;
        let herm = hermitian_inner(&z, &v);
        let x = realify(&z);
        let u = realify(&v);
        Ok(PointDirection {
            n: z.len(),
            z,
            v,
            x,
            u,
            r,
            t,
            s,
            herm,
        })
    }

    pub fn from_reals(x: &[f64], u: &[f64]) -> Result<Self> {
        PointDirection::new(complexify(x), complexify(u))
    }

    /// Canonical witness realizing abstract invariants `(t, s)`:
    /// `z = (sqrt t, 0, ..)`, `v = (sqrt(s/t), sqrt(1 - s/t), 0, ..)`.
    /// U(n)-invariance makes every realization equivalent; needs `n >= 2`.
    pub fn from_invariants(n: usize, t: f64, s: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInvariants(format!(
                "witness construction needs n >= 2, got {n}"
            )));
        }
        if t.is_nan() || s.is_nan() || t < 0.0 || s < 0.0 || s > t * (1.0 + 1e-12) {
            return Err(Error::InvalidInvariants(format!(
                "(t, s) = ({t}, {s}) violates 0 <= s <= t"
            )));
        }
        let mut z = vec![Complex64::new(0.0, 0.0); n];
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        z[0] = Complex64::new(t.sqrt(), 0.0);
        if t == 0.0 {
            v[0] = Complex64::new(1.0, 0.0);
        } else {
            let frac = (s / t).min(1.0);
            v[0] = Complex64::new(frac.sqrt(), 0.0);
            v[1] = Complex64::new((1.0 - frac).sqrt(), 0.0);
        }
        PointDirection::new(z, v)
    }

    /// `<x|u>`, recovered from the complex inner product.
    #[inline]
    pub fn x_dot_u(&self) -> f64 {
        self.herm.re
    }

    /// `<u|Jx>`, recovered from the complex inner product.
    #[inline]
    pub fn u_dot_jx(&self) -> f64 {
        self.herm.im
    }

    /// `F(z, v) = sqrt(r * phi(t, s))` for a given `phi` value.
    pub fn f_value(&self, phi: f64) -> f64 {
        (self.r * phi).sqrt()
    }
}

/// First and second derivatives of the invariants with respect to the real
/// coordinates `(x, u)`; everything is a materialized closed form.
#[derive(Debug, Clone)]
pub struct SDerivatives {
    /// `ds/du^i`.
    pub s_u: Vec<f64>,
    /// `ds/dx^i`.
    pub s_x: Vec<f64>,
    /// `dt/dx^i = 2 x^i`.
    pub t_x: Vec<f64>,
    /// `d2s/du^i du^j`.
    pub s_uu: Mat,
    /// `d2s/du^i dx^j`.
    pub s_ux: Mat,
}

/// Assemble the whole closed-form derivative suite of `s` at `p`.
pub fn s_derivative_suite(p: &PointDirection) -> SDerivatives {
    let dim = 2 * p.n;
    let jx = apply_j(&p.x);
    let ju = apply_j(&p.u);
    let (r, s) = (p.r, p.s);
    let ux = p.x_dot_u();
    let ujx = p.u_dot_jx();

    let s_u: Vec<f64> = (0..dim)
        .map(|i| 2.0 / r * (ux * p.x[i] + ujx * jx[i] - s * p.u[i]))
        .collect();
    let s_x: Vec<f64> = (0..dim)
        .map(|i| 2.0 / r * (ux * p.u[i] - ujx * ju[i]))
        .collect();
    let t_x: Vec<f64> = p.x.iter().map(|&xi| 2.0 * xi).collect();

    let s_uu = Mat::from_fn(dim, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        2.0 / r * (p.x[i] * p.x[j] + jx[i] * jx[j] - s_u[i] * p.u[j] - s_u[j] * p.u[i] - s * delta)
    });

    // J as a matrix: d(Ju)^j / du^i = J[j][i]; nonzero entries are
    // J[a][a+n] = 1 and J[a+n][a] = -1.
    let n = p.n;
    let jmat = |row: usize, col: usize| -> f64 {
        if row < n && col == row + n {
            1.0
        } else if row >= n && col == row - n {
            -1.0
        } else {
            0.0
        }
    };
    let s_ux = Mat::from_fn(dim, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        -4.0 * p.u[i] / (r * r) * (ux * p.u[j] - ujx * ju[j])
            + 2.0 / r * (p.x[i] * p.u[j] + ux * delta - jx[i] * ju[j] - ujx * jmat(j, i))
    });

    SDerivatives {
        s_u,
        s_x,
        t_x,
        s_uu,
        s_ux,
    }
}

/// Wirtinger derivative `ds/dv^a = (<z,v> conj(z^a) - s conj(v^a)) / r`.
pub fn s_alpha(p: &PointDirection) -> Vec<Complex64> {
    (0..p.n)
        .map(|a| (p.herm * p.z[a].conj() - p.s * p.v[a].conj()) / p.r)
        .collect()
}

/// A unitary matrix from Gram-Schmidt on random entries (re-orthogonalized
/// once, which brings `A A* - I` down to a few ulps).
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    assert!(n >= 1);
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect()
        })
        .collect();
    for pass in 0..2 {
        for k in 0..n {
            for j in 0..k {
                let proj = hermitian_inner(&cols[k], &cols[j]);
                let prev = cols[j].clone();
                for (ck, pj) in cols[k].iter_mut().zip(&prev) {
                    *ck -= proj * pj;
                }
            }
            let norm = norm_sq(&cols[k]).sqrt();
            if norm < 1e-8 && pass == 0 {
                // Degenerate draw; replace with a basis vector and continue.
                cols[k] = (0..n)
                    .map(|i| Complex64::new(if i == k { 1.0 } else { 0.0 }, 0.0))
                    .collect();
                continue;
            }
            for ck in cols[k].iter_mut() {
                *ck /= norm;
            }
        }
    }
    CMat::from_fn(n, |i, j| cols[j][i])
}

/// Apply a matrix to both members of a pair.
pub fn apply_unitary(a: &CMat, p: &PointDirection) -> Result<PointDirection> {
    PointDirection::new(a.mul_vec(&p.z), a.mul_vec(&p.v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_pair(rng: &mut ChaCha8Rng, n: usize) -> PointDirection {
        loop {
            let z: Vec<Complex64> = (0..n)
                .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let v: Vec<Complex64> = (0..n)
                .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            if norm_sq(&v) > 1e-2 && norm_sq(&z) > 1e-2 {
                return PointDirection::new(z, v).unwrap();
            }
        }
    }

    #[test]
    fn invariants_on_fixed_pairs() {
        let (r, t, s) =
            scalar_invariants(&[c(1.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!((r, t, s), (1.0, 1.0, 0.0));
        let (r, t, s) =
            scalar_invariants(&[c(1.0, 0.0), c(0.0, 0.0)], &[c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!((r, t, s), (4.0, 1.0, 1.0));
        let (r, t, s) =
            scalar_invariants(&[c(1.0, 0.0), c(1.0, 0.0)], &[c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!((r, t, s), (4.0, 2.0, 1.0));
    }

    #[test]
    fn zero_direction_is_rejected() {
        assert!(matches!(
            scalar_invariants(&[c(1.0, 0.0)], &[c(0.0, 0.0)]),
            Err(Error::ZeroDirection)
        ));
    }

    #[test]
    fn realify_convention_and_roundtrip() {
        assert_eq!(realify(&[c(1.0, 2.0)]), vec![1.0, 2.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let z: Vec<Complex64> = (0..3)
                .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let back = complexify(&realify(&z));
            for (a, b) in z.iter().zip(&back) {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn j_squares_to_minus_identity_and_is_isotropic() {
        assert_eq!(apply_j(&[1.0, 0.0]), vec![0.0, -1.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let w: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
            let jj = apply_j(&apply_j(&w));
            for (a, b) in jj.iter().zip(&w) {
                assert_relative_eq!(*a, -b, epsilon = 0.0);
            }
            assert_relative_eq!(dot(&w, &apply_j(&w)), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn complex_inner_product_bridges_to_real_side() {
        // |<z,v>|^2 = <x|u>^2 + <u|Jx>^2, computed on independent paths.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let p = random_pair(&mut rng, 3);
            let lhs = p.herm.norm_sqr();
            let xu = dot(&p.x, &p.u);
            let ujx = dot(&p.u, &apply_j(&p.x));
            assert_relative_eq!(lhs, xu * xu + ujx * ujx, max_relative = 1e-13);
            assert_relative_eq!(p.x_dot_u(), xu, max_relative = 1e-13);
            assert_relative_eq!(p.u_dot_jx(), ujx, max_relative = 1e-13);
        }
    }

    #[test]
    fn cauchy_schwarz_bounds_s() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..200 {
            let p = random_pair(&mut rng, 4);
            assert!(p.s >= 0.0);
            assert!(p.s <= p.t * (1.0 + 1e-12));
        }
    }

    #[test]
    fn homogeneity_of_invariants_in_v() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let p = random_pair(&mut rng, 3);
            let zeta = c(rng.random_range(0.2..2.0), rng.random_range(-1.0..1.0));
            let v2: Vec<Complex64> = p.v.iter().map(|a| a * zeta).collect();
            let (r2, t2, s2) = scalar_invariants(&p.z, &v2).unwrap();
            assert_relative_eq!(r2, zeta.norm_sqr() * p.r, max_relative = 1e-12);
            assert_relative_eq!(t2, p.t, max_relative = 1e-15);
            assert_relative_eq!(s2, p.s, max_relative = 1e-11);
        }
    }

    #[test]
    fn s_alpha_matches_wirtinger_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let h = 1e-6;
        for _ in 0..30 {
            let p = random_pair(&mut rng, 2);
            let sa = s_alpha(&p);
            for alpha in 0..p.n {
                let s_of = |dv: Complex64| {
                    let mut v = p.v.clone();
                    v[alpha] += dv;
                    scalar_invariants(&p.z, &v).unwrap().2
                };
                let d_re = (s_of(c(h, 0.0)) - s_of(c(-h, 0.0))) / (2.0 * h);
                let d_im = (s_of(c(0.0, h)) - s_of(c(0.0, -h))) / (2.0 * h);
                // d/dv = (d/dRe - i d/dIm)/2
                let fd = 0.5 * c(d_re, -d_im);
                assert!(
                    (sa[alpha] - fd).norm() <= 1e-6 * sa[alpha].norm().max(1.0),
                    "alpha={alpha}: closed {} vs fd {}",
                    sa[alpha],
                    fd
                );
            }
            // Euler: s is 0-homogeneous in v, so sum s_alpha v^alpha = 0.
            let contraction: Complex64 = sa.iter().zip(&p.v).map(|(a, b)| a * b).sum();
            assert!(contraction.norm() < 1e-13 * (1.0 + p.s));
        }
    }

    #[test]
    fn s_alpha_vanishes_for_orthogonal_pair() {
        let p = PointDirection::new(
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        )
        .unwrap();
        for a in s_alpha(&p) {
            assert_eq!(a, c(0.0, 0.0));
        }
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        // n = 1 gives a unit-modulus scalar.
        let a = random_unitary(1, &mut rng);
        assert_relative_eq!(a.get(0, 0).norm(), 1.0, epsilon = 1e-13);
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_unitary(4, &mut rng);
            assert!(
                a.mul(&a.adjoint()).max_deviation_from_identity() < 1e-12,
                "seed {seed}"
            );
        }
    }

    #[test]
    fn invariants_survive_unitary_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..20 {
            let p = random_pair(&mut rng, 3);
            let a = random_unitary(3, &mut rng);
            let q = apply_unitary(&a, &p).unwrap();
            assert_relative_eq!(q.r, p.r, max_relative = 1e-12);
            assert_relative_eq!(q.t, p.t, max_relative = 1e-12);
            assert!((q.s - p.s).abs() <= 1e-12 * (1.0 + p.t));
        }
    }

    #[test]
    fn witness_realizes_requested_invariants() {
        for &(t, s) in &[(0.5, 0.25), (1.0, 1.0), (0.0, 0.0), (2.0, 0.0)] {
            let p = PointDirection::from_invariants(3, t, s).unwrap();
            assert_relative_eq!(p.t, t, max_relative = 1e-14, epsilon = 1e-14);
            assert_relative_eq!(p.s, s, max_relative = 1e-14, epsilon = 1e-14);
            assert_relative_eq!(p.r, 1.0, max_relative = 1e-14);
        }
        assert!(PointDirection::from_invariants(3, 1.0, 1.5).is_err());
        assert!(PointDirection::from_invariants(1, 1.0, 0.5).is_err());
    }
}
