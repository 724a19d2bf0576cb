//! Cross-checks of every closed-form derivative against finite differences
//! and of the invariance/homogeneity properties that the geometry forces.

mod common;

use common::{by_name, rng};
use num_complex::Complex64;
use rand::Rng;
use unifinsler::curvature::{curvature_oracle, holomorphic_curvature};
use unifinsler::dynamics::integrate_geodesic;
use unifinsler::expr::{BinaryOp, Expr};
use unifinsler::geometry::{
    apply_j, apply_unitary, complexify, dot, random_unitary, realify, s_derivative_suite,
    PointDirection,
};
use unifinsler::metric::{catalog, DomainGuard, MetricDefn};
use unifinsler::sample::{random_point, random_pseudoconvex_point};
use unifinsler::tensors::{
    convex_verdict, pseudoconvex_verdict, real_fundamental_tensor, ScalarData,
};

fn random_pair(rng: &mut impl Rng, n: usize) -> PointDirection {
    loop {
        let z: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        if let Ok(p) = PointDirection::new(z, v) {
            if p.r > 0.05 && p.t > 0.05 {
                return p;
            }
        }
    }
}

/// The ten contraction identities of the s-derivative suite, at one point.
fn check_contractions(p: &PointDirection, tol: f64) {
    let d = s_derivative_suite(p);
    let jx = apply_j(&p.x);
    let ju = apply_j(&p.u);
    let xu = dot(&p.x, &p.u);
    let ujx = dot(&p.u, &jx);
    let dim = 2 * p.n;

    // s_i u^i = 0
    assert!(dot(&d.s_u, &p.u).abs() < tol);
    // s_i x^i = (2/r)(t - s)<u|x>
    assert!((dot(&d.s_u, &p.x) - 2.0 / p.r * (p.t - p.s) * xu).abs() < tol);
    // s_i Jx^i = (2/r)(t - s)<u|Jx>
    assert!((dot(&d.s_u, &jx) - 2.0 / p.r * (p.t - p.s) * ujx).abs() < tol);
    // s_{;i} x^i = 2s
    assert!((dot(&d.s_x, &p.x) - 2.0 * p.s).abs() < tol);
    // s_{;i} Jx^i = 0
    assert!(dot(&d.s_x, &jx).abs() < tol);
    // s_{;i} u^i = 2<x|u>
    assert!((dot(&d.s_x, &p.u) - 2.0 * xu).abs() < tol);
    // t_{;i} x^i = 2t
    assert!((dot(&d.t_x, &p.x) - 2.0 * p.t).abs() < tol);
    // sum s_i s_{;i} = 0
    assert!(dot(&d.s_u, &d.s_x).abs() < tol);
    // sum (s_i)^2 = 4 s (t-s) / r
    let sq: f64 = d.s_u.iter().map(|x| x * x).sum();
    assert!((sq - 4.0 * p.s * (p.t - p.s) / p.r).abs() < tol);
    // s_{i;j} u^j = 2 x^i - s_{;i}
    for i in 0..dim {
        let lhs: f64 = (0..dim).map(|j| d.s_ux.get(i, j) * p.u[j]).sum();
        assert!((lhs - (2.0 * p.x[i] - d.s_x[i])).abs() < tol);
    }
    // second fiber derivative contracts back to first: s_{ij} u^j = -s_i
    // (0-homogeneity of s in u, differentiated once).
    for i in 0..dim {
        let lhs: f64 = (0..dim).map(|j| d.s_uu.get(i, j) * p.u[j]).sum();
        assert!((lhs + d.s_u[i]).abs() < tol, "s_ij u^j at {i}");
    }
    // Ju is the metric-free rotation: <u|Ju> = 0.
    assert!(dot(&p.u, &ju).abs() < tol);
}

#[test]
fn contraction_suite_on_random_points() {
    let mut rng = rng(0xC0FFEE);
    for _ in 0..200 {
        for n in [2usize, 3, 4] {
            let p = random_pair(&mut rng, n);
            check_contractions(&p, 1e-10);
        }
    }
}

#[test]
fn s_derivatives_match_finite_differences() {
    let mut rng = rng(0xFEED);
    let h = 1e-6;
    for _ in 0..20 {
        let p = random_pair(&mut rng, 3);
        let d = s_derivative_suite(&p);
        let dim = 2 * p.n;
        let s_of = |x: &[f64], u: &[f64]| PointDirection::from_reals(x, u).unwrap().s;
        for i in 0..dim {
            let mut up = p.u.clone();
            up[i] += h;
            let mut um = p.u.clone();
            um[i] -= h;
            let fd = (s_of(&p.x, &up) - s_of(&p.x, &um)) / (2.0 * h);
            assert!((fd - d.s_u[i]).abs() < 1e-7, "s_u[{i}]");

            let mut xp = p.x.clone();
            xp[i] += h;
            let mut xm = p.x.clone();
            xm[i] -= h;
            let fd = (s_of(&xp, &p.u) - s_of(&xm, &p.u)) / (2.0 * h);
            assert!((fd - d.s_x[i]).abs() < 1e-7, "s_x[{i}]");
        }
        // Mixed second derivatives: d/dx_j of s_u (closed form) vs s_ux.
        for j in 0..dim {
            let mut xp = p.x.clone();
            xp[j] += h;
            let mut xm = p.x.clone();
            xm[j] -= h;
            let dp = s_derivative_suite(&PointDirection::from_reals(&xp, &p.u).unwrap());
            let dm = s_derivative_suite(&PointDirection::from_reals(&xm, &p.u).unwrap());
            for i in 0..dim {
                let fd = (dp.s_u[i] - dm.s_u[i]) / (2.0 * h);
                assert!((fd - d.s_ux.get(i, j)).abs() < 1e-6, "s_ux[{i},{j}]");
            }
        }
        // Second fiber derivatives: d/du_j of s_u vs s_uu.
        for j in 0..dim {
            let mut up = p.u.clone();
            up[j] += h;
            let mut um = p.u.clone();
            um[j] -= h;
            let dp = s_derivative_suite(&PointDirection::from_reals(&p.x, &up).unwrap());
            let dm = s_derivative_suite(&PointDirection::from_reals(&p.x, &um).unwrap());
            for i in 0..dim {
                let fd = (dp.s_u[i] - dm.s_u[i]) / (2.0 * h);
                assert!((fd - d.s_uu.get(i, j)).abs() < 1e-6, "s_uu[{i},{j}]");
            }
        }
    }
}

/// Every jet partial agrees with finite differences: first-order partials
/// against value differences, second-order against differences of the
/// first-order jet fields (step 1e-5 throughout).
#[test]
fn jet_partials_match_finite_differences_for_catalog() {
    let mut rng = rng(0xBEEF);
    let h = 1e-5;
    for m in catalog() {
        let t_hi = match m.guard {
            DomainGuard::TBelow(b) => 0.9 * b,
            _ => 1.8,
        };
        for _ in 0..50 {
            let t = rng.random_range(0.1..t_hi);
            let s = match m.guard {
                DomainGuard::TMinusSAbove(_) => rng.random_range(0.0..0.4) * t,
                _ => rng.random_range(0.05..0.95) * t,
            };
            let jet = m.eval(t, s).unwrap();
            let at = |t: f64, s: f64| m.eval_off_simplex(t, s).unwrap();
            let close = |a: f64, b: f64, what: &str| {
                assert!(
                    (a - b).abs() <= 1e-6 * a.abs().max(b.abs()).max(1.0),
                    "{} {what} at ({t}, {s}): jet {a} vs fd {b}",
                    m.name
                );
            };
            close(
                jet.dt,
                (at(t + h, s).value - at(t - h, s).value) / (2.0 * h),
                "dt",
            );
            close(
                jet.ds,
                (at(t, s + h).value - at(t, s - h).value) / (2.0 * h),
                "ds",
            );
            close(
                jet.dtt,
                (at(t + h, s).dt - at(t - h, s).dt) / (2.0 * h),
                "dtt",
            );
            close(
                jet.dts,
                (at(t, s + h).dt - at(t, s - h).dt) / (2.0 * h),
                "dts",
            );
            close(
                jet.dts,
                (at(t + h, s).ds - at(t - h, s).ds) / (2.0 * h),
                "dst",
            );
            close(
                jet.dss,
                (at(t, s + h).ds - at(t, s - h).ds) / (2.0 * h),
                "dss",
            );
        }
    }
}

#[test]
fn real_tensor_matches_fiber_hessian() {
    // g_ij = (1/2) d^2(r phi)/du_i du_j, by central second differences.
    let mut rng = rng(0xD1CE);
    let h = 1e-4;
    for name in ["hermitian", "convex-ball", "negative-curvature", "wrona"] {
        let m = by_name(name);
        for _ in 0..10 {
            let p = random_point(&m, 2, &mut rng);
            let g = real_fundamental_tensor(&m, &p).unwrap();
            let dim = 2 * p.n;
            let g_of = |u: &[f64]| -> f64 {
                let q = PointDirection::from_reals(&p.x, u).unwrap();
                q.r * m.eval(q.t, q.s).unwrap().value
            };
            for i in 0..dim {
                for j in 0..dim {
                    let mut upp = p.u.clone();
                    let mut upm = p.u.clone();
                    let mut ump = p.u.clone();
                    let mut umm = p.u.clone();
                    upp[i] += h;
                    upp[j] += h;
                    upm[i] += h;
                    upm[j] -= h;
                    ump[i] -= h;
                    ump[j] += h;
                    umm[i] -= h;
                    umm[j] -= h;
                    let hess = (g_of(&upp) - g_of(&upm) - g_of(&ump) + g_of(&umm)) / (4.0 * h * h);
                    assert!(
                        (g.get(i, j) - 0.5 * hess).abs() < 1e-5 * g.get(i, j).abs().max(1.0),
                        "{name} ({i},{j}): {} vs {}",
                        g.get(i, j),
                        0.5 * hess
                    );
                }
            }
        }
    }
}

#[test]
fn metric_is_homogeneous_and_unitary_invariant() {
    let mut rng = rng(0xF00D);
    for name in ["convex-ball", "flat-exp", "wrona"] {
        let m = by_name(name);
        for _ in 0..25 {
            let p = random_point(&m, 3, &mut rng);
            let phi = m.phi(p.t, p.s).unwrap();
            let f = p.f_value(phi);
            // F(z, zeta v) = |zeta| F(z, v)
            let zeta = Complex64::new(rng.random_range(0.3..1.5), rng.random_range(-1.0..1.0));
            let q =
                PointDirection::new(p.z.clone(), p.v.iter().map(|v| v * zeta).collect()).unwrap();
            let fq = q.f_value(m.phi(q.t, q.s).unwrap());
            assert!((fq - zeta.norm() * f).abs() < 1e-10 * f.max(1.0), "{name}");
            // F(Az, Av) = F(z, v)
            let a = random_unitary(3, &mut rng);
            let pa = apply_unitary(&a, &p).unwrap();
            let fa = pa.f_value(m.phi(pa.t, pa.s).unwrap());
            assert!((fa - f).abs() < 1e-10 * f.max(1.0), "{name}");
        }
    }
}

#[test]
fn pseudoconvexity_equals_convexity_when_phi_ss_nonnegative() {
    // For n >= 3 and phi_ss >= 0, pseudoconvexity and strong convexity
    // coincide wherever the metric is pseudoconvex along the whole fiber
    // 0 <= s <= t. pseudoconvex-ball (phi_ss = -2) is excluded outright;
    // the flat family loses fiber-wide pseudoconvexity past t = 1, so
    // sampling stays below it.
    let mut rng = rng(0xABBA);
    for m in catalog() {
        if m.name == "pseudoconvex-ball" {
            continue;
        }
        let mut accepted = 0;
        while accepted < 60 {
            let p = random_point(&m, 3, &mut rng);
            if p.t > 0.95 {
                continue;
            }
            accepted += 1;
            let sd = ScalarData::new(&m, p.t, p.s).unwrap();
            assert!(sd.phi.dss >= -1e-15, "{}: phi_ss < 0 in region", m.name);
            let pseudo = pseudoconvex_verdict(&sd, 3);
            let convex = convex_verdict(&sd);
            if pseudo.is_positive() || convex.is_positive() {
                assert_eq!(pseudo, convex, "{} at ({}, {})", m.name, p.t, p.s);
            }
        }
    }
}

#[test]
fn proof_identity_relating_trace_and_k_tilde() {
    // phi [2 c0 + t phi_s + 2 s (t-s) phi_ss] = phi^2 + s(t-s) phi_s^2 + k~.
    let mut rng = rng(0xAB);
    for m in catalog() {
        for _ in 0..50 {
            let p = random_point(&m, 2, &mut rng);
            let sd = ScalarData::new(&m, p.t, p.s).unwrap();
            let phi = sd.phi;
            let lhs = phi.value * (2.0 * sd.c0 + p.t * phi.ds + 2.0 * p.s * (p.t - p.s) * phi.dss);
            let rhs = phi.value * phi.value + p.s * (p.t - p.s) * phi.ds * phi.ds + sd.k_tilde;
            assert!(
                (lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1.0),
                "{}: {lhs} vs {rhs}",
                m.name
            );
        }
    }
}

#[test]
fn curvature_scaling_covariance() {
    // Replacing phi by c phi divides K_F by c.
    let mut rng = rng(0x5CA1E);
    let m = by_name("convex-ball");
    for &c in &[0.5, 2.0, 7.25] {
        let scaled = MetricDefn::new(
            "scaled",
            Expr::Binary(
                BinaryOp::Mul,
                Box::new(Expr::Num(c)),
                Box::new(m.body.clone()),
            ),
            m.guard,
        );
        for _ in 0..30 {
            let p = random_pseudoconvex_point(&m, 2, &mut rng);
            let k = holomorphic_curvature(&m, &p).unwrap().k_f;
            let ks = holomorphic_curvature(&scaled, &p).unwrap().k_f;
            assert!(
                (ks - k / c).abs() <= 1e-10 * (k / c).abs().max(1.0),
                "c = {c}: {ks} vs {}",
                k / c
            );
        }
    }
}

#[test]
fn curvature_depends_only_on_the_complex_line() {
    // K_F(z, zeta v) = K_F(z, v) for complex zeta != 0, both routes.
    let mut rng = rng(0x11E);
    let m = by_name("negative-curvature");
    for _ in 0..20 {
        let p = random_pseudoconvex_point(&m, 2, &mut rng);
        let k = holomorphic_curvature(&m, &p).unwrap().k_f;
        let zeta = Complex64::new(rng.random_range(-1.5..1.5), rng.random_range(0.3..1.2));
        let q = PointDirection::new(p.z.clone(), p.v.iter().map(|v| v * zeta).collect()).unwrap();
        let kq = holomorphic_curvature(&m, &q).unwrap().k_f;
        assert!((kq - k).abs() <= 1e-10 * k.abs().max(1.0));
        let ko = curvature_oracle(&m, &q).unwrap();
        assert!((ko - k).abs() <= 1e-6 * k.abs().max(1.0));
    }
}

#[test]
fn verdicts_imply_eigenvalue_signs() {
    // A positive convexity verdict forces every real eigenvalue positive;
    // a positive pseudoconvexity verdict forces every Levi eigenvalue
    // positive (spectra from the closed-form factorizations).
    let mut rng = rng(0xE16);
    for m in catalog() {
        for i in 0..60 {
            let n = [2, 3, 4][i % 3];
            let p = random_point(&m, n, &mut rng);
            let sd = ScalarData::new(&m, p.t, p.s).unwrap();
            let (ce, re) = unifinsler::tensors::eigen_spectra(&sd, n).unwrap();
            if convex_verdict(&sd).is_positive() {
                assert!(re[0] > 0.0, "{} at ({}, {})", m.name, p.t, p.s);
            }
            if pseudoconvex_verdict(&sd, n).is_positive() {
                assert!(ce[0] > 0.0, "{} at ({}, {})", m.name, p.t, p.s);
            }
        }
    }
}

#[test]
fn sphere_length_is_frame_invariant() {
    // The standard-basis frame and a unitarily rotated frame give the same
    // polygonal lengths: the experiment only sees U(n) invariants.
    use unifinsler::dynamics::{polygonal_length, polygonal_length_with_frame};
    let mut rng = rng(0x5EA);
    for name in ["euclidean", "wrona", "flat-exp"] {
        let m = by_name(name).normalized().unwrap();
        let alpha = 1.1;
        let base = polygonal_length(&m, alpha, 257).unwrap();
        let a = random_unitary(2, &mut rng);
        let rotated =
            polygonal_length_with_frame(&m, alpha, 257, a.mul_vec(&base.z), a.mul_vec(&base.w))
                .unwrap();
        assert!(
            (rotated.l_sum - base.l_sum).abs() < 1e-12,
            "{name}: {} vs {}",
            rotated.l_sum,
            base.l_sum
        );
    }
}

#[test]
fn geodesics_conjugate_under_unitaries() {
    // Integrating from a rotated start equals rotating the integrated
    // trace: the spray is U(n)-equivariant.
    let mut rng = rng(0x60D);
    let m = by_name("convex-ball");
    let z0 = vec![Complex64::new(0.25, 0.1), Complex64::new(-0.15, 0.2)];
    let v0 = vec![Complex64::new(0.2, -0.1), Complex64::new(0.1, 0.15)];
    let a = random_unitary(2, &mut rng);
    let steps = 200;
    let h = 1e-3;
    let plain = integrate_geodesic(&m, &realify(&z0), &realify(&v0), h, steps).unwrap();
    let rotated = integrate_geodesic(
        &m,
        &realify(&a.mul_vec(&z0)),
        &realify(&a.mul_vec(&v0)),
        h,
        steps,
    )
    .unwrap();
    for (p, q) in plain.points.iter().zip(&rotated.points).step_by(50) {
        assert!((p.f_value - q.f_value).abs() < 1e-8);
        let rotated_x = a.mul_vec(&complexify(&p.x));
        for (want, got) in rotated_x.iter().zip(complexify(&q.x)) {
            assert!((want - got).norm() < 1e-8);
        }
    }
}
