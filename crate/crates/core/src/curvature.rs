//! Complex geodesic spray and holomorphic sectional curvature.
//!
//! Two independent routes to `K_F` are kept deliberately: the explicit
//! closed-form expression in the `phi` partials, and the definitional
//! contraction `K_F = -(2/G^2) G_gamma dbar_nu(2 Gspray^gamma) conj(v^nu)`
//! where `dbar_nu` is the Wirtinger derivative in the base variable
//! `conj(z^nu)`, taken numerically. Their agreement is the module's central
//! acceptance property.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{norm_sq, s_alpha, PointDirection};
use crate::metric::MetricDefn;
use crate::output::g17;
use crate::tensors::ScalarData;

/// `K_F` with all intermediate spray scalars.
#[derive(Debug, Clone)]
pub struct CurvatureReport {
    pub k_f: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub k5: f64,
    pub at_origin: bool,
}

/// Numerators of the complex spray scalars:
/// `k4 = [c0 + t phi_s + s(t-s) phi_ss](phi_t + phi_s)
///        - s (c0 + t phi_s)(phi_st + phi_ss)`,
/// `k5 = phi (phi_st + phi_ss) - phi_s (phi_t + phi_s)`.
pub fn k4_k5(sd: &ScalarData) -> (f64, f64) {
    let phi = &sd.phi;
    let ft_plus_fs = phi.dt + phi.ds;
    let fst_plus_fss = phi.dts + phi.dss;
    let k4 = (sd.c0_plus_t_phi_s + sd.s * (sd.t - sd.s) * phi.dss) * ft_plus_fs
        - sd.s * sd.c0_plus_t_phi_s * fst_plus_fss;
    let k5 = phi.value * fst_plus_fss - phi.ds * ft_plus_fs;
    (k4, k5)
}

fn require_k1(sd: &ScalarData) -> Result<f64> {
    let floor = 1e-12 * sd.phi.value * sd.phi.value;
    if sd.k1.abs() < floor {
        return Err(Error::SingularTensor(format!(
            "k1 = {} below tolerance at (t, s) = ({}, {})",
            sd.k1, sd.t, sd.s
        )));
    }
    Ok(sd.k1)
}

/// The complex spray `2 Gspray^gamma = k2 conj(<z,v>) v^gamma
/// + k3 conj(<z,v>)^2 z^gamma` with `k2 = k4/k1`, `k3 = k5/k1`.
pub fn complex_spray(metric: &MetricDefn, p: &PointDirection) -> Result<Vec<Complex64>> {
    let sd = ScalarData::new(metric, p.t, p.s)?;
    let k1 = require_k1(&sd)?;
    let (k4, k5) = k4_k5(&sd);
    let (k2, k3) = (k4 / k1, k5 / k1);
    let herm_bar = p.herm.conj();
    Ok((0..p.n)
        .map(|g| k2 * herm_bar * p.v[g] + k3 * herm_bar * herm_bar * p.z[g])
        .collect())
}

/// Holomorphic sectional curvature by the explicit closed form.
pub fn holomorphic_curvature(metric: &MetricDefn, p: &PointDirection) -> Result<CurvatureReport> {
    curvature_report_ts(metric, p.t, p.s)
}

/// Full curvature report from the invariants alone (curvature of a
/// U(n)-invariant metric depends only on `(t, s)`).
pub fn curvature_report_ts(metric: &MetricDefn, t: f64, s: f64) -> Result<CurvatureReport> {
    let sd = ScalarData::new(metric, t, s)?;
    let k_f = curvature_from_scalars(&sd)?;
    let k1 = sd.k1;
    let (k4, k5) = k4_k5(&sd);
    Ok(CurvatureReport {
        k_f,
        k1,
        k2: k4 / k1,
        k3: k5 / k1,
        k4,
        k5,
        at_origin: t == 0.0 && s == 0.0,
    })
}

/// Closed-form `K_F` from invariants alone (for maps over `(t, s)` grids).
pub fn holomorphic_curvature_ts(metric: &MetricDefn, t: f64, s: f64) -> Result<f64> {
    curvature_from_scalars(&ScalarData::new(metric, t, s)?)
}

fn curvature_from_scalars(sd: &ScalarData) -> Result<f64> {
    let k1 = require_k1(sd)?;
    let phi = &sd.phi;
    let (t, s) = (sd.t, sd.s);
    let ft_plus_fs = phi.dt + phi.ds;
    let fst_plus_fss = phi.dts + phi.dss;
    let brace = k1 * (s * (phi.dtt + 2.0 * phi.dts + phi.dss) + ft_plus_fs)
        - s * s * (t - s) * phi.value * fst_plus_fss * fst_plus_fss
        + 2.0 * s * s * (t - s) * phi.ds * fst_plus_fss * ft_plus_fs
        - s * (sd.c0 + (t - s) * phi.ds + s * (t - s) * phi.dss) * ft_plus_fs * ft_plus_fs;
    Ok(-2.0 / (phi.value * phi.value * k1) * brace)
}

/// Wirtinger step for the definitional curvature oracle.
const ORACLE_STEP: f64 = 1e-5;

/// `K_F` from the definition: the complex spray is differentiated in
/// `conj(z^nu)` by central Wirtinger finite differences
/// (`d/d conj(z) = (d/dRe + i d/dIm)/2`, step `1e-5 * max(1, |v|)`) and
/// contracted with `G_gamma = conj(v^gamma) phi + r phi_s s_gamma` and
/// `conj(v^nu)`; independent of the closed-form expression above.
pub fn curvature_oracle(metric: &MetricDefn, p: &PointDirection) -> Result<f64> {
    let sd = ScalarData::new(metric, p.t, p.s)?;
    require_k1(&sd)?;
    let g_value = p.r * sd.phi.value;
    let sa = s_alpha(p);
    let g_gamma: Vec<Complex64> = (0..p.n)
        .map(|g| p.v[g].conj() * sd.phi.value + p.r * sd.phi.ds * sa[g])
        .collect();

    let spray_at = |z: &[Complex64]| -> Result<Vec<Complex64>> {
        complex_spray(metric, &PointDirection::new(z.to_vec(), p.v.clone())?)
    };
    let h = ORACLE_STEP * norm_sq(&p.v).sqrt().max(1.0);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut z = p.z.clone();
    for nu in 0..p.n {
        let z0 = z[nu];
        z[nu] = z0 + h;
        let re_plus = spray_at(&z)?;
        z[nu] = z0 - h;
        let re_minus = spray_at(&z)?;
        z[nu] = z0 + Complex64::new(0.0, h);
        let im_plus = spray_at(&z)?;
        z[nu] = z0 - Complex64::new(0.0, h);
        let im_minus = spray_at(&z)?;
        z[nu] = z0;
        for g in 0..p.n {
            let d_re = (re_plus[g] - re_minus[g]) / (2.0 * h);
            let d_im = (im_plus[g] - im_minus[g]) / (2.0 * h);
            // d/d conj(z^nu) = (d/dRe + i d/dIm) / 2
            let dbar = 0.5 * (d_re + Complex64::new(0.0, 1.0) * d_im);
            acc += g_gamma[g] * dbar * p.v[nu].conj();
        }
    }
    Ok(-2.0 / (g_value * g_value) * acc.re)
}

/// `K_F(0, v) = -2 [phi_t(0,0) + phi_s(0,0)] / phi(0,0)^2`, the constant
/// the curvature takes at the origin in every direction.
pub fn origin_curvature(metric: &MetricDefn) -> Result<f64> {
    let jet = metric.eval(0.0, 0.0)?;
    Ok(-2.0 * (jet.dt + jet.ds) / (jet.value * jet.value))
}

/// Residual of the weakly-complex-Berwald equation `k5 = g(t) k1` at one
/// point. With `g` supplied the residual is `k5 - g k1`; without it the
/// single-point least-squares fit `g = k5/k1` is used (and reported), which
/// only becomes a test when the same `g` is reused across other `s`.
#[derive(Debug, Clone, Copy)]
pub struct WeaklyBerwaldResidual {
    pub residual: f64,
    pub g: f64,
}

pub fn weakly_berwald_residual(
    metric: &MetricDefn,
    p: &PointDirection,
    g_of_t: Option<f64>,
) -> Result<WeaklyBerwaldResidual> {
    let sd = ScalarData::new(metric, p.t, p.s)?;
    let k1 = require_k1(&sd)?;
    let (_, k5) = k4_k5(&sd);
    let g = match g_of_t {
        Some(g) => g,
        None => k5 / k1,
    };
    Ok(WeaklyBerwaldResidual {
        residual: k5 - g * k1,
        g,
    })
}

pub const CURVATURE_CSV_HEADER: &str = "t,s,K_F,k1,k4,k5";

pub fn curvature_to_csv(rows: &[(f64, f64, CurvatureReport)]) -> String {
    let mut out = String::from(CURVATURE_CSV_HEADER);
    out.push('\n');
    for (t, s, rep) in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            g17(*t),
            g17(*s),
            g17(rep.k_f),
            g17(rep.k1),
            g17(rep.k4),
            g17(rep.k5)
        ));
    }
    out
}
