//! Fundamental tensors of `F = sqrt(r phi(t, s))` and their closed forms:
//! the complex Levi matrix, the real fundamental tensor, the closed-form
//! inverse, closed-form eigenvalue spectra, and the pseudoconvexity /
//! convexity verdicts.
//!
//! All scalar combinations live in [`ScalarData`]; they depend only on
//! `(t, s)`, which is what makes grid sweeps cheap. Matrices additionally
//! need the point/direction pair.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{apply_j, s_alpha, s_derivative_suite, PointDirection};
use crate::jet::Jet2;
use crate::linalg::{CMat, Mat};
use crate::metric::MetricDefn;
use crate::output::g17;
use crate::parallel::par_map_indexed;

/// Strictness tolerance for the open conditions "> 0": a value passes at
/// `value > EPS * max(1, phi^2)` and counts as marginal inside the band.
pub const STRICTNESS_EPS: f64 = 1e-12;

/// Denominators below this absolute size make the closed-form inverse and
/// spray formulas singular.
pub const SINGULAR_TOL: f64 = 1e-12;

/// Everything scalar the closed forms need at one `(t, s)`.
#[derive(Debug, Clone, Copy)]
pub struct ScalarData {
    pub t: f64,
    pub s: f64,
    /// `phi` and all partials through order two.
    pub phi: Jet2,
    /// `c0 = phi - s phi_s`.
    pub c0: f64,
    /// `c0 + t phi_s = phi + (t - s) phi_s`.
    pub c0_plus_t_phi_s: f64,
    /// `k1 = c0 (c0 + t phi_s) + s (t - s) phi phi_ss` (complex quadratic).
    pub k1: f64,
    /// `k~ = c0 (c0 + t phi_s) + 2 s (t - s) phi phi_ss` (real quadratic).
    pub k_tilde: f64,
    /// `L = (c0 + t phi_s) * k~`.
    pub l_scalar: f64,
}

impl ScalarData {
    pub fn new(metric: &MetricDefn, t: f64, s: f64) -> Result<Self> {
        Self::from_jet(t, s, metric.eval(t, s)?)
    }

    /// Variant for finite-difference stencils that may step past `s = t`.
    pub fn new_off_simplex(metric: &MetricDefn, t: f64, s: f64) -> Result<Self> {
        Self::from_jet(t, s, metric.eval_off_simplex(t, s)?)
    }

    fn from_jet(t: f64, s: f64, phi: Jet2) -> Result<Self> {
        let c0 = phi.value - s * phi.ds;
        let c0t = c0 + t * phi.ds;
        let cross = s * (t - s) * phi.value * phi.dss;
        let k1 = c0 * c0t + cross;
        let k_tilde = c0 * c0t + 2.0 * cross;
        Ok(ScalarData {
            t,
            s,
            phi,
            c0,
            c0_plus_t_phi_s: c0t,
            k1,
            k_tilde,
            l_scalar: c0t * k_tilde,
        })
    }

    /// Scale used by the strict-inequality tolerance.
    pub fn verdict_scale(&self) -> f64 {
        (self.phi.value * self.phi.value).max(1.0)
    }

    pub fn f_squared(&self, r: f64) -> f64 {
        r * self.phi.value
    }
}

/// Tri-state outcome of an open condition "> 0" under the strictness
/// tolerance: values inside `(-eps*scale, eps*scale]` are neither.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Positive,
    Marginal,
    Negative,
}

impl Verdict {
    pub fn of(value: f64, scale: f64) -> Verdict {
        Verdict::with_band(value, STRICTNESS_EPS * scale)
    }

    /// Like [`Verdict::of`] with an explicit half-width of the marginal
    /// band (the CLI's strictness override funnels through here).
    pub fn with_band(value: f64, band: f64) -> Verdict {
        if value > band {
            Verdict::Positive
        } else if value > -band {
            Verdict::Marginal
        } else {
            Verdict::Negative
        }
    }

    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Negative, _) | (_, Negative) => Negative,
            (Marginal, _) | (_, Marginal) => Marginal,
            (Positive, Positive) => Positive,
        }
    }

    pub fn is_positive(self) -> bool {
        self == Verdict::Positive
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Positive => "true",
            Verdict::Negative => "false",
            Verdict::Marginal => "marginal",
        }
    }
}

/// Scalars, closed-form spectra and verdicts at one point.
#[derive(Debug, Clone)]
pub struct ConvexityReport {
    pub n: usize,
    pub t: f64,
    pub s: f64,
    pub c0: f64,
    pub k1: f64,
    pub k_tilde: f64,
    pub c0_plus_t_phi_s: f64,
    /// Spectrum of the n x n Levi matrix, ascending.
    pub complex_eigen: Vec<f64>,
    /// Spectrum of the 2n x 2n real fundamental tensor, ascending.
    pub real_eigen: Vec<f64>,
    pub pseudoconvex: Verdict,
    pub convex: Verdict,
}

/// Stable quadratic roots of `x^2 - b x + c` (the characteristic factors
/// always arrive in this monic form). A tiny negative discriminant is
/// clamped; a decisively negative one contradicts Hermitian symmetry and
/// reports a formula bug.
fn quadratic_roots(b: f64, c: f64) -> Result<(f64, f64)> {
    let disc = b * b - 4.0 * c;
    let scale = (b * b).max(c.abs()).max(1.0);
    if disc < -1e-10 * scale {
        return Err(Error::InternalInconsistency(format!(
            "characteristic quadratic x^2 - {b} x + {c} has negative discriminant {disc}"
        )));
    }
    let root = disc.max(0.0).sqrt();
    if b == 0.0 && c == 0.0 {
        return Ok((0.0, 0.0));
    }
    // q = (b + sign(b) sqrt(disc)) / 2 avoids cancellation.
    let q = 0.5 * (b + if b >= 0.0 { root } else { -root });
    if q == 0.0 {
        // b and c conspire to zero; fall back to symmetric form.
        return Ok((-root / 2.0, root / 2.0));
    }
    let (r1, r2) = (q, c / q);
    Ok(if r1 <= r2 { (r1, r2) } else { (r2, r1) })
}

/// Closed-form spectra of the Levi matrix and of the real fundamental
/// tensor, both ascending, from the characteristic-polynomial
/// factorizations. Valid at degenerate points (`s = 0`, `s = t`) too,
/// where multiplicities merge.
pub fn eigen_spectra(sd: &ScalarData, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 2 {
        return Err(Error::InvalidInvariants(format!(
            "eigenvalue factorizations assume n >= 2, got {n}"
        )));
    }
    let cross = sd.s * (sd.t - sd.s) * sd.phi.dss;
    let (lo, hi) = quadratic_roots(2.0 * sd.c0 + sd.t * sd.phi.ds + cross, sd.k1)?;
    let mut complex_eigen = vec![sd.c0; n - 2];
    complex_eigen.extend([lo, hi]);
    complex_eigen.sort_by(f64::total_cmp);

    let (lo, hi) = quadratic_roots(2.0 * sd.c0 + sd.t * sd.phi.ds + 2.0 * cross, sd.k_tilde)?;
    let mut real_eigen = vec![sd.c0; 2 * n - 3];
    real_eigen.push(sd.c0_plus_t_phi_s);
    real_eigen.extend([lo, hi]);
    real_eigen.sort_by(f64::total_cmp);
    Ok((complex_eigen, real_eigen))
}

/// Pseudoconvexity verdict: `c0 > 0` and `k1 > 0` for `n >= 3`; `k1 > 0`
/// alone for `n = 2` (where `c0 > 0` follows).
pub fn pseudoconvex_verdict(sd: &ScalarData, n: usize) -> Verdict {
    pseudoconvex_verdict_eps(sd, n, STRICTNESS_EPS)
}

/// [`pseudoconvex_verdict`] with an overridden strictness epsilon.
pub fn pseudoconvex_verdict_eps(sd: &ScalarData, n: usize, eps: f64) -> Verdict {
    let band = eps * sd.verdict_scale();
    let k1 = Verdict::with_band(sd.k1, band);
    if n >= 3 {
        Verdict::with_band(sd.c0, band).and(k1)
    } else {
        k1
    }
}

/// Strong-convexity verdict: the three strict inequalities
/// `c0 > 0`, `c0 + t phi_s > 0`, `k~ > 0`.
pub fn convex_verdict(sd: &ScalarData) -> Verdict {
    convex_verdict_eps(sd, STRICTNESS_EPS)
}

/// [`convex_verdict`] with an overridden strictness epsilon.
pub fn convex_verdict_eps(sd: &ScalarData, eps: f64) -> Verdict {
    let band = eps * sd.verdict_scale();
    Verdict::with_band(sd.c0, band)
        .and(Verdict::with_band(sd.c0_plus_t_phi_s, band))
        .and(Verdict::with_band(sd.k_tilde, band))
}

fn report(metric: &MetricDefn, t: f64, s: f64, n: usize, eps: f64) -> Result<ConvexityReport> {
    let sd = ScalarData::new(metric, t, s)?;
    let (complex_eigen, real_eigen) = eigen_spectra(&sd, n)?;
    Ok(ConvexityReport {
        n,
        t,
        s,
        c0: sd.c0,
        k1: sd.k1,
        k_tilde: sd.k_tilde,
        c0_plus_t_phi_s: sd.c0_plus_t_phi_s,
        complex_eigen,
        real_eigen,
        pseudoconvex: pseudoconvex_verdict_eps(&sd, n, eps),
        convex: convex_verdict_eps(&sd, eps),
    })
}

/// Pseudoconvexity check at a point (the report carries both verdicts).
pub fn pseudoconvexity_check(metric: &MetricDefn, p: &PointDirection) -> Result<ConvexityReport> {
    report(metric, p.t, p.s, p.n, STRICTNESS_EPS)
}

/// Strong-convexity check at a point (the report carries both verdicts).
pub fn convexity_check(metric: &MetricDefn, p: &PointDirection) -> Result<ConvexityReport> {
    report(metric, p.t, p.s, p.n, STRICTNESS_EPS)
}

/// Verdicts from abstract invariants; `n` is the ambient complex dimension.
pub fn convexity_report_ts(
    metric: &MetricDefn,
    t: f64,
    s: f64,
    n: usize,
) -> Result<ConvexityReport> {
    report(metric, t, s, n, STRICTNESS_EPS)
}

/// [`convexity_report_ts`] with an overridden strictness epsilon.
pub fn convexity_report_ts_eps(
    metric: &MetricDefn,
    t: f64,
    s: f64,
    n: usize,
    eps: f64,
) -> Result<ConvexityReport> {
    report(metric, t, s, n, eps)
}

/// The Levi matrix `G_{a b-bar} = c0 I + B X B*` with `B` columns
/// `(s_alpha, conj(z^alpha))` and `X = diag(r phi_ss, phi_s)`; explicitly,
/// `c0 d_ab + r phi_ss s_a conj(s_b) + phi_s conj(z^a) z^b`.
pub fn levi_matrix(metric: &MetricDefn, p: &PointDirection) -> Result<CMat> {
    let sd = ScalarData::new(metric, p.t, p.s)?;
    let sa = s_alpha(p);
    let n = p.n;
    Ok(CMat::from_fn(n, |a, b| {
        let mut g = sd.phi.dss * p.r * sa[a] * sa[b].conj() + sd.phi.ds * p.z[a].conj() * p.z[b];
        if a == b {
            g += Complex64::new(sd.c0, 0.0);
        }
        g
    }))
}

/// The real fundamental tensor
/// `g_ij = c0 d_ij + (r phi_ss / 2) s_i s_j + phi_s (x^i x^j + Jx^i Jx^j)`.
pub fn real_fundamental_tensor(metric: &MetricDefn, p: &PointDirection) -> Result<Mat> {
    let sd = ScalarData::new(metric, p.t, p.s)?;
    let deriv = s_derivative_suite(p);
    let jx = apply_j(&p.x);
    let dim = 2 * p.n;
    Ok(Mat::from_fn(dim, |i, j| {
        let mut g = 0.5 * p.r * sd.phi.dss * deriv.s_u[i] * deriv.s_u[j]
            + sd.phi.ds * (p.x[i] * p.x[j] + jx[i] * jx[j]);
        if i == j {
            g += sd.c0;
        }
        g
    }))
}

/// The `X^j = phi s_j - 2 s (t - s) phi_s u^j / r` vector entering the
/// closed-form inverse and the spray.
pub fn x_vector(sd: &ScalarData, p: &PointDirection, s_u: &[f64]) -> Vec<f64> {
    let coeff = 2.0 * sd.s * (sd.t - sd.s) * sd.phi.ds / p.r;
    s_u.iter()
        .zip(&p.u)
        .map(|(si, ui)| sd.phi.value * si - coeff * ui)
        .collect()
}

/// Closed-form inverse of the real fundamental tensor:
/// `g^{jk} = (1/c0) { d_jk - (r phi_ss / 2L) X^j X^k
///                    - (phi_s / (c0 + t phi_s)) (x^j x^k + Jx^j Jx^k) }`.
///
/// Errors with `SingularTensor` when any of `c0`, `c0 + t phi_s`, `L`
/// is below tolerance.
pub fn inverse_fundamental_tensor(metric: &MetricDefn, p: &PointDirection) -> Result<Mat> {
    let sd = ScalarData::new(metric, p.t, p.s)?;
    for (name, value) in [
        ("c0", sd.c0),
        ("c0 + t phi_s", sd.c0_plus_t_phi_s),
        ("L", sd.l_scalar),
    ] {
        if value.abs() < SINGULAR_TOL {
            return Err(Error::SingularTensor(format!(
                "{name} = {value} at (t, s) = ({}, {})",
                sd.t, sd.s
            )));
        }
    }
    let deriv = s_derivative_suite(p);
    let xv = x_vector(&sd, p, &deriv.s_u);
    let jx = apply_j(&p.x);
    let half_r_fss_over_l = 0.5 * p.r * sd.phi.dss / sd.l_scalar;
    let fs_over_c0t = sd.phi.ds / sd.c0_plus_t_phi_s;
    let dim = 2 * p.n;
    Ok(Mat::from_fn(dim, |j, k| {
        let mut g =
            -half_r_fss_over_l * xv[j] * xv[k] - fs_over_c0t * (p.x[j] * p.x[k] + jx[j] * jx[k]);
        if j == k {
            g += 1.0;
        }
        g / sd.c0
    }))
}

/// One cell of a `(t, s)` region sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub t: f64,
    pub s: f64,
    pub c0: f64,
    pub k1: f64,
    pub k_tilde: f64,
    pub pseudoconvex: Verdict,
    pub convex: Verdict,
    /// True when the metric's guard rejects this cell.
    pub excluded: bool,
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (count - 1) as f64;
    (0..count).map(|i| lo + step * i as f64).collect()
}

/// Row-major grid over `t_range x s_range` restricted to the simplex
/// `s <= t`; guard-violating cells are kept but marked excluded. Cells are
/// independent, so they fan out over `workers` threads and are merged by
/// index, making the output order deterministic.
pub fn region_sweep(
    metric: &MetricDefn,
    t_range: (f64, f64),
    s_range: (f64, f64),
    grid_n: usize,
    n: usize,
    workers: usize,
) -> Result<Vec<SweepRow>> {
    region_sweep_eps(metric, t_range, s_range, grid_n, n, workers, STRICTNESS_EPS)
}

/// [`region_sweep`] with an overridden strictness epsilon.
#[allow(clippy::too_many_arguments)]
pub fn region_sweep_eps(
    metric: &MetricDefn,
    t_range: (f64, f64),
    s_range: (f64, f64),
    grid_n: usize,
    n: usize,
    workers: usize,
    eps: f64,
) -> Result<Vec<SweepRow>> {
    if grid_n < 2 {
        return Err(Error::InvalidInvariants(format!(
            "sweep grid must have at least 2 points per axis, got {grid_n}"
        )));
    }
    let t_vals = linspace(t_range.0, t_range.1, grid_n);
    let s_vals = linspace(s_range.0, s_range.1, grid_n);
    let cells: Vec<(f64, f64)> = t_vals
        .iter()
        .flat_map(|&t| {
            s_vals
                .iter()
                .filter(move |&&s| s <= t)
                .map(move |&s| (t, s))
        })
        .collect();
    let rows = par_map_indexed(cells.len(), workers, |idx| {
        let (t, s) = cells[idx];
        match ScalarData::new(metric, t, s) {
            Ok(sd) => SweepRow {
                t,
                s,
                c0: sd.c0,
                k1: sd.k1,
                k_tilde: sd.k_tilde,
                pseudoconvex: pseudoconvex_verdict_eps(&sd, n, eps),
                convex: convex_verdict_eps(&sd, eps),
                excluded: false,
            },
            Err(_) => SweepRow {
                t,
                s,
                c0: f64::NAN,
                k1: f64::NAN,
                k_tilde: f64::NAN,
                pseudoconvex: Verdict::Marginal,
                convex: Verdict::Marginal,
                excluded: true,
            },
        }
    });
    Ok(rows)
}

pub const SWEEP_CSV_HEADER: &str = "t,s,c0,k1,ktilde,pseudoconvex,convex,excluded";

pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            g17(row.t),
            g17(row.s),
            g17(row.c0),
            g17(row.k1),
            g17(row.k_tilde),
            row.pseudoconvex.as_str(),
            row.convex.as_str(),
            row.excluded
        ));
    }
    out
}
