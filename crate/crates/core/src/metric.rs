//! Metric definitions: a parsed `phi(t, s)` body plus the domain guard on
//! which it defines a positive metric, and the catalog of named metrics.
//!
//! Every metric here is of the form `F(z, v) = sqrt(r * phi(t, s))` with
//! `r = |v|^2`, `t = |z|^2`, `s = |<z, v>|^2 / |v|^2`, so `phi` alone
//! determines the geometry. Evaluation always checks the guard first and
//! refuses to return a non-positive `phi`.

use crate::error::{Error, Result};
use crate::expr::{BinaryOp, Expr};
use crate::jet::Jet2;

/// Slack for the Cauchy-Schwarz range check `s <= t`: realified points can
/// overshoot by a few ulps.
const SIMPLEX_SLACK: f64 = 1e-12;

/// Default exclusion width for the Wrona metric's singular set `t = s`.
pub const WRONA_DELTA: f64 = 1e-9;

/// Predicate on `(t, s)` carving out the subdomain where a metric is
/// defined. The Cauchy-Schwarz constraint `0 <= s <= t` is separate and
/// applies to every metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainGuard {
    Unrestricted,
    /// `t < bound` (metrics on a ball of squared radius `bound`).
    TBelow(f64),
    /// `t - s > delta` (metrics singular where z is a multiple of v).
    TMinusSAbove(f64),
}

impl DomainGuard {
    pub fn admits(&self, t: f64, s: f64) -> bool {
        match *self {
            DomainGuard::Unrestricted => true,
            DomainGuard::TBelow(bound) => t < bound,
            DomainGuard::TMinusSAbove(delta) => t - s > delta,
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            DomainGuard::Unrestricted => "none".into(),
            DomainGuard::TBelow(bound) => format!("t < {bound}"),
            DomainGuard::TMinusSAbove(delta) => format!("t - s > {delta}"),
        }
    }
}

/// A named metric: expression body, domain guard, and an optional note on
/// its `phi(1, 0)` normalization (relevant for the unit-sphere experiment).
#[derive(Debug, Clone)]
pub struct MetricDefn {
    pub name: String,
    pub body: Expr,
    pub guard: DomainGuard,
    pub normalization_note: Option<String>,
}

impl MetricDefn {
    pub fn new(name: impl Into<String>, body: Expr, guard: DomainGuard) -> Self {
        MetricDefn {
            name: name.into(),
            body,
            guard,
            normalization_note: None,
        }
    }

    /// Parse `text` as the body of an unrestricted metric.
    pub fn parse(name: impl Into<String>, text: &str) -> Result<Self> {
        Ok(MetricDefn::new(
            name,
            Expr::parse(text)?,
            DomainGuard::Unrestricted,
        ))
    }

    fn check_guard(&self, t: f64, s: f64) -> Result<()> {
        if !t.is_finite() || !s.is_finite() || t < 0.0 || s < 0.0 || !self.guard.admits(t, s) {
            return Err(Error::GuardViolation {
                name: self.name.clone(),
                guard: self.guard.describe(),
                t,
                s,
            });
        }
        Ok(())
    }

    /// Full second-order jet of `phi` at `(t, s)`.
    ///
    /// Checks the Cauchy-Schwarz range `0 <= s <= t`, the domain guard, and
    /// positivity of the result; a violation raises instead of returning a
    /// meaningless number.
    pub fn eval(&self, t: f64, s: f64) -> Result<Jet2> {
        if s > t + SIMPLEX_SLACK * t.max(1.0) {
            return Err(Error::InvalidInvariants(format!(
                "s = {s} exceeds t = {t}; no point of C^n realizes these invariants"
            )));
        }
        self.eval_off_simplex(t, s)
    }

    /// Like [`MetricDefn::eval`] but without the `s <= t` constraint, for
    /// finite-difference stencils in `s` that step past the simplex edge.
    /// The guard and positivity checks still apply.
    pub fn eval_off_simplex(&self, t: f64, s: f64) -> Result<Jet2> {
        self.check_guard(t, s)?;
        let jet = self.body.eval_jet(t, s)?;
        if !jet.is_finite() || jet.value <= 0.0 {
            return Err(Error::NonPositivePhi {
                name: self.name.clone(),
                phi: jet.value,
                t,
                s,
            });
        }
        Ok(jet)
    }

    /// Convenience: just the value `phi(t, s)`.
    pub fn phi(&self, t: f64, s: f64) -> Result<f64> {
        Ok(self.eval(t, s)?.value)
    }

    /// The metric scaled by `1/phi(1, 0)` so that `phi(1, 0) = 1`, leaving
    /// convexity verdicts unchanged (all conditions are strict inequalities
    /// invariant under positive scaling).
    pub fn normalized(&self) -> Result<MetricDefn> {
        let pole = self
            .eval(1.0, 0.0)
            .map_err(|e| Error::UnboundedAtPole(format!("metric '{}': {e}", self.name)))?;
        let scale = pole.value;
        if !scale.is_finite() || scale <= 0.0 {
            return Err(Error::UnboundedAtPole(format!(
                "metric '{}': phi(1, 0) = {scale}",
                self.name
            )));
        }
        if scale == 1.0 {
            let mut m = self.clone();
            m.normalization_note = Some("phi(1, 0) = 1".into());
            return Ok(m);
        }
        Ok(MetricDefn {
            name: format!("{}-normalized", self.name),
            body: Expr::Binary(
                BinaryOp::Div,
                Box::new(self.body.clone()),
                Box::new(Expr::Num(scale)),
            ),
            guard: self.guard,
            normalization_note: Some(format!("scaled by 1/{scale} so that phi(1, 0) = 1")),
        })
    }
}

fn entry(name: &str, text: &str, guard: DomainGuard, note: Option<&str>) -> MetricDefn {
    let body = Expr::parse(text).unwrap_or_else(|e| panic!("catalog body '{text}': {e}"));
    MetricDefn {
        name: name.into(),
        body,
        guard,
        normalization_note: note.map(str::to_owned),
    }
}

/// The catalog of named metrics.
///
/// | name                 | phi(t, s)              | guard      |
/// |----------------------|------------------------|------------|
/// | `euclidean`          | 1                      | none       |
/// | `hermitian`          | 1 + s                  | none       |
/// | `convex-ball`        | (1+s)^2                | t < 1      |
/// | `pseudoconvex-ball`  | 4 - s^2                | t < sqrt 3 |
/// | `negative-curvature` | (1-t+s)^2 / (1-t)^3    | t < 1      |
/// | `positive-curvature` | (1+t-s)^2 / (1+t)^3    | none       |
/// | `flat-exp`           | exp(s-t)               | none       |
/// | `flat-quadratic`     | 1 + (s-t) + (s-t)^2    | none       |
/// | `wrona`              | 1 / (t-s)              | t - s > 1e-9 |
/// | `bergman`            | 1/(1-t) + s/(1-t)^2    | t < 1      |
pub fn catalog() -> Vec<MetricDefn> {
    vec![
        entry(
            "euclidean",
            "1",
            DomainGuard::Unrestricted,
            Some("phi(1, 0) = 1"),
        ),
        entry(
            "hermitian",
            "1+s",
            DomainGuard::Unrestricted,
            Some("phi(1, 0) = 1"),
        ),
        entry(
            "convex-ball",
            "(1+s)^2",
            DomainGuard::TBelow(1.0),
            Some("phi(1, 0) guard-blocked: the sphere t = 1 lies outside the ball"),
        ),
        entry(
            "pseudoconvex-ball",
            "4-s^2",
            DomainGuard::TBelow(1.7320508075688772),
            Some("phi(1, 0) = 4"),
        ),
        entry(
            "negative-curvature",
            "(1-t+s)^2/(1-t)^3",
            DomainGuard::TBelow(1.0),
            Some("phi(1, 0) unbounded as t -> 1"),
        ),
        entry(
            "positive-curvature",
            "(1+t-s)^2/(1+t)^3",
            DomainGuard::Unrestricted,
            Some("phi(1, 0) = 1/2"),
        ),
        entry(
            "flat-exp",
            "exp(s-t)",
            DomainGuard::Unrestricted,
            Some("phi(1, 0) = exp(-1)"),
        ),
        entry(
            "flat-quadratic",
            "1+(s-t)+(s-t)^2",
            DomainGuard::Unrestricted,
            Some("phi(1, 0) = 1"),
        ),
        entry(
            "wrona",
            "1/(t-s)",
            DomainGuard::TMinusSAbove(WRONA_DELTA),
            Some("phi(1, 0) = 1"),
        ),
        entry(
            "bergman",
            "1/(1-t)+s/(1-t)^2",
            DomainGuard::TBelow(1.0),
            Some("phi(1, 0) unbounded as t -> 1"),
        ),
    ]
}

pub fn lookup(name: &str) -> Option<MetricDefn> {
    catalog().into_iter().find(|m| m.name == name)
}

/// Resolve a CLI-style metric spec: a catalog name wins; anything else is
/// parsed as an expression (unambiguous because catalog names are not valid
/// expressions). A parsed body that coincides with a catalog body adopts
/// that entry, guard included, so `"(1+s)^2"` means the metric on the unit
/// ball and not an unguarded lookalike.
pub fn resolve(spec: &str) -> Result<MetricDefn> {
    if let Some(m) = lookup(spec.trim()) {
        return Ok(m);
    }
    let parsed = MetricDefn::parse(spec.trim(), spec)?;
    if let Some(m) = catalog().into_iter().find(|m| m.body == parsed.body) {
        return Ok(m);
    }
    Ok(parsed)
}
