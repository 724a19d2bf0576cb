//! Error taxonomy shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Arithmetic left the domain of an elementary function (division by
    /// zero, log/sqrt of a non-positive value, fractional power of a
    /// non-positive base).
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed metric expression. `offset` is the byte position of the
    /// offending token in the source text.
    #[error("parse error at byte {offset}: expected {expected}, found {found}")]
    Parse {
        offset: usize,
        expected: String,
        found: String,
    },

    /// A point `(t, s)` fell outside a metric's declared domain guard.
    #[error("metric '{name}': guard '{guard}' rejects (t, s) = ({t}, {s})")]
    GuardViolation {
        name: String,
        guard: String,
        t: f64,
        s: f64,
    },

    /// Evaluation produced a non-positive phi, which no valid metric may do.
    #[error("metric '{name}': phi = {phi} is not positive at (t, s) = ({t}, {s})")]
    NonPositivePhi {
        name: String,
        phi: f64,
        t: f64,
        s: f64,
    },

    /// The direction vector `v` is (numerically) zero; every scalar
    /// invariant divides by its norm.
    #[error("zero direction vector")]
    ZeroDirection,

    /// Abstract invariants that no actual point can realize.
    #[error("invalid invariants: {0}")]
    InvalidInvariants(String),

    /// A closed-form denominator (c0, c0 + t*phi_s, L, k1) vanished.
    #[error("singular tensor: {0}")]
    SingularTensor(String),

    /// A quantity that symmetry forces to be real/nonnegative came out
    /// otherwise; indicates a formula or assembly bug, not bad input.
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    /// phi(1, 0) is not finite (or its evaluation is guard-blocked), so the
    /// unit-sphere normalization does not exist.
    #[error("metric unbounded at (t, s) = (1, 0): {0}")]
    UnboundedAtPole(String),
}
