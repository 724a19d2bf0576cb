//! Second-order forward-mode jets in the two variables `(t, s)`.
//!
//! A [`Jet2`] carries a function value together with every partial
//! derivative through order two: `(f, f_t, f_s, f_tt, f_ts, f_ss)`.
//! Pushing an expression for `phi(t, s)` through jet arithmetic yields all
//! six quantities in one pass, which is exactly what the tensor, spray and
//! curvature formulas downstream consume. Order is fixed at two; nothing in
//! this crate needs a third derivative of `phi`.
//!
//! Arithmetic is exact (up to floating-point rounding) for polynomials of
//! total degree <= 2, and applies the usual second-order chain and product
//! rules otherwise, e.g. `(ab)_ts = a_ts b + a_t b_s + a_s b_t + a b_ts`.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Value and partials of a scalar function of `(t, s)` through order two.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub dt: f64,
    pub ds: f64,
    pub dtt: f64,
    pub dts: f64,
    pub dss: f64,
}

impl Jet2 {
    /// The constant function `c`: all derivatives exactly zero.
    pub const fn constant(c: f64) -> Self {
        Jet2 {
            value: c,
            dt: 0.0,
            ds: 0.0,
            dtt: 0.0,
            dts: 0.0,
            dss: 0.0,
        }
    }

    /// The coordinate function `t` seeded at `t0`.
    pub const fn seed_t(t0: f64) -> Self {
        Jet2 {
            value: t0,
            dt: 1.0,
            ds: 0.0,
            dtt: 0.0,
            dts: 0.0,
            dss: 0.0,
        }
    }

    /// The coordinate function `s` seeded at `s0`.
    pub const fn seed_s(s0: f64) -> Self {
        Jet2 {
            value: s0,
            dt: 0.0,
            ds: 1.0,
            dtt: 0.0,
            dts: 0.0,
            dss: 0.0,
        }
    }

    /// Chain rule for a scalar map `u` with derivatives `u'`, `u''` at
    /// `self.value`.
    fn compose(self, u0: f64, u1: f64, u2: f64) -> Self {
        Jet2 {
            value: u0,
            dt: u1 * self.dt,
            ds: u1 * self.ds,
            dtt: u2 * self.dt * self.dt + u1 * self.dtt,
            dts: u2 * self.dt * self.ds + u1 * self.dts,
            dss: u2 * self.ds * self.ds + u1 * self.dss,
        }
    }

    /// Reciprocal `1/self`; errors on a zero value.
    pub fn recip(self) -> Result<Self> {
        if self.value == 0.0 {
            return Err(Error::Domain("division by zero".into()));
        }
        let inv = 1.0 / self.value;
        Ok(self.compose(inv, -inv * inv, 2.0 * inv * inv * inv))
    }

    /// Quotient `self / rhs`; errors on a zero divisor value. Named to
    /// avoid colliding with the infallible `std::ops::Div`.
    pub fn checked_div(self, rhs: Self) -> Result<Self> {
        Ok(self * rhs.recip()?)
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        self.compose(e, e, e)
    }

    /// Natural logarithm; requires a positive value.
    pub fn ln(self) -> Result<Self> {
        if self.value <= 0.0 {
            return Err(Error::Domain(format!(
                "log of non-positive value {}",
                self.value
            )));
        }
        let inv = 1.0 / self.value;
        Ok(self.compose(self.value.ln(), inv, -inv * inv))
    }

    /// Square root; requires a positive value (the derivative blows up at 0).
    pub fn sqrt(self) -> Result<Self> {
        if self.value <= 0.0 {
            return Err(Error::Domain(format!(
                "sqrt of non-positive value {}",
                self.value
            )));
        }
        let root = self.value.sqrt();
        let d1 = 0.5 / root;
        let d2 = -0.25 / (root * self.value);
        Ok(self.compose(root, d1, d2))
    }

    /// Integer power by repeated multiplication, so negative bases stay
    /// exact; negative exponents go through [`Jet2::recip`].
    pub fn powi(self, k: i64) -> Result<Self> {
        if k < 0 {
            return self.powi(-k)?.recip();
        }
        let mut acc = Jet2::constant(1.0);
        let mut base = self;
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            k >>= 1;
            if k > 0 {
                base = base * base;
            }
        }
        Ok(acc)
    }

    /// General power `self^rhs` via `exp(rhs * ln(self))`; requires a
    /// positive base value. Integer exponents should use [`Jet2::powi`].
    pub fn pow(self, rhs: Self) -> Result<Self> {
        Ok((rhs * self.ln()?).exp())
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.dt.is_finite()
            && self.ds.is_finite()
            && self.dtt.is_finite()
            && self.dts.is_finite()
            && self.dss.is_finite()
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        Jet2 {
            value: self.value + rhs.value,
            dt: self.dt + rhs.dt,
            ds: self.ds + rhs.ds,
            dtt: self.dtt + rhs.dtt,
            dts: self.dts + rhs.dts,
            dss: self.dss + rhs.dss,
        }
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        Jet2 {
            value: self.value - rhs.value,
            dt: self.dt - rhs.dt,
            ds: self.ds - rhs.ds,
            dtt: self.dtt - rhs.dtt,
            dts: self.dts - rhs.dts,
            dss: self.dss - rhs.dss,
        }
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        // Second-order product rule.
        Jet2 {
            value: self.value * rhs.value,
            dt: self.dt * rhs.value + self.value * rhs.dt,
            ds: self.ds * rhs.value + self.value * rhs.ds,
            dtt: self.dtt * rhs.value + 2.0 * self.dt * rhs.dt + self.value * rhs.dtt,
            dts: self.dts * rhs.value + self.dt * rhs.ds + self.ds * rhs.dt + self.value * rhs.dts,
            dss: self.dss * rhs.value + 2.0 * self.ds * rhs.ds + self.value * rhs.dss,
        }
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        Jet2 {
            value: -self.value,
            dt: -self.dt,
            ds: -self.ds,
            dtt: -self.dtt,
            dts: -self.dts,
            dss: -self.dss,
        }
    }
}
