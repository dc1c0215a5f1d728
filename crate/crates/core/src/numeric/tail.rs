//! Certified tails of slowly decaying series.
//!
//! Hyperbolic filters make the dependence series converge like `j^{-p}` with
//! `p` barely above one, far too slowly to truncate. Past a cut-off the
//! summand is a smooth convex function of a continuous index, and
//!
//! ```text
//! sum_{j >= J} g(j) = int_J^inf g + g(J)/2 + E,   0 <= E <= |g'(J)| / 8
//! ```
//!
//! (trapezoid error of a convex function telescopes). Convexity also gives
//! `|g'(J)| <= 2 (g(J - 1/2) - g(J))`, so everything is computable from
//! values of `g`. The integral uses the substitution `x = J v^{-1/(p-1)}`,
//! under which an exact power law becomes a constant integrand.

use super::quad::{integrate, Quadrature};
use crate::error::{Error, Result};

/// A value with a certified absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Certified {
    pub value: f64,
    pub bound: f64,
}

impl Certified {
    pub const ZERO: Certified = Certified {
        value: 0.0,
        bound: 0.0,
    };

    pub fn exact(value: f64) -> Self {
        Self { value, bound: 0.0 }
    }
}

impl std::ops::Add for Certified {
    type Output = Certified;
    fn add(self, rhs: Certified) -> Certified {
        Certified {
            value: self.value + rhs.value,
            bound: self.bound + rhs.bound,
        }
    }
}

/// `sum_{j >= start} g(j)` for `g` of constant sign whose magnitude is
/// decreasing and convex on `[start - 1/2, inf)` and decays like `x^{-decay}`.
pub fn smooth_tail_sum<G: Fn(f64) -> f64>(g: G, start: f64, decay: f64, tol: f64) -> Result<Certified> {
    if !(decay > 1.0) {
        return Err(Error::Certificate(format!(
            "tail decay exponent {decay} must exceed 1"
        )));
    }
    if !(start >= 1.0) {
        return Err(Error::invalid("start", "tail must start at index >= 1"));
    }
    let g0 = g(start);
    if g0 == 0.0 {
        let probe = g(2.0 * start);
        if probe == 0.0 {
            return Ok(Certified::ZERO);
        }
    }
    let sign = if g0 < 0.0 { -1.0 } else { 1.0 };
    let h = |x: f64| sign * g(x);
    let h0 = sign * g0;
    let h_half = h(start - 0.5);
    let slope_bound = 2.0 * (h_half - h0).max(0.0);
    let euler = slope_bound / 8.0;

    let q = decay - 1.0;
    let scale = start / q;
    let integrand = |v: f64| {
        if v <= 0.0 {
            return 0.0;
        }
        let r = v.powf(-1.0 / q);
        let x = start * r;
        if !x.is_finite() {
            return 0.0;
        }
        let hx = h(x);
        if hx == 0.0 {
            return 0.0;
        }
        let val = hx * r.powf(decay) * scale;
        if val.is_finite() {
            val
        } else {
            0.0
        }
    };
    let opts = Quadrature {
        abs_tol: 0.25 * tol,
        rel_tol: 1e-13,
        ..Quadrature::default()
    };
    let integral = integrate(integrand, 0.0, 1.0, opts)?;
    Ok(Certified {
        value: sign * (integral.value + 0.5 * h0 + 0.5 * euler),
        bound: 0.5 * euler + integral.error,
    })
}
