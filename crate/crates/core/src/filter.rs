//! One-sided filters `c_j, j >= 0`, of linear processes.
//!
//! Besides coefficient access, a filter knows the power sums `sum |c_j|^p`
//! and their tails in closed form, and evaluates pair series
//! `sum_j K(c_j, c_{j+n})` with a certified truncation error.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::zeta::{dirichlet_eta, hurwitz_zeta, riemann_zeta};
use crate::numeric::{smooth_tail_sum, Certified, CompensatedSum};
use crate::spectral::{check_alpha, signed_pow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SignPattern {
    Constant,
    Alternating,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum C0Mode {
    Value(f64),
    /// `c_0 = -sum_{k >= 1} c_k`.
    ZeroSum,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Family1D {
    Explicit(Vec<f64>),
    /// `c_j = base^{-j}`.
    Geometric { base: f64 },
    /// `c_j = sigma_j j^{-beta}` for `j >= 1`, `sigma_j = 1` or `(-1)^j`.
    Hyperbolic {
        beta: f64,
        sign: SignPattern,
        c0: C0Mode,
    },
}

/// A filter with the index of stability it is used with.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Filter1D {
    family: Family1D,
    alpha: f64,
    scale: f64,
    /// Resolved `c_0` before scaling (hyperbolic family only).
    c0: f64,
}

/// Smallest cut-off tried for hyperbolic tails.
const MIN_CUTOFF: usize = 1024;
/// Largest cut-off before giving up on a tolerance.
const MAX_CUTOFF: usize = 1 << 26;

impl Filter1D {
    pub fn explicit(coeffs: Vec<f64>, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if coeffs.is_empty() {
            return Err(Error::invalid("coefficients", "explicit filter needs at least one coefficient"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("coefficients", "must be finite"));
        }
        Ok(Self {
            family: Family1D::Explicit(coeffs),
            alpha,
            scale: 1.0,
            c0: 0.0,
        })
    }

    pub fn geometric(base: f64, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(base > 1.0 && base.is_finite()) {
            return Err(Error::invalid("base", format!("must exceed 1, got {base}")));
        }
        Ok(Self {
            family: Family1D::Geometric { base },
            alpha,
            scale: 1.0,
            c0: 1.0,
        })
    }

    pub fn hyperbolic(beta: f64, sign: SignPattern, c0: C0Mode, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::invalid("beta", format!("must be positive, got {beta}")));
        }
        check_summable(beta, alpha)?;
        let c0v = match (c0, sign) {
            (C0Mode::Value(v), _) => {
                if !v.is_finite() {
                    return Err(Error::invalid("c0", "must be finite"));
                }
                v
            }
            (C0Mode::ZeroSum, SignPattern::Constant) => {
                if beta <= 1.0 {
                    return Err(Error::Certificate(format!(
                        "zero-sum filter with constant sign needs beta > 1, got {beta}"
                    )));
                }
                -riemann_zeta(beta)
            }
            // sum_{k>=1} (-1)^k k^{-beta} = -eta(beta), convergent for every beta > 0
            (C0Mode::ZeroSum, SignPattern::Alternating) => dirichlet_eta(beta),
        };
        Ok(Self {
            family: Family1D::Hyperbolic { beta, sign, c0 },
            alpha,
            scale: 1.0,
            c0: c0v,
        })
    }

    pub fn family(&self) -> &Family1D {
        &self.family
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Common multiplier applied to every coefficient.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Same coefficients used with another `alpha`.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if let Family1D::Hyperbolic { beta, .. } = self.family {
            check_summable(beta, alpha)?;
        }
        Ok(Self {
            alpha,
            ..self.clone()
        })
    }

    /// The filter `c * c_j`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c != 0.0 && c.is_finite()) {
            return Err(Error::invalid("c", "scale must be non-zero and finite"));
        }
        Ok(Self {
            scale: self.scale * c,
            ..self.clone()
        })
    }

    /// Number of coefficients for finite filters.
    pub fn support_len(&self) -> Option<usize> {
        match &self.family {
            Family1D::Explicit(c) => Some(c.len()),
            _ => None,
        }
    }

    /// `beta` of a hyperbolic filter.
    pub fn hyperbolic_beta(&self) -> Option<f64> {
        match self.family {
            Family1D::Hyperbolic { beta, .. } => Some(beta),
            _ => None,
        }
    }

    /// Coefficient `c_j` (zero past the end of an explicit filter).
    pub fn coefficient(&self, j: usize) -> f64 {
        self.scale * self.unscaled(j)
    }

    fn unscaled(&self, j: usize) -> f64 {
        match &self.family {
            Family1D::Explicit(c) => c.get(j).copied().unwrap_or(0.0),
            Family1D::Geometric { base } => base.powi(-(j.min(i32::MAX as usize) as i32)),
            Family1D::Hyperbolic { beta, sign, .. } => {
                if j == 0 {
                    self.c0
                } else {
                    let v = (j as f64).powf(-beta);
                    match sign {
                        SignPattern::Alternating if j % 2 == 1 => -v,
                        _ => v,
                    }
                }
            }
        }
    }

    /// `c_0, ..., c_{len-1}`.
    pub fn coefficients(&self, len: usize) -> Vec<f64> {
        match &self.family {
            Family1D::Geometric { base } => {
                let r = base.recip();
                let mut v = Vec::with_capacity(len);
                let mut c = self.scale;
                for _ in 0..len {
                    v.push(c);
                    c *= r;
                }
                v
            }
            _ => (0..len).map(|j| self.coefficient(j)).collect(),
        }
    }

    /// `sum_{j >= start} |c_j|^p`; infinite when the series diverges.
    pub fn power_tail(&self, p: f64, start: usize) -> f64 {
        let s = self.scale.abs().powf(p);
        match &self.family {
            Family1D::Explicit(c) => c
                .iter()
                .skip(start)
                .map(|x| abs_pow(x * self.scale, p))
                .sum::<CompensatedSum>()
                .value(),
            Family1D::Geometric { base } => {
                let q = base.powf(-p);
                s * q.powf(start as f64) / (1.0 - q)
            }
            Family1D::Hyperbolic { beta, .. } => {
                let bp = beta * p;
                let head = if start == 0 { abs_pow(self.coefficient(0), p) } else { 0.0 };
                if bp <= 1.0 {
                    return f64::INFINITY;
                }
                head + s * hurwitz_zeta(bp, start.max(1) as f64)
            }
        }
    }

    /// `sum_j |c_j|^p`.
    pub fn power_sum(&self, p: f64) -> f64 {
        self.power_tail(p, 0)
    }

    /// `A = sum_j |c_j|^alpha`.
    pub fn alpha_norm(&self) -> f64 {
        self.power_sum(self.alpha)
    }

    /// `sum_j c_j` when the series converges.
    pub fn coefficient_sum(&self) -> Option<f64> {
        match &self.family {
            Family1D::Explicit(c) => {
                Some(self.scale * c.iter().copied().sum::<CompensatedSum>().value())
            }
            Family1D::Geometric { base } => Some(self.scale / (1.0 - base.recip())),
            Family1D::Hyperbolic { beta, sign, c0 } => {
                if matches!(c0, C0Mode::ZeroSum) {
                    return Some(0.0);
                }
                match sign {
                    SignPattern::Constant if *beta > 1.0 => {
                        Some(self.scale * (self.c0 + riemann_zeta(*beta)))
                    }
                    SignPattern::Constant => None,
                    SignPattern::Alternating => Some(self.scale * (self.c0 - dirichlet_eta(*beta))),
                }
            }
        }
    }

    /// Smallest `J` with `sum_{j >= J} |c_j|^p <= tol`.
    pub fn truncation_point(&self, p: f64, tol: f64) -> Result<usize> {
        if !(tol > 0.0) {
            return Err(Error::invalid("tol", "must be positive"));
        }
        match &self.family {
            Family1D::Explicit(c) => {
                let mut tail = 0.0;
                for j in (0..c.len()).rev() {
                    tail += abs_pow(c[j] * self.scale, p);
                    if tail > tol {
                        return Ok(j + 1);
                    }
                }
                Ok(0)
            }
            Family1D::Geometric { base } => {
                let total = self.power_tail(p, 0);
                if total <= tol {
                    return Ok(0);
                }
                let mut j = ((total / tol).ln() / (p * base.ln())).ceil().max(0.0) as usize;
                while j > 0 && self.power_tail(p, j - 1) <= tol {
                    j -= 1;
                }
                while self.power_tail(p, j) > tol {
                    j += 1;
                }
                Ok(j)
            }
            Family1D::Hyperbolic { beta, .. } => {
                let bp = beta * p;
                if bp <= 1.0 {
                    return Err(Error::Certificate(format!("sum |c_j|^{p} diverges (beta p = {bp})")));
                }
                // tail ~ s J^{1-bp} / (bp - 1)
                let s = self.scale.abs().powf(p);
                let guess = (s / (tol * (bp - 1.0))).powf(1.0 / (bp - 1.0));
                if !(guess < MAX_CUTOFF as f64 * 64.0) {
                    return Err(Error::ToleranceUnreachable {
                        tol,
                        reason: format!("truncation needs about {guess:.3e} coefficients"),
                    });
                }
                let mut hi = (guess.ceil() as usize).max(1);
                while self.power_tail(p, hi) > tol {
                    hi *= 2;
                }
                let mut lo = 0usize;
                while lo < hi {
                    let mid = (lo + hi) / 2;
                    if self.power_tail(p, mid) <= tol {
                        hi = mid;
                    } else {
                        lo = mid + 1;
                    }
                }
                Ok(lo)
            }
        }
    }

    /// `sum_{j >= 0} K(c_j, c_{j+n})` with truncation error at most `tol`.
    pub(crate) fn pair_series(&self, kernel: PairKernel, n: usize, tol: f64) -> Result<Certified> {
        let a = self.alpha;
        self.pair_series_fn(|x, y| kernel.eval(x, y, a), kernel.bound_const(a), n, tol)
    }

    /// `sum_{j >= 0} g(c_j, c_{j+n})` for `g` even under `(x, y) -> (-x, -y)`,
    /// homogeneous of degree `alpha` and bounded by `k (|x|^alpha + |y|^alpha)`.
    pub(crate) fn pair_series_fn<G>(&self, g: G, k: f64, n: usize, tol: f64) -> Result<Certified>
    where
        G: Fn(f64, f64) -> f64,
    {
        if !(tol > 0.0) {
            return Err(Error::invalid("tol", "must be positive"));
        }
        let a = self.alpha;
        match &self.family {
            Family1D::Explicit(c) => {
                let s = self.scale;
                let acc: CompensatedSum = (0..c.len())
                    .map(|j| g(s * c[j], s * c.get(j + n).copied().unwrap_or(0.0)))
                    .sum();
                Ok(Certified::exact(acc.value()))
            }
            Family1D::Geometric { .. } => {
                let mut j = self.truncation_point(a, tol / (2.0 * k))?;
                let tail = |j: usize| k * (self.power_tail(a, j) + self.power_tail(a, j + n));
                while tail(j) > tol {
                    j += 1;
                }
                let c = self.coefficients(j + n);
                let acc: CompensatedSum = (0..j).map(|i| g(c[i], c[i + n])).sum();
                Ok(Certified {
                    value: acc.value(),
                    bound: tail(j),
                })
            }
            Family1D::Hyperbolic { .. } => {
                let start = MIN_CUTOFF.max(8 * n).next_power_of_two();
                self.hyperbolic_pair_series(g, n, tol, start)
            }
        }
    }

    /// Direct sum below `start` (doubling while needed), smooth tail above.
    pub(crate) fn hyperbolic_pair_series<G>(&self, g: G, n: usize, tol: f64, start: usize) -> Result<Certified>
    where
        G: Fn(f64, f64) -> f64,
    {
        let Family1D::Hyperbolic { beta, sign, .. } = self.family else {
            return Err(Error::Unsupported("smooth tails need a hyperbolic filter".into()));
        };
        let a = self.alpha;
        let s = self.scale;
        let sigma = match sign {
            SignPattern::Alternating if n % 2 == 1 => -1.0,
            _ => 1.0,
        };
        let smooth = |x: f64| g(s * x.powf(-beta), s * sigma * (x + n as f64).powf(-beta));
        let mut head = CompensatedSum::new();
        let mut done = 0usize;
        let mut cut = start.max(1);
        loop {
            for j in done..cut {
                head.add(g(self.coefficient(j), self.coefficient(j + n)));
            }
            done = cut;
            let tail = smooth_tail_sum(smooth, cut as f64, beta * a, 0.5 * tol)?;
            if tail.bound <= 0.5 * tol || cut >= MAX_CUTOFF {
                if tail.bound > tol {
                    return Err(Error::ToleranceUnreachable {
                        tol,
                        reason: format!("tail bound {:.3e} at cut-off {cut}", tail.bound),
                    });
                }
                return Ok(Certified {
                    value: head.value() + tail.value,
                    bound: tail.bound,
                });
            }
            cut *= 2;
        }
    }
}

fn check_summable(beta: f64, alpha: f64) -> Result<()> {
    if beta * alpha > 1.0 {
        Ok(())
    } else {
        Err(Error::Certificate(format!(
            "sum |c_j|^alpha diverges: beta * alpha = {} <= 1",
            beta * alpha
        )))
    }
}

#[inline]
pub(crate) fn abs_pow(x: f64, p: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if p == 2.0 {
        x * x
    } else {
        x.abs().powf(p)
    }
}

/// Summands of the pair series. Each is even under `(x, y) -> (-x, -y)` and
/// homogeneous of degree `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum PairKernel {
    /// `x y |(x, y)|^{alpha-2}`
    Rho,
    /// `x^2 |(x, y)|^{alpha-2}`
    First,
    /// `y^2 |(x, y)|^{alpha-2}`
    Second,
    /// `|x|^alpha + |y|^alpha - |x - y|^alpha`
    Codifference,
    /// `y x^<alpha-1>`
    Covariation,
}

impl PairKernel {
    #[inline]
    pub(crate) fn eval(self, x: f64, y: f64, alpha: f64) -> f64 {
        match self {
            PairKernel::Rho | PairKernel::First | PairKernel::Second => {
                let q = x * x + y * y;
                if q == 0.0 {
                    return 0.0;
                }
                let w = if alpha == 2.0 { 1.0 } else { q.powf(0.5 * alpha - 1.0) };
                match self {
                    PairKernel::Rho => x * y * w,
                    PairKernel::First => x * x * w,
                    _ => y * y * w,
                }
            }
            PairKernel::Codifference => {
                abs_pow(x, alpha) + abs_pow(y, alpha) - abs_pow(x - y, alpha)
            }
            PairKernel::Covariation => y * signed_pow(x, alpha - 1.0),
        }
    }

    /// `K` with `|kernel(x, y)| <= K (|x|^alpha + |y|^alpha)`.
    pub(crate) fn bound_const(self, alpha: f64) -> f64 {
        match self {
            PairKernel::Rho => 0.5,
            PairKernel::First | PairKernel::Second | PairKernel::Covariation => 1.0,
            PairKernel::Codifference => 2f64.powf(alpha - 1.0).max(1.0),
        }
    }
}
