//! Dependence measures of SαS stochastic integrals
//! `(X_1, X_2) = (int f_1 dM, int f_2 dM)` for a control measure `m` that is
//! either Lebesgue measure on an interval or counting measure on integers.
//!
//! With `|f(x)| = (f_1(x)^2 + f_2(x)^2)^{1/2}`:
//!
//! ```text
//! rho  = int f_1 f_2 |f|^{alpha-2} dm
//! tau  = int (|f_1|^alpha + |f_2|^alpha - |f_1 - f_2|^alpha) dm
//! [X_1, X_2] = int f_1 f_2^<alpha-1> dm
//! ```
//!
//! The integrand is taken as zero where `|f| = 0`. The Ornstein–Uhlenbeck
//! process `X(t) = int_{-inf}^t exp(-lambda (t - x)) M(dx)` has all of these
//! in closed form.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::filter::{abs_pow, Filter1D, PairKernel};
use crate::numeric::{integrate_with_breaks, Certified, CompensatedSum, Quadrature};
use crate::process::correlation_ratio;
use crate::spectral::check_alpha;

/// Re-entrant real function.
pub type Kernel = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Control measure together with the part of its support that matters.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// Lebesgue measure on `[lower, upper]` with kernel discontinuities at
    /// `breakpoints`.
    Lebesgue {
        lower: f64,
        upper: f64,
        breakpoints: Vec<f64>,
    },
    /// Counting measure on the integers in `[lower, upper]`; `None` is unbounded.
    Counting {
        lower: Option<i64>,
        upper: Option<i64>,
    },
}

#[derive(Clone)]
pub struct KernelPair {
    pub f1: Kernel,
    pub f2: Kernel,
    pub alpha: f64,
    pub domain: Domain,
}

impl std::fmt::Debug for KernelPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KernelPair")
            .field("alpha", &self.alpha)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

/// Largest number of lattice points visited by a counting-measure sum.
const MAX_LATTICE_TERMS: u64 = 1 << 27;
const FIRST_BLOCK: u64 = 64;

impl KernelPair {
    pub fn lebesgue(
        f1: Kernel,
        f2: Kernel,
        alpha: f64,
        lower: f64,
        upper: f64,
        breakpoints: Vec<f64>,
    ) -> Result<Self> {
        check_alpha(alpha)?;
        if lower.is_nan() || upper.is_nan() || lower >= upper {
            return Err(Error::invalid("domain", "need lower < upper"));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::invalid("breakpoints", "must be finite"));
        }
        Ok(Self {
            f1,
            f2,
            alpha,
            domain: Domain::Lebesgue {
                lower,
                upper,
                breakpoints,
            },
        })
    }

    pub fn counting(f1: Kernel, f2: Kernel, alpha: f64, lower: Option<i64>, upper: Option<i64>) -> Result<Self> {
        check_alpha(alpha)?;
        if let (Some(l), Some(u)) = (lower, upper) {
            if l > u {
                return Err(Error::invalid("domain", "need lower <= upper"));
            }
        }
        Ok(Self {
            f1,
            f2,
            alpha,
            domain: Domain::Counting { lower, upper },
        })
    }

    /// `(X(0), X(t))` of the moving average `X(s) = int f(s - x) M(dx)`, for
    /// `f` supported on `[lo, hi]` with discontinuities at `breaks`.
    pub fn moving_average(f: Kernel, t: f64, alpha: f64, lo: f64, hi: f64, breaks: &[f64]) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::invalid("t", "must be finite"));
        }
        let lower = (-hi).min(t - hi);
        let upper = (-lo).max(t - lo);
        let mut points: Vec<f64> = Vec::new();
        for &b in breaks.iter().chain([lo, hi].iter()) {
            if b.is_finite() {
                points.push(-b);
                points.push(t - b);
            }
        }
        let f_1 = f.clone();
        KernelPair::lebesgue(
            Arc::new(move |x| f_1(-x)),
            Arc::new(move |x| f(t - x)),
            alpha,
            lower,
            upper,
            points,
        )
    }

    /// `(X_0, X_n)` of a linear process as integrals against counting
    /// measure: `f_1(k) = c_{-k}`, `f_2(k) = c_{n-k}`.
    pub fn linear_process(f: &Filter1D, n: usize) -> Result<Self> {
        let a = f.clone();
        let b = f.clone();
        let n = n as i64;
        let coef = |g: &Filter1D, j: i64| if j < 0 { 0.0 } else { g.coefficient(j as usize) };
        let lower = f.support_len().map(|len| -(len as i64));
        KernelPair::counting(
            Arc::new(move |k| coef(&a, -(k as i64))),
            Arc::new(move |k| coef(&b, n - k as i64)),
            f.alpha(),
            lower,
            Some(n),
        )
    }

    fn integrate_fn<G: Fn(f64, f64) -> f64>(&self, g: G, tol: f64) -> Result<Certified> {
        if !(tol > 0.0) {
            return Err(Error::invalid("tol", "must be positive"));
        }
        let h = |x: f64| g((self.f1)(x), (self.f2)(x));
        match &self.domain {
            Domain::Lebesgue {
                lower,
                upper,
                breakpoints,
            } => {
                let mut points = vec![*lower];
                let mut inner: Vec<f64> = breakpoints
                    .iter()
                    .copied()
                    .filter(|b| b > lower && b < upper)
                    .collect();
                inner.sort_by(f64::total_cmp);
                inner.dedup();
                points.extend(inner);
                points.push(*upper);
                let r = integrate_with_breaks(h, &points, Quadrature::with_abs_tol(tol))?;
                Ok(Certified {
                    value: r.value,
                    bound: r.error,
                })
            }
            Domain::Counting { lower, upper } => lattice_sum(|k| h(k as f64), *lower, *upper, tol),
        }
    }

    fn kernel_integral(&self, kernel: PairKernel, tol: f64) -> Result<Certified> {
        let a = self.alpha;
        self.integrate_fn(|x, y| kernel.eval(x, y, a), tol)
    }

    /// `(int |f_1|^alpha dm, int |f_2|^alpha dm)`, the scale parameters of
    /// the two marginals.
    pub fn alpha_norms(&self, tol: f64) -> Result<(Certified, Certified)> {
        let a = self.alpha;
        Ok((
            self.integrate_fn(|x, _| abs_pow(x, a), tol)?,
            self.integrate_fn(|_, y| abs_pow(y, a), tol)?,
        ))
    }
}

/// Sum `h(k)` over the integers in `[lower, upper]`. Unbounded directions
/// are summed in doubling blocks until a block contributes less than
/// `tol / 4` in absolute value; that block's size is the reported error.
pub fn lattice_sum<H: Fn(i64) -> f64>(h: H, lower: Option<i64>, upper: Option<i64>, tol: f64) -> Result<Certified> {
    match (lower, upper) {
        (Some(l), Some(u)) => {
            if (u - l) as u64 > MAX_LATTICE_TERMS {
                return Err(Error::invalid("domain", "lattice range too large"));
            }
            let s: CompensatedSum = (l..=u).map(&h).sum();
            Ok(Certified::exact(s.value()))
        }
        (Some(l), None) => outward(|j| h(l + j), tol),
        (None, Some(u)) => outward(|j| h(u - j), tol),
        (None, None) => {
            let right = outward(&h, 0.5 * tol)?;
            let left = outward(|j| h(-1 - j), 0.5 * tol)?;
            Ok(right + left)
        }
    }
}

fn outward<H: Fn(i64) -> f64>(h: H, tol: f64) -> Result<Certified> {
    let mut acc = CompensatedSum::new();
    let mut start = 0u64;
    let mut size = FIRST_BLOCK;
    let mut quiet = 0;
    loop {
        let mut block = CompensatedSum::new();
        let mut mag = 0.0;
        for j in start..start + size {
            let v = h(j as i64);
            block.add(v);
            mag += v.abs();
        }
        acc.add(block.value());
        start += size;
        if mag <= 0.25 * tol {
            quiet += 1;
            if quiet >= 2 {
                return Ok(Certified {
                    value: acc.value(),
                    bound: mag,
                });
            }
        } else {
            quiet = 0;
        }
        if start >= MAX_LATTICE_TERMS {
            return Err(Error::NoConvergence { error: mag, tol });
        }
        size *= 2;
    }
}

/// α-covariance `int f_1 f_2 |f|^{alpha-2} dm`.
pub fn alpha_cov_integral(k: &KernelPair, tol: f64) -> Result<Certified> {
    k.kernel_integral(PairKernel::Rho, tol)
}

/// α-correlation of the two integrals.
pub fn alpha_corr_integral(k: &KernelPair, tol: f64) -> Result<Certified> {
    let rho = k.kernel_integral(PairKernel::Rho, tol)?;
    let d1 = k.kernel_integral(PairKernel::First, tol)?;
    let d2 = k.kernel_integral(PairKernel::Second, tol)?;
    correlation_ratio(rho, d1, d2)
}

pub fn codifference_integral(k: &KernelPair, tol: f64) -> Result<Certified> {
    k.kernel_integral(PairKernel::Codifference, tol)
}

/// Covariation of `X_1` on `X_2`, `int f_1 f_2^<alpha-1> dm`.
pub fn covariation_integral(k: &KernelPair, tol: f64) -> Result<Certified> {
    if k.alpha <= 1.0 {
        return Err(Error::UnsupportedOrder { alpha: k.alpha });
    }
    // the pair kernel is y x^<a-1>; swap to get f_1 f_2^<a-1>
    let a = k.alpha;
    k.integrate_fn(|x, y| PairKernel::Covariation.eval(y, x, a), tol)
}

/// Ornstein–Uhlenbeck parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OUParams {
    pub lambda: f64,
    pub alpha: f64,
}

impl OUParams {
    pub fn new(lambda: f64, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::invalid("lambda", format!("must be positive, got {lambda}")));
        }
        Ok(Self { lambda, alpha })
    }
}

/// Kernels `f_1 = e^{lambda x} 1(x <= 0)`, `f_2 = e^{lambda (x - t)} 1(x <= t)`.
pub fn ou_kernels(p: OUParams, t: f64) -> Result<KernelPair> {
    let l = p.lambda;
    KernelPair::lebesgue(
        Arc::new(move |x| if x <= 0.0 { (l * x).exp() } else { 0.0 }),
        Arc::new(move |x| if x <= t { (l * (x - t)).exp() } else { 0.0 }),
        p.alpha,
        f64::NEG_INFINITY,
        t.max(0.0),
        vec![0.0, t],
    )
}

/// `rho(t) = e^{-lambda t} / (alpha lambda (1 + e^{-2 lambda t})^{(2-alpha)/2})`.
pub fn ou_rho(t: f64, p: OUParams) -> f64 {
    let t = t.abs();
    let e = (-p.lambda * t).exp();
    e / (p.alpha * p.lambda * (1.0 + e * e).powf(1.0 - 0.5 * p.alpha))
}

/// `rho(t) / rho(0)`.
pub fn ou_rho_normalized(t: f64, p: OUParams) -> f64 {
    let t = t.abs();
    let e = (-p.lambda * t).exp();
    e / (0.5 * (1.0 + e * e)).powf(1.0 - 0.5 * p.alpha)
}

/// `lim rho_bar(t) e^{lambda t} = 2^{(2-alpha)/2}`.
pub fn ou_rho_asymptote(p: OUParams) -> f64 {
    2f64.powf(1.0 - 0.5 * p.alpha)
}

/// `tau(t) = (1 - (1 - e^{-lambda t})^alpha + e^{-alpha lambda t}) / (alpha lambda)`.
pub fn ou_codifference(t: f64, p: OUParams) -> f64 {
    ou_codifference_normalized(t, p) / (p.alpha * p.lambda)
}

/// Codifference divided by the scale `1 / (alpha lambda)` of `X(0)`.
pub fn ou_codifference_normalized(t: f64, p: OUParams) -> f64 {
    let t = t.abs();
    let a = p.alpha;
    // 1 - (1 - e)^a computed as -expm1(a ln(1 - e)) to keep small-e accuracy
    let e = (-p.lambda * t).exp();
    let one_minus = -(a * (-e).ln_1p()).exp_m1();
    one_minus + (-a * p.lambda * t).exp()
}

/// `tau_bar(t) ~ constant * exp(-rate t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Asymptote {
    pub rate: f64,
    pub constant: f64,
}

pub fn ou_codifference_normalized_asymptote(p: OUParams) -> Asymptote {
    let (a, l) = (p.alpha, p.lambda);
    if a > 1.0 {
        Asymptote { rate: l, constant: a }
    } else if a == 1.0 {
        Asymptote { rate: l, constant: 2.0 }
    } else {
        Asymptote {
            rate: a * l,
            constant: 1.0,
        }
    }
}

/// One row of the OU table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OURow {
    pub t: f64,
    pub rho: f64,
    pub rho_normalized: f64,
    pub codifference: f64,
    pub codifference_normalized: f64,
}

pub fn ou_row(t: f64, p: OUParams) -> OURow {
    OURow {
        t,
        rho: ou_rho(t, p),
        rho_normalized: ou_rho_normalized(t, p),
        codifference: ou_codifference(t, p),
        codifference_normalized: ou_codifference_normalized(t, p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::{C0Mode, SignPattern};
    use crate::process::{codifference_n, rho_n};

    fn ou(l: f64, a: f64) -> OUParams {
        OUParams::new(l, a).unwrap()
    }

    fn indicator(lo: f64, hi: f64) -> Kernel {
        Arc::new(move |x| if x >= lo && x <= hi { 1.0 } else { 0.0 })
    }

    #[test]
    fn disjoint_supports_give_zero() {
        let k = KernelPair::lebesgue(indicator(0.0, 1.0), indicator(2.0, 3.0), 1.2, -1.0, 4.0, vec![0.0, 1.0, 2.0, 3.0])
            .unwrap();
        assert!(alpha_cov_integral(&k, 1e-10).unwrap().value.abs() < 1e-12);
        assert!(alpha_corr_integral(&k, 1e-10).unwrap().value.abs() < 1e-12);
        assert!(codifference_integral(&k, 1e-10).unwrap().value.abs() < 1e-12);
        assert!(covariation_integral(&k, 1e-10).unwrap().value.abs() < 1e-12);
    }

    #[test]
    fn identical_kernels_have_unit_correlation() {
        let f: Kernel = Arc::new(|x: f64| (-x * x).exp());
        let k = KernelPair::lebesgue(f.clone(), f, 0.8, f64::NEG_INFINITY, f64::INFINITY, vec![]).unwrap();
        assert!((alpha_corr_integral(&k, 1e-10).unwrap().value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn ou_quadrature_matches_closed_forms() {
        for &(l, a, t) in &[(1.0, 1.0, 1.0), (0.5, 0.5, 2.0), (2.0, 1.5, 0.5), (1.0, 2.0, 5.0)] {
            let p = ou(l, a);
            let k = ou_kernels(p, t).unwrap();
            let r = alpha_cov_integral(&k, 1e-10).unwrap();
            assert!((r.value - ou_rho(t, p)).abs() < 1e-8, "rho l={l} a={a} t={t}");
            let c = codifference_integral(&k, 1e-10).unwrap();
            assert!((c.value - ou_codifference(t, p)).abs() < 1e-8, "tau l={l} a={a} t={t}");
            let (n1, _) = k.alpha_norms(1e-10).unwrap();
            assert!((n1.value - 1.0 / (a * l)).abs() < 1e-8);
        }
    }

    fn midpoint_corr(p: OUParams, t: f64) -> f64 {
        let (l, a) = (p.lambda, p.alpha);
        let (mut r, mut d1, mut d2) = (0.0, 0.0, 0.0);
        for (lo, hi) in [(-60.0 / l, 0.0), (0.0, t)] {
            let n = 2_000_000;
            let h = (hi - lo) / n as f64;
            for i in 0..n {
                let x = lo + (i as f64 + 0.5) * h;
                let f1 = if x <= 0.0 { (l * x).exp() } else { 0.0 };
                let f2 = (l * (x - t)).exp();
                let w = (f1 * f1 + f2 * f2).powf(0.5 * a - 1.0) * h;
                r += f1 * f2 * w;
                d1 += f1 * f1 * w;
                d2 += f2 * f2 * w;
            }
        }
        r / (d1 * d2).sqrt()
    }

    #[test]
    fn ou_correlation_matches_midpoint_oracle() {
        let p = ou(1.0, 1.5);
        for &t in &[0.3, 1.0, 4.0] {
            let k = ou_kernels(p, t).unwrap();
            let rt = alpha_corr_integral(&k, 1e-11).unwrap().value;
            assert!((rt - midpoint_corr(p, t)).abs() < 1e-6, "t={t}: {rt}");
            assert!(rt > 0.0 && rt < 1.0);
        }
    }

    #[test]
    fn ou_special_values() {
        for &a in &[0.5, 1.0, 1.5, 2.0] {
            let p = ou(0.7, a);
            let r0 = (a * 0.7f64).recip() * 2f64.powf((a - 2.0) / 2.0);
            assert!((ou_rho(0.0, p) - r0).abs() < 1e-15);
            assert_eq!(ou_rho_normalized(0.0, p), 1.0);
            assert_eq!(ou_rho(-1.3, p), ou_rho(1.3, p));
            let t: f64 = 20.0 / 0.7;
            let asym = ou_rho_asymptote(p) * (-0.7 * t).exp();
            assert!((ou_rho_normalized(t, p) - asym).abs() < 1e-8 * asym.max(1e-300) + 1e-300);
        }
        let p = ou(1.3, 2.0);
        for &t in &[0.0, 0.5, 2.0] {
            assert!((ou_rho_normalized(t, p) - (-1.3 * t).exp()).abs() < 1e-15);
            assert!((ou_rho(t, p) - 0.5 * ou_codifference(t, p)).abs() < 1e-15);
        }
    }

    #[test]
    fn codifference_asymptotes() {
        for &(a, rate_mult, constant) in &[(1.5, 1.0, 1.5), (1.0, 1.0, 2.0), (0.5, 0.5, 1.0)] {
            let p = ou(1.0, a);
            let asym = ou_codifference_normalized_asymptote(p);
            assert!((asym.rate - rate_mult).abs() < 1e-15 && asym.constant == constant);
            let t = 40.0;
            let v = ou_codifference_normalized(t, p) * (asym.rate * t).exp();
            assert!((v - constant).abs() < 1e-6, "a={a}: {v}");
        }
    }

    #[test]
    fn asymptote_constant_is_continuous_and_bounded() {
        let mut prev = ou_rho_asymptote(ou(1.0, 0.01));
        for k in 2..=200 {
            let a = k as f64 * 0.01;
            let c = ou_rho_asymptote(ou(1.0, a));
            assert!((1.0..2.0).contains(&c));
            assert!((c - prev).abs() < 0.01);
            prev = c;
        }
        assert_eq!(ou_rho_asymptote(ou(1.0, 2.0)), 1.0);
    }

    #[test]
    fn lambda_monotonicity() {
        for &a in &[0.3, 1.0, 1.7, 2.0] {
            for &t in &[0.1, 1.0, 3.0] {
                let lams = [0.2, 0.5, 1.0, 2.0, 4.0];
                for w in lams.windows(2) {
                    assert!(ou_rho(t, ou(w[1], a)) < ou_rho(t, ou(w[0], a)));
                    assert!(ou_codifference(t, ou(w[1], a)) < ou_codifference(t, ou(w[0], a)));
                }
            }
        }
    }

    #[test]
    fn counting_measure_reproduces_linear_process() {
        let f = Filter1D::geometric(1.5, 1.3).unwrap();
        for n in [1usize, 4] {
            let k = KernelPair::linear_process(&f, n).unwrap();
            let via = alpha_cov_integral(&k, 1e-12).unwrap().value;
            let direct = rho_n(&f, n, 1e-13).unwrap().value;
            assert!((via - direct).abs() < 1e-11);
            let tau = codifference_integral(&k, 1e-12).unwrap().value;
            assert!((tau - codifference_n(&f, n, 1e-13).unwrap().value).abs() < 1e-11);
        }
        let e = Filter1D::explicit(vec![1.0, -0.5, 0.25], 0.9).unwrap();
        let k = KernelPair::linear_process(&e, 1).unwrap();
        assert!((alpha_cov_integral(&k, 1e-12).unwrap().value - rho_n(&e, 1, 1e-12).unwrap().value).abs() < 1e-15);
        let h = Filter1D::hyperbolic(2.5, SignPattern::Constant, C0Mode::Value(1.0), 1.5).unwrap();
        let k = KernelPair::linear_process(&h, 2).unwrap();
        let via = alpha_cov_integral(&k, 1e-8).unwrap().value;
        assert!((via - rho_n(&h, 2, 1e-12).unwrap().value).abs() < 1e-6);
    }

    #[test]
    fn gaussian_codifference_doubles_covariance() {
        let k = ou_kernels(ou(0.8, 2.0), 1.1).unwrap();
        let r = alpha_cov_integral(&k, 1e-11).unwrap().value;
        let c = codifference_integral(&k, 1e-11).unwrap().value;
        assert!((c - 2.0 * r).abs() < 1e-9);
    }

    #[test]
    fn moving_average_of_ou_kernel() {
        let l = 1.2;
        let f: Kernel = Arc::new(move |x: f64| if x >= 0.0 { (-l * x).exp() } else { 0.0 });
        let p = ou(l, 1.4);
        let k = KernelPair::moving_average(f, 0.9, 1.4, 0.0, f64::INFINITY, &[]).unwrap();
        assert!((alpha_cov_integral(&k, 1e-10).unwrap().value - ou_rho(0.9, p)).abs() < 1e-8);
    }

    #[test]
    fn covariation_requires_alpha_above_one() {
        let k = ou_kernels(ou(1.0, 1.0), 1.0).unwrap();
        assert!(matches!(covariation_integral(&k, 1e-10), Err(Error::UnsupportedOrder { .. })));
        // alpha = 2: covariation equals the alpha-covariance
        let k = ou_kernels(ou(1.0, 2.0), 1.0).unwrap();
        let c = covariation_integral(&k, 1e-11).unwrap().value;
        assert!((c - ou_rho(1.0, ou(1.0, 2.0))).abs() < 1e-9);
    }
}
