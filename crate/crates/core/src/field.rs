//! Dependence of `(X_{0,0}, X_{n,m})` for linear random fields
//! `X_{k,l} = sum_{i,j >= 0} c_{i,j} e_{k-i,l-j}`.
//!
//! Writing every lag through the single series
//!
//! ```text
//! S_K(n, m) = sum_{u,v >= 0} K(c_{u,v}, c_{u+n,v+m})      (c = 0 off the quadrant)
//! ```
//!
//! gives `rho_{n,m} = S_rho(n, m)` and the two denominators of the
//! α-correlation as `S_first(n, m)` and `S_first(-n, -m)`. The quadrant cases
//! `n > 0, m < 0` and `n < 0` are then index shifts of the same sum, and
//! `rho_{-n,-m} = rho_{n,m}` holds by relabeling.
//!
//! Product filters `c_{i,j} = a_i b_j` are summed as nested 1-D series: an
//! inner series over `v` for each `u`, and an outer series over `u` whose
//! tail is again certified from a continuous index.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::filter::{abs_pow, C0Mode, Family1D, Filter1D, PairKernel, SignPattern};
use crate::numeric::{Certified, CompensatedSum};
use crate::process::{correlation_ratio, hyperbolic_decay, DecayLaw};
use crate::spectral::{check_alpha, SpectralMeasure};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Family2D {
    /// Rows indexed by `i`, columns by `j`.
    Explicit(Vec<Vec<f64>>),
    /// `c_{i,j} = a_i b_j`.
    Product(Filter1D, Filter1D),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Filter2D {
    family: Family2D,
    alpha: f64,
}

impl Filter2D {
    pub fn explicit(rows: Vec<Vec<f64>>, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if rows.is_empty() || rows.iter().all(|r| r.is_empty()) {
            return Err(Error::invalid("coefficients", "explicit field filter is empty"));
        }
        if rows.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::invalid("coefficients", "must be finite"));
        }
        Ok(Self {
            family: Family2D::Explicit(rows),
            alpha,
        })
    }

    pub fn product(a: Filter1D, b: Filter1D) -> Result<Self> {
        if a.alpha() != b.alpha() {
            return Err(Error::invalid("alpha", "both factors must use the same alpha"));
        }
        let alpha = a.alpha();
        Ok(Self {
            family: Family2D::Product(a, b),
            alpha,
        })
    }

    /// `c_{i,j} = i^{-beta1} j^{-beta2}` with unit coefficients at index 0.
    pub fn product_hyperbolic(beta1: f64, beta2: f64, alpha: f64) -> Result<Self> {
        let f = |b| Filter1D::hyperbolic(b, SignPattern::Constant, C0Mode::Value(1.0), alpha);
        Self::product(f(beta1)?, f(beta2)?)
    }

    pub fn family(&self) -> &Family2D {
        &self.family
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn coefficient(&self, i: usize, j: usize) -> f64 {
        match &self.family {
            Family2D::Explicit(rows) => rows.get(i).and_then(|r| r.get(j)).copied().unwrap_or(0.0),
            Family2D::Product(a, b) => a.coefficient(i) * b.coefficient(j),
        }
    }

    /// `sum |c_{i,j}|^alpha`.
    pub fn alpha_norm(&self) -> f64 {
        match &self.family {
            Family2D::Explicit(rows) => rows
                .iter()
                .flatten()
                .map(|&c| abs_pow(c, self.alpha))
                .sum::<CompensatedSum>()
                .value(),
            Family2D::Product(a, b) => a.alpha_norm() * b.alpha_norm(),
        }
    }

    /// The filter `c * c_{i,j}`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let family = match &self.family {
            Family2D::Explicit(rows) => {
                if !(c != 0.0 && c.is_finite()) {
                    return Err(Error::invalid("c", "scale must be non-zero and finite"));
                }
                Family2D::Explicit(rows.iter().map(|r| r.iter().map(|x| x * c).collect()).collect())
            }
            Family2D::Product(a, b) => Family2D::Product(a.scaled(c)?, b.clone()),
        };
        Ok(Self {
            family,
            alpha: self.alpha,
        })
    }

    /// `S_K(n, m)` for the pair kernels `Rho` and `First`.
    fn lag_series(&self, kernel: PairKernel, n: i64, m: i64, tol: f64) -> Result<Certified> {
        let a = self.alpha;
        match &self.family {
            Family2D::Explicit(rows) => {
                let mut acc = CompensatedSum::new();
                for (u, row) in rows.iter().enumerate() {
                    for (v, &x) in row.iter().enumerate() {
                        let y = shifted(rows, u as i64 + n, v as i64 + m);
                        acc.add(kernel.eval(x, y, a));
                    }
                }
                Ok(Certified::exact(acc.value()))
            }
            Family2D::Product(fa, fb) => {
                let kc = kernel.bound_const(a);
                let big_a = fa.alpha_norm();
                let big_b = fb.alpha_norm();
                if big_a == 0.0 || big_b == 0.0 {
                    return Ok(Certified::ZERO);
                }
                // inner accuracy proportional to the size of the outer term
                let inner = |x: f64, y: f64| -> f64 {
                    let size = abs_pow(x, a) + abs_pow(y, a);
                    if size == 0.0 {
                        return 0.0;
                    }
                    let itol = 0.125 * tol * size / big_a;
                    let kx = kc * abs_pow(x, a).max(abs_pow(y, a));
                    signed_pair_series(fb, m, |p, q| kernel.eval(x * p, y * q, a), kx, itol)
                        .map(|c| c.value)
                        .unwrap_or(f64::NAN)
                };
                let out = signed_pair_series(fa, n, inner, kc * big_b, 0.5 * tol)?;
                if !out.value.is_finite() {
                    return Err(Error::ToleranceUnreachable {
                        tol,
                        reason: "inner series of the product filter failed".into(),
                    });
                }
                Ok(Certified {
                    value: out.value,
                    bound: out.bound + 0.25 * tol,
                })
            }
        }
    }
}

fn shifted(rows: &[Vec<f64>], i: i64, j: i64) -> f64 {
    if i < 0 || j < 0 {
        return 0.0;
    }
    rows.get(i as usize)
        .and_then(|r| r.get(j as usize))
        .copied()
        .unwrap_or(0.0)
}

/// `sum_{u >= 0} g(c_u, c_{u+n})` for a signed lag, `c` vanishing at
/// negative indices.
fn signed_pair_series<G>(f: &Filter1D, n: i64, g: G, k: f64, tol: f64) -> Result<Certified>
where
    G: Fn(f64, f64) -> f64,
{
    if n >= 0 {
        return f.pair_series_fn(g, k, n as usize, tol);
    }
    let lag = n.unsigned_abs() as usize;
    let head: CompensatedSum = (0..lag).map(|u| g(f.coefficient(u), 0.0)).sum();
    let rest = f.pair_series_fn(|x, y| g(y, x), k, lag, tol)?;
    Ok(Certified {
        value: head.value() + rest.value,
        bound: rest.bound,
    })
}

/// Map a lag onto `n > 0`, or `n = 0, m >= 0`, using `rho_{n,m} = rho_{-n,-m}`.
pub fn canonical_lag(n: i64, m: i64) -> (i64, i64) {
    if n < 0 || (n == 0 && m < 0) {
        (-n, -m)
    } else {
        (n, m)
    }
}

/// α-covariance `rho_{n,m}` of `(X_{0,0}, X_{n,m})`.
pub fn rho_nm(f: &Filter2D, n: i64, m: i64, tol: f64) -> Result<Certified> {
    let (n, m) = canonical_lag(n, m);
    f.lag_series(PairKernel::Rho, n, m, tol)
}

/// α-correlation of `(X_{0,0}, X_{n,m})`.
pub fn rho_tilde_nm(f: &Filter2D, n: i64, m: i64, tol: f64) -> Result<Certified> {
    let (n, m) = canonical_lag(n, m);
    let rho = f.lag_series(PairKernel::Rho, n, m, tol)?;
    let d1 = f.lag_series(PairKernel::First, n, m, tol)?;
    let d2 = f.lag_series(PairKernel::First, -n, -m, tol)?;
    correlation_ratio(rho, d1, d2)
}

/// Spectral measure of `(X_{0,0}, X_{n,m})` for an explicit filter, with one
/// atom pair per innovation.
pub fn field_pair_spectral_measure(f: &Filter2D, n: i64, m: i64) -> Result<SpectralMeasure> {
    let Family2D::Explicit(rows) = &f.family else {
        return Err(Error::Unsupported("pair spectral measure of an infinite field filter".into()));
    };
    let mut meas = SpectralMeasure::new(2, f.alpha)?;
    // innovation e_{-p,-q} loads c_{p,q} on X_{0,0} and c_{p+n,q+m} on X_{n,m}
    let rmax = rows.len() as i64;
    let cmax = rows.iter().map(|r| r.len()).max().unwrap_or(0) as i64;
    for p in (-n.abs() - 1)..=(rmax + n.abs()) {
        for q in (-m.abs() - 1)..=(cmax + m.abs()) {
            let x = shifted(rows, p, q);
            let y = shifted(rows, p + n, q + m);
            if x != 0.0 || y != 0.0 {
                meas.push_pair(&[x, y], 0.5)?;
            }
        }
    }
    Ok(meas)
}

/// Per-axis orders of `rho_{n,m}` for a constant-sign hyperbolic product filter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayLaw2D {
    pub exp_n: f64,
    pub exp_m: f64,
    pub log_n: bool,
    pub log_m: bool,
}

pub fn predicted_decay_2d(f: &Filter2D) -> Result<DecayLaw2D> {
    let Family2D::Product(a, b) = &f.family else {
        return Err(Error::Unsupported("decay law needs a hyperbolic product filter".into()));
    };
    let axis = |g: &Filter1D| -> Result<(f64, bool)> {
        match g.family() {
            Family1D::Hyperbolic {
                beta,
                sign: SignPattern::Constant,
                c0: C0Mode::Value(_),
            } => match hyperbolic_decay(f.alpha, *beta) {
                DecayLaw::Power { exponent, log_factor } => Ok((exponent, log_factor)),
                DecayLaw::Exponential { .. } => unreachable!(),
            },
            _ => Err(Error::Unsupported(
                "decay law needs constant-sign hyperbolic factors".into(),
            )),
        }
    };
    let (exp_n, log_n) = axis(a)?;
    let (exp_m, log_m) = axis(b)?;
    Ok(DecayLaw2D {
        exp_n,
        exp_m,
        log_n,
        log_m,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldLagDependence {
    pub n: i64,
    pub m: i64,
    pub rho: f64,
    pub rho_tilde: f64,
    pub tail_bound: f64,
}

/// `rho` and `rho_tilde` over a lag grid, in parallel; order follows `lags`.
pub fn field_dependence(f: &Filter2D, lags: &[(i64, i64)], tol: f64) -> Result<Vec<FieldLagDependence>> {
    lags.par_iter()
        .map(|&(n, m)| {
            let rho = rho_nm(f, n, m, tol)?;
            let rt = rho_tilde_nm(f, n, m, tol)?;
            Ok(FieldLagDependence {
                n,
                m,
                rho: rho.value,
                rho_tilde: rt.value,
                tail_bound: rho.bound + rt.bound,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::rho_n;

    fn small_field() -> Vec<Vec<f64>> {
        vec![
            vec![1.0, 0.5, -0.2],
            vec![-0.3, 0.8, 0.1],
            vec![0.25, 0.0, -0.6],
        ]
    }

    #[test]
    fn white_noise_field() {
        let f = Filter2D::explicit(vec![vec![1.0]], 1.2).unwrap();
        for &(n, m) in &[(1, 0), (0, 1), (2, -3), (-1, -1)] {
            assert_eq!(rho_nm(&f, n, m, 1e-10).unwrap().value, 0.0);
            assert_eq!(rho_tilde_nm(&f, n, m, 1e-10).unwrap().value, 0.0);
        }
    }

    #[test]
    fn explicit_matches_pair_measure() {
        let a = 1.3;
        let f = Filter2D::explicit(small_field(), a).unwrap();
        for &(n, m) in &[(1, 1), (1, -1), (2, -1), (0, 2), (1, 0), (-1, 2), (-2, -1)] {
            let meas = field_pair_spectral_measure(&f, n, m).unwrap();
            let rho = rho_nm(&f, n, m, 1e-10).unwrap().value;
            let rt = rho_tilde_nm(&f, n, m, 1e-10).unwrap().value;
            assert!((rho - meas.alpha_covariance(0, 1).unwrap()).abs() < 1e-14, "({n},{m})");
            assert!((rt - meas.alpha_correlation(0, 1).unwrap()).abs() < 1e-14, "({n},{m})");
        }
    }

    #[test]
    fn quadrant_symmetries_are_exact() {
        let f = Filter2D::explicit(small_field(), 0.9).unwrap();
        for &(n, m) in &[(1, 1), (2, 1), (1, 2)] {
            let r = |n, m| rho_nm(&f, n, m, 1e-10).unwrap().value;
            assert_eq!(r(-n, -m), r(n, m));
            assert_eq!(r(n, -m), r(-n, m));
        }
    }

    #[test]
    fn product_gaussian_factorizes() {
        let a = Filter1D::hyperbolic(1.3, SignPattern::Constant, C0Mode::Value(1.0), 2.0).unwrap();
        let b = Filter1D::geometric(1.7, 2.0).unwrap();
        let f = Filter2D::product(a.clone(), b.clone()).unwrap();
        for &(n, m) in &[(1, 1), (3, 2), (2, -1), (0, 3)] {
            let r = rho_nm(&f, n, m, 1e-10).unwrap().value;
            let ga = rho_n(&a, n as usize, 1e-12).unwrap().value;
            let gb = rho_n(&b, m.unsigned_abs() as usize, 1e-13).unwrap().value;
            assert!((r - ga * gb).abs() < 1e-9, "({n},{m}): {r} vs {}", ga * gb);
        }
    }

    #[test]
    fn product_of_explicit_factors_matches_explicit_matrix() {
        let a = [1.0, -0.5, 0.3];
        let b = [0.7, 0.2];
        let alpha = 1.4;
        let fa = Filter1D::explicit(a.to_vec(), alpha).unwrap();
        let fb = Filter1D::explicit(b.to_vec(), alpha).unwrap();
        let prod = Filter2D::product(fa, fb).unwrap();
        let rows: Vec<Vec<f64>> = a.iter().map(|x| b.iter().map(|y| x * y).collect()).collect();
        let ex = Filter2D::explicit(rows, alpha).unwrap();
        for &(n, m) in &[(1, 1), (1, -1), (2, 0), (0, 1), (-1, 1)] {
            let p = rho_tilde_nm(&prod, n, m, 1e-12).unwrap().value;
            let e = rho_tilde_nm(&ex, n, m, 1e-12).unwrap().value;
            assert!((p - e).abs() < 1e-13, "({n},{m})");
        }
    }

    #[test]
    fn scale_equivariance() {
        let f = Filter2D::explicit(small_field(), 1.5).unwrap();
        let g = f.scaled(-2.0).unwrap();
        let r = rho_nm(&f, 1, -1, 1e-10).unwrap().value;
        let rg = rho_nm(&g, 1, -1, 1e-10).unwrap().value;
        assert!((rg - 2f64.powf(1.5) * r).abs() < 1e-13);
    }

    #[test]
    fn decay_table() {
        let law = |a, b1, b2| predicted_decay_2d(&Filter2D::product_hyperbolic(b1, b2, a).unwrap()).unwrap();
        let l = law(0.8, 2.0, 2.0);
        assert!((l.exp_n + 0.6).abs() < 1e-12 && (l.exp_m + 0.6).abs() < 1e-12);
        let l = law(1.5, 3.0, 1.0);
        assert_eq!((l.exp_n, l.exp_m, l.log_n, l.log_m), (-3.0, -0.5, false, false));
        let l = law(1.5, 2.0, 2.0);
        assert_eq!((l.exp_n, l.exp_m, l.log_n, l.log_m), (-2.0, -2.0, true, true));
        let e = Filter2D::explicit(vec![vec![1.0]], 1.0).unwrap();
        assert!(predicted_decay_2d(&e).is_err());
    }

    #[test]
    fn hyperbolic_product_correlation_is_bounded() {
        let f = Filter2D::product_hyperbolic(1.2, 1.5, 1.3).unwrap();
        for &(n, m) in &[(1, 1), (4, -2), (0, 5)] {
            let rt = rho_tilde_nm(&f, n, m, 1e-8).unwrap();
            assert!(rt.value > 0.0 && rt.value <= 1.0, "{rt:?}");
        }
    }
}
