//! Dependence measures of the pair `(X_0, X_n)` of a linear process
//! `X_t = sum_j c_j e_{t-j}` with i.i.d. SαS innovations.
//!
//! With `a_j = (c_j, c_{j+n})` the pair has spectral measure
//!
//! ```text
//! G_n = A_{n-1}/2 (d_{(0,1)} + d_{(0,-1)}) + sum_j |a_j|^alpha / 2 (d_{a_j/|a_j|} + d_{-a_j/|a_j|})
//! ```
//!
//! where `A_{n-1} = sum_{j<n} |c_j|^alpha` collects the innovations seen by
//! `X_n` only. Every measure below is a series over `j` of the form
//! `sum K(c_j, c_{j+n})` evaluated with a certified tail.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::filter::{abs_pow, C0Mode, Family1D, Filter1D, PairKernel, SignPattern};
use crate::numeric::{Certified, CompensatedSum};
use crate::spectral::SpectralMeasure;

/// Default truncation tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Largest atom count produced by [`pair_spectral_measure`].
const MAX_PAIR_ATOMS: usize = 1 << 21;

/// The series `A_{1,n}`, `A_{2,n}` and the finite sum `A_{n-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairGeometry {
    pub n: usize,
    /// `sum c_j^2 |a_j|^{alpha-2}`
    pub a1: Certified,
    /// `sum c_{j+n}^2 |a_j|^{alpha-2}`
    pub a2: Certified,
    /// `sum_{j<n} |c_j|^alpha`
    pub a_prev: f64,
}

pub fn pair_geometry(f: &Filter1D, n: usize, tol: f64) -> Result<PairGeometry> {
    let a_prev = (0..n)
        .map(|j| abs_pow(f.coefficient(j), f.alpha()))
        .sum::<CompensatedSum>()
        .value();
    Ok(PairGeometry {
        n,
        a1: f.pair_series(PairKernel::First, n, tol)?,
        a2: f.pair_series(PairKernel::Second, n, tol)?,
        a_prev,
    })
}

/// α-covariance `rho_n = sum c_j c_{j+n} |a_j|^{alpha-2}`.
pub fn rho_n(f: &Filter1D, n: usize, tol: f64) -> Result<Certified> {
    f.pair_series(PairKernel::Rho, n, tol)
}

/// α-correlation `rho_n / sqrt(A_{1,n} (A_{2,n} + A_{n-1}))`, `n >= 1`.
pub fn rho_tilde_n(f: &Filter1D, n: usize, tol: f64) -> Result<Certified> {
    if n == 0 {
        return Err(Error::invalid("n", "alpha-correlation needs a lag n >= 1"));
    }
    let rho = rho_n(f, n, tol)?;
    let g = pair_geometry(f, n, tol)?;
    correlation_ratio(rho, g.a1, Certified { value: g.a2.value + g.a_prev, bound: g.a2.bound })
}

/// `rho / sqrt(d1 d2)` with first-order error propagation.
pub(crate) fn correlation_ratio(rho: Certified, d1: Certified, d2: Certified) -> Result<Certified> {
    let den = d1.value * d2.value;
    if !(den > 0.0) {
        return Err(Error::DegenerateDenominator("alpha-correlation denominator vanishes"));
    }
    let r = rho.value / den.sqrt();
    let bound = rho.bound / den.sqrt()
        + 0.5 * r.abs() * (d1.bound / d1.value + d2.bound / d2.value);
    Ok(Certified {
        value: r.clamp(-1.0, 1.0),
        bound,
    })
}

/// Codifference `sum (|c_j|^a + |c_{j+n}|^a - |c_j - c_{j+n}|^a)`.
pub fn codifference_n(f: &Filter1D, n: usize, tol: f64) -> Result<Certified> {
    f.pair_series(PairKernel::Codifference, n, tol)
}

/// Covariation of `X_n` on `X_0`, `sum c_{j+n} c_j^<alpha-1>`; needs `alpha > 1`.
pub fn covariation_n(f: &Filter1D, n: usize, tol: f64) -> Result<Certified> {
    if f.alpha() <= 1.0 {
        return Err(Error::UnsupportedOrder { alpha: f.alpha() });
    }
    f.pair_series(PairKernel::Covariation, n, tol)
}

/// Spectral measure of `(X_0, X_n)`, truncated so that the discarded mass
/// is at most `tol`.
pub fn pair_spectral_measure(f: &Filter1D, n: usize, tol: f64) -> Result<SpectralMeasure> {
    if n == 0 {
        return Err(Error::invalid("n", "pair spectral measure needs a lag n >= 1"));
    }
    let a = f.alpha();
    let cut = match f.support_len() {
        Some(len) => len,
        None => {
            // discarded mass <= tail(J) + tail(J + n) <= 2 tail(J)
            let j = f.truncation_point(a, 0.5 * tol)?;
            if j > MAX_PAIR_ATOMS {
                return Err(Error::ToleranceUnreachable {
                    tol,
                    reason: format!("{j} atom pairs needed"),
                });
            }
            j
        }
    };
    let c = f.coefficients(cut + n);
    let mut m = SpectralMeasure::new(2, a)?;
    let a_prev = c[..n].iter().map(|&x| abs_pow(x, a)).sum::<CompensatedSum>().value();
    if a_prev > 0.0 {
        m.push_pair(&[0.0, 1.0], 0.5 * a_prev)?;
    }
    for j in 0..cut {
        let v = [c[j], c[j + n]];
        if v[0] != 0.0 || v[1] != 0.0 {
            m.push_pair(&v, 0.5)?;
        }
    }
    Ok(m)
}

/// Predicted asymptotic order of `rho_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DecayLaw {
    /// `n^exponent`, times `ln n` when `log_factor`.
    Power { exponent: f64, log_factor: bool },
    /// `exp(-rate n)`.
    Exponential { rate: f64 },
}

impl DecayLaw {
    /// Slope of `ln |rho_n|` against `ln n` (power laws only).
    pub fn exponent(&self) -> Option<f64> {
        match self {
            DecayLaw::Power { exponent, .. } => Some(*exponent),
            DecayLaw::Exponential { .. } => None,
        }
    }
}

/// Order of `rho_n` for a geometric or constant-sign hyperbolic filter.
pub fn predicted_decay(f: &Filter1D) -> Result<DecayLaw> {
    match f.family() {
        Family1D::Geometric { base } => Ok(DecayLaw::Exponential { rate: base.ln() }),
        Family1D::Hyperbolic { beta, sign, c0 } => {
            if *sign == SignPattern::Alternating {
                return Err(Error::Unsupported("decay law of alternating filters".into()));
            }
            if matches!(c0, C0Mode::ZeroSum) {
                return Err(Error::Unsupported("decay law of zero-sum filters".into()));
            }
            Ok(hyperbolic_decay(f.alpha(), *beta))
        }
        Family1D::Explicit(_) => Err(Error::Unsupported(
            "finite filters have rho_n = 0 eventually".into(),
        )),
    }
}

/// Order of `sum_j j^{-beta} (j+n)^{-beta} |a_j|^{alpha-2}`.
pub fn hyperbolic_decay(alpha: f64, beta: f64) -> DecayLaw {
    if alpha <= 1.0 {
        return DecayLaw::Power {
            exponent: 1.0 - beta * alpha,
            log_factor: false,
        };
    }
    let critical = 1.0 / (alpha - 1.0);
    if (beta - critical).abs() <= 1e-12 * critical {
        DecayLaw::Power {
            exponent: -beta,
            log_factor: true,
        }
    } else if beta < critical {
        DecayLaw::Power {
            exponent: 1.0 - beta * alpha,
            log_factor: false,
        }
    } else {
        DecayLaw::Power {
            exponent: -beta,
            log_factor: false,
        }
    }
}

/// One row of the lag table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LagDependence {
    pub n: usize,
    pub rho: f64,
    pub rho_tilde: f64,
    pub codifference: f64,
    pub covariation: Option<f64>,
    /// Sum of the truncation bounds of the reported series.
    pub tail_bound: f64,
}

/// All measures at one lag; `rho_tilde` is NaN at `n = 0`.
pub fn lag_dependence(f: &Filter1D, n: usize, tol: f64) -> Result<LagDependence> {
    let rho = rho_n(f, n, tol)?;
    let rt = if n == 0 {
        Certified { value: f64::NAN, bound: 0.0 }
    } else {
        rho_tilde_n(f, n, tol)?
    };
    let cod = codifference_n(f, n, tol)?;
    let cov = if f.alpha() > 1.0 {
        Some(covariation_n(f, n, tol)?)
    } else {
        None
    };
    Ok(LagDependence {
        n,
        rho: rho.value,
        rho_tilde: rt.value,
        codifference: cod.value,
        covariation: cov.map(|c| c.value),
        tail_bound: rho.bound + rt.bound + cod.bound + cov.map_or(0.0, |c| c.bound),
    })
}

/// [`lag_dependence`] over many lags, in parallel; output order follows `lags`.
pub fn process_dependence(f: &Filter1D, lags: &[usize], tol: f64) -> Result<Vec<LagDependence>> {
    lags.par_iter().map(|&n| lag_dependence(f, n, tol)).collect()
}

/// [`rho_n`] over many lags, in parallel.
pub fn rho_n_batch(f: &Filter1D, lags: &[usize], tol: f64) -> Result<Vec<Certified>> {
    lags.par_iter().map(|&n| rho_n(f, n, tol)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometric_closed_form(n: usize, a: f64) -> f64 {
        let n = n as f64;
        2f64.powf(-n) * (1.0 + 2f64.powf(-2.0 * n)).powf((a - 2.0) / 2.0) / (1.0 - 2f64.powf(-a))
    }

    #[test]
    fn white_noise_is_independent() {
        let f = Filter1D::explicit(vec![1.0], 1.3).unwrap();
        for n in 1..4 {
            assert_eq!(rho_n(&f, n, 1e-10).unwrap().value, 0.0);
            assert_eq!(rho_tilde_n(&f, n, 1e-10).unwrap().value, 0.0);
            assert_eq!(codifference_n(&f, n, 1e-10).unwrap().value, 0.0);
            assert_eq!(covariation_n(&f, n, 1e-10).unwrap().value, 0.0);
        }
        let m = pair_spectral_measure(&f, 1, 1e-10).unwrap();
        assert_eq!(m.len(), 4);
        assert_eq!(m.alpha_covariance(0, 1).unwrap(), 0.0);
    }

    #[test]
    fn geometric_rho_closed_form() {
        for &a in &[0.5, 1.0, 1.5, 2.0] {
            let f = Filter1D::geometric(2.0, a).unwrap();
            for n in 0..=30 {
                let r = rho_n(&f, n, 1e-14).unwrap();
                let exact = geometric_closed_form(n, a);
                assert!((r.value - exact).abs() <= 1e-12 * exact.max(1e-300).max(1.0), "a={a} n={n}");
            }
        }
    }

    #[test]
    fn lag_zero_is_scaled_alpha_norm() {
        let f = Filter1D::hyperbolic(1.1, SignPattern::Alternating, C0Mode::Value(0.5), 1.3).unwrap();
        let r = rho_n(&f, 0, 1e-11).unwrap();
        let expected = 2f64.powf((1.3 - 2.0) / 2.0) * f.alpha_norm();
        assert!((r.value - expected).abs() < 1e-9, "{} vs {expected}", r.value);
    }

    #[test]
    fn gaussian_reductions() {
        let c = vec![1.0, -0.4, 0.3, 0.25, -0.1];
        let f = Filter1D::explicit(c.clone(), 2.0).unwrap();
        for n in 0..6 {
            let gamma: f64 = (0..c.len()).map(|j| c[j] * c.get(j + n).copied().unwrap_or(0.0)).sum();
            let r = rho_n(&f, n, 1e-10).unwrap().value;
            assert!((r - gamma).abs() < 1e-14);
            assert!((codifference_n(&f, n, 1e-10).unwrap().value - 2.0 * r).abs() < 1e-14);
            assert!((covariation_n(&f, n, 1e-10).unwrap().value - gamma).abs() < 1e-14);
        }
    }

    #[test]
    fn geometric_gaussian_correlation() {
        let f = Filter1D::geometric(2.0, 2.0).unwrap();
        for n in 1..10 {
            // gamma(n)/gamma(0) = 2^{-n}
            let rt = rho_tilde_n(&f, n, 1e-13).unwrap().value;
            assert!((rt - 2f64.powi(-(n as i32))).abs() < 1e-12);
        }
    }

    #[test]
    fn covariation_three_terms() {
        let c = [0.7, -1.2, 0.4];
        let a = 1.6;
        let f = Filter1D::explicit(c.to_vec(), a).unwrap();
        let brute = c[1] * c[0].abs().powf(a - 1.0) * c[0].signum()
            + c[2] * c[1].abs().powf(a - 1.0) * c[1].signum();
        assert!((covariation_n(&f, 1, 1e-10).unwrap().value - brute).abs() < 1e-15);
        assert!(matches!(
            covariation_n(&f.with_alpha(1.0).unwrap(), 1, 1e-10),
            Err(Error::UnsupportedOrder { .. })
        ));
    }

    #[test]
    fn geometric_codifference_decays_as_two_to_minus_alpha_n() {
        let a = 0.5;
        let f = Filter1D::geometric(2.0, a).unwrap();
        let ns: Vec<f64> = (10..30).map(|n| n as f64).collect();
        let cod: Vec<f64> = (10..30)
            .map(|n| codifference_n(&f, n, 1e-16).unwrap().value.log2())
            .collect();
        let rho: Vec<f64> = (10..30).map(|n| rho_n(&f, n, 1e-16).unwrap().value.log2()).collect();
        let sc = crate::numeric::ols(&ns, &cod).unwrap().slope;
        let sr = crate::numeric::ols(&ns, &rho).unwrap().slope;
        assert!((sc + a).abs() < 0.01, "{sc}");
        assert!((sr + 1.0).abs() < 0.01, "{sr}");
    }

    #[test]
    fn route_through_pair_measure_hyperbolic() {
        let f = Filter1D::hyperbolic(1.2, SignPattern::Constant, C0Mode::Value(1.0), 1.5).unwrap();
        let tol = 1e-3;
        let m = pair_spectral_measure(&f, 10, tol).unwrap();
        let rt = rho_tilde_n(&f, 10, 1e-10).unwrap().value;
        let via = m.alpha_correlation(0, 1).unwrap();
        assert!((rt - via).abs() < 2.0 * tol, "{rt} vs {via}");
        let rho = rho_n(&f, 10, 1e-10).unwrap().value;
        assert!((rho - m.alpha_covariance(0, 1).unwrap()).abs() < 2.0 * tol);
    }

    #[test]
    fn geometric_pair_measure_correlation() {
        let f = Filter1D::geometric(2.0, 1.3).unwrap();
        let m = pair_spectral_measure(&f, 1, 1e-14).unwrap();
        let rt = rho_tilde_n(&f, 1, 1e-14).unwrap().value;
        assert!((m.alpha_correlation(0, 1).unwrap() - rt).abs() < 1e-12);
        // the pair measure reproduces the ch.f. of X_0 + X_1
        let a = 1.3;
        let scale = (0..200)
            .map(|j| (f.coefficient(j) + f.coefficient(j + 1)).abs().powf(a))
            .sum::<f64>()
            + 1.0;
        let cf = m.char_function(&[1.0, 1.0]).unwrap();
        assert!((cf - (-scale).exp()).abs() < 1e-12);
    }

    #[test]
    fn predicted_decay_table() {
        let law = |a, b| {
            predicted_decay(&Filter1D::hyperbolic(b, SignPattern::Constant, C0Mode::Value(1.0), a).unwrap())
                .unwrap()
        };
        assert_eq!(law(1.5, 1.0), DecayLaw::Power { exponent: -0.5, log_factor: false });
        assert_eq!(law(1.5, 2.0), DecayLaw::Power { exponent: -2.0, log_factor: true });
        assert!(matches!(law(0.8, 2.0), DecayLaw::Power { exponent, log_factor: false } if (exponent + 0.6).abs() < 1e-12));
        assert_eq!(law(1.5, 3.0), DecayLaw::Power { exponent: -3.0, log_factor: false });
        let g = Filter1D::geometric(3.0, 1.0).unwrap();
        assert_eq!(predicted_decay(&g).unwrap(), DecayLaw::Exponential { rate: 3f64.ln() });
        let alt = Filter1D::hyperbolic(1.5, SignPattern::Alternating, C0Mode::Value(1.0), 1.0).unwrap();
        assert!(matches!(predicted_decay(&alt), Err(Error::Unsupported(_))));
    }

    #[test]
    fn batch_matches_sequential() {
        let f = Filter1D::hyperbolic(0.9, SignPattern::Constant, C0Mode::Value(1.0), 1.6).unwrap();
        let lags: Vec<usize> = (1..20).collect();
        let batch = rho_n_batch(&f, &lags, 1e-10).unwrap();
        for (&n, b) in lags.iter().zip(&batch) {
            assert_eq!(rho_n(&f, n, 1e-10).unwrap(), *b);
        }
    }

    #[test]
    fn truncation_doubling_stays_within_bound() {
        let f = Filter1D::hyperbolic(1.1, SignPattern::Alternating, C0Mode::Value(1.0), 1.2).unwrap();
        for kernel in [PairKernel::Rho, PairKernel::Codifference, PairKernel::First] {
            let g = |x, y| kernel.eval(x, y, 1.2);
            let base = f.hyperbolic_pair_series(g, 5, 1e-9, 1024).unwrap();
            let doubled = f.hyperbolic_pair_series(g, 5, 1e-9, 2048).unwrap();
            assert!(
                (base.value - doubled.value).abs() <= base.bound + doubled.bound + 1e-14,
                "{kernel:?}: {} vs {} (bound {})",
                base.value,
                doubled.value,
                base.bound
            );
        }
    }
}
