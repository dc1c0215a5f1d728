//! Random variates: SαS with characteristic function `exp(-|t|^alpha)`
//! (Chambers–Mallows–Stuck), and the innovation laws used in simulation.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{check_alpha, SpectralMeasure};

/// One SαS draw with `E exp(itX) = exp(-|t|^alpha)`. At `alpha = 2` this
/// is `N(0, 2)`.
pub fn sample_sas<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    if alpha == 2.0 {
        let z: f64 = StandardNormal.sample(rng);
        return std::f64::consts::SQRT_2 * z;
    }
    let v = PI * (rng.random::<f64>() - 0.5);
    if alpha == 1.0 {
        return v.tan();
    }
    let w: f64 = Exp1.sample(rng);
    let cv = v.cos();
    (alpha * v).sin() / cv.powf(1.0 / alpha) * (((1.0 - alpha) * v).cos() / w).powf((1.0 - alpha) / alpha)
}

/// Law of the innovations `eps_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum InnovationLaw {
    /// Ch.f. `exp(-|t|^alpha)`.
    Sas { alpha: f64 },
    Gaussian { variance: f64 },
    /// `P(|eps| > x) = (scale / x)^alpha` for `x >= scale`, random sign.
    SymmetricPareto { alpha: f64, scale: f64 },
}

impl InnovationLaw {
    pub fn sas(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self::Sas { alpha })
    }

    pub fn gaussian(variance: f64) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(Error::invalid("variance", "must be positive"));
        }
        Ok(Self::Gaussian { variance })
    }

    pub fn pareto(alpha: f64, scale: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if alpha == 2.0 {
            return Err(Error::invalid("alpha", "Pareto innovations need alpha < 2"));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::invalid("scale", "must be positive"));
        }
        Ok(Self::SymmetricPareto { alpha, scale })
    }

    /// Index of the stable law the innovations are attracted to.
    pub fn alpha(&self) -> f64 {
        match *self {
            Self::Sas { alpha } | Self::SymmetricPareto { alpha, .. } => alpha,
            Self::Gaussian { .. } => 2.0,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Sas { alpha } => sample_sas(alpha, rng),
            Self::Gaussian { variance } => {
                let z: f64 = StandardNormal.sample(rng);
                variance.sqrt() * z
            }
            Self::SymmetricPareto { alpha, scale } => {
                let u: f64 = 1.0 - rng.random::<f64>();
                let x = scale * u.powf(-1.0 / alpha);
                if rng.random::<bool>() {
                    x
                } else {
                    -x
                }
            }
        }
    }

    /// `sum_i w_i eps_i` over a remote block of weights with
    /// `sum |w_i|^alpha = mass`, drawn as a single variate. Exact for the
    /// stable and Gaussian laws; the stable limit for Pareto.
    pub fn sample_aggregate<R: Rng + ?Sized>(&self, mass: f64, rng: &mut R) -> f64 {
        if mass <= 0.0 {
            return 0.0;
        }
        match *self {
            Self::Sas { alpha } => mass.powf(1.0 / alpha) * sample_sas(alpha, rng),
            Self::Gaussian { variance } => {
                let z: f64 = StandardNormal.sample(rng);
                (variance * mass).sqrt() * z
            }
            Self::SymmetricPareto { alpha, scale } => {
                let c = pareto_stable_constant(alpha) * scale.powf(alpha);
                (c * mass).powf(1.0 / alpha) * sample_sas(alpha, rng)
            }
        }
    }
}

/// `C` with `1 - Re phi(t) ~ C |t|^alpha` for a unit symmetric Pareto law.
fn pareto_stable_constant(alpha: f64) -> f64 {
    if alpha == 1.0 {
        FRAC_PI_2
    } else {
        libm::tgamma(1.0 - alpha) * (FRAC_PI_2 * alpha).cos()
    }
}

/// Draw from the SαS vector with a discrete spectral measure:
/// `X = sum_k w_k^{1/alpha} Z_k s_k` with independent unit `Z_k`.
pub fn sample_spectral_vector<R: Rng + ?Sized>(m: &SpectralMeasure, rng: &mut R) -> Vec<f64> {
    let a = m.alpha();
    let mut x = vec![0.0; m.dim()];
    for (s, w) in m.atoms() {
        let z = w.powf(1.0 / a) * sample_sas(a, rng);
        for (xi, si) in x.iter_mut().zip(s) {
            *xi += z * si;
        }
    }
    x
}
