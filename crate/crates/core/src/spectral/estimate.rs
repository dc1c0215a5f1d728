//! Plug-in spectral measure from the largest observations of a sample in the
//! domain of normal attraction of a stable law.

use super::SpectralMeasure;
use crate::error::{Error, Result};

/// Default number of order statistics, `floor(n^0.6)`.
pub fn default_tail_count(n: usize) -> usize {
    (n as f64).powf(0.6).floor() as usize
}

/// Keep the `k` largest-norm points, estimate the tail index with a Hill
/// estimator on the same order statistics and place an atom of weight
/// `R^alpha / n` at each direction, `R` being the `(k+1)`-th largest norm.
///
/// The Hill estimate is clamped to `(0, 2]`.
pub fn estimate_spectral_from_samples(samples: &[[f64; 2]], k: usize) -> Result<SpectralMeasure> {
    if k < 10 {
        return Err(Error::invalid("k", format!("must be at least 10, got {k}")));
    }
    let mut pts: Vec<(f64, [f64; 2])> = samples
        .iter()
        .filter(|p| p[0].is_finite() && p[1].is_finite())
        .map(|p| (p[0].hypot(p[1]), *p))
        .collect();
    let n = pts.len();
    if n <= k {
        return Err(Error::InsufficientData(format!(
            "{n} finite samples, need more than k = {k}"
        )));
    }
    pts.select_nth_unstable_by(k, |a, b| b.0.total_cmp(&a.0));
    let threshold = pts[k].0;
    if !(threshold > 0.0) {
        return Err(Error::InsufficientData("threshold order statistic is zero".into()));
    }
    let top = &pts[..k];
    let hill: f64 = top.iter().map(|(r, _)| (r / threshold).ln()).sum::<f64>() / k as f64;
    if !(hill > 0.0) {
        return Err(Error::InsufficientData("tied order statistics".into()));
    }
    let alpha = (1.0 / hill).min(2.0);
    let w = threshold.powf(alpha) / n as f64;
    let mut m = SpectralMeasure::new(2, alpha)?;
    for (r, p) in top {
        m.push(&[p[0] / r, p[1] / r], w)?;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Symmetric Pareto(alpha) variates: heavy tails without a stable sampler.
    fn pareto(rng: &mut ChaCha8Rng, alpha: f64) -> f64 {
        let u: f64 = rng.random::<f64>();
        let x = (1.0 - u).powf(-1.0 / alpha);
        if rng.random::<bool>() {
            x
        } else {
            -x
        }
    }

    #[test]
    fn totally_dependent_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s: Vec<[f64; 2]> = (0..20_000)
            .map(|_| {
                let x = pareto(&mut rng, 1.5);
                [x, x]
            })
            .collect();
        let m = estimate_spectral_from_samples(&s, default_tail_count(s.len())).unwrap();
        assert!((m.alpha_correlation(0, 1).unwrap() - 1.0).abs() < 0.05);
    }

    #[test]
    fn independent_coordinates() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s: Vec<[f64; 2]> = (0..100_000)
            .map(|_| [pareto(&mut rng, 1.2), pareto(&mut rng, 1.2)])
            .collect();
        let m = estimate_spectral_from_samples(&s, default_tail_count(s.len())).unwrap();
        assert!(m.alpha_correlation(0, 1).unwrap().abs() < 0.1);
        assert!((m.alpha() - 1.2).abs() < 0.2, "alpha_hat = {}", m.alpha());
    }

    #[test]
    fn rejects_short_samples() {
        let s = vec![[1.0, 2.0]; 10];
        assert!(matches!(
            estimate_spectral_from_samples(&s, 10),
            Err(Error::InsufficientData(_))
        ));
        assert!(estimate_spectral_from_samples(&s, 5).is_err());
    }
}
