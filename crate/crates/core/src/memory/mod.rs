//! Memory of linear processes and fields, read off the growth of partial
//! sums: `A_n ~ n^{1/alpha + delta}` with `delta > 0` positive memory,
//! `delta = 0` zero memory, `delta < 0` negative memory, and bounded `A_n`
//! strongly negative memory.
//!
//! Scales come either from the exact coefficient formulas or from
//! simulation (median of `|S_n|` across replications). The classical
//! covariance-based notion (long/short/negative) is available for
//! comparison.

pub mod exact;
pub mod qcov;
pub mod sampler;
pub mod simulate;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Family2D, Filter2D};
use crate::filter::Filter1D;
use crate::numeric::ols;
use crate::process::rho_n_batch;
use crate::spectral::check_alpha;

pub use exact::{
    exact_norm_a_alpha, exact_variance_a2, field_norm_alpha, field_scale_z, head_power_sum, window_power_sum,
};
pub use qcov::{discretize_polar, q_covariance, radial_constant, LevyPolarMeasure};
pub use sampler::{sample_sas, sample_spectral_vector, InnovationLaw};
pub use simulate::{
    empirical_codifference, median_abs_scales, replication_rng, simulate_lag_pairs, simulate_partial_sums,
    simulate_process,
};

/// A statistical estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MemoryClass {
    Positive,
    Zero,
    Negative,
    StronglyNegative,
    Boundary,
}

/// Decision bands on `delta_hat`: `band0 + stderr_mult * stderr`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bands {
    pub band0: f64,
    pub stderr_mult: f64,
}

impl Default for Bands {
    fn default() -> Self {
        Self {
            band0: 0.05,
            stderr_mult: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemoryReport {
    pub alpha: f64,
    pub delta_hat: f64,
    pub exponent_hat: f64,
    pub class: MemoryClass,
    pub stderr: f64,
    pub n_grid: Vec<usize>,
    /// Zero for exact routes.
    pub replications: usize,
    pub note: Option<String>,
}

/// OLS fit of `ln scale` on `ln n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthFit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
}

/// One grid point of a scale curve. `bound` is the certified error of an
/// exact scale or the standard error of a simulated one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalePoint {
    pub n: usize,
    pub scale: f64,
    pub bound: f64,
}

/// `2^lo, 2^{lo+1}, ..., 2^hi`.
pub fn dyadic_grid(lo: u32, hi: u32) -> Vec<usize> {
    (lo..=hi).map(|k| 1usize << k).collect()
}

pub fn default_exact_grid() -> Vec<usize> {
    dyadic_grid(6, 14)
}

pub fn default_sim_grid() -> Vec<usize> {
    dyadic_grid(6, 11)
}

pub const DEFAULT_REPLICATIONS: usize = 400;

/// Relative accuracy of exact scales.
const EXACT_REL_TOL: f64 = 1e-10;

pub fn estimate_growth_exponent(scales: &[(f64, f64)]) -> Result<GrowthFit> {
    if scales.len() < 6 {
        return Err(Error::InsufficientData(format!(
            "growth fit needs at least 6 grid points, got {}",
            scales.len()
        )));
    }
    if let Some(&(n, s)) = scales.iter().find(|(n, s)| !(*n > 0.0 && *s > 0.0 && s.is_finite())) {
        return Err(Error::invalid("scales", format!("nonpositive value at n = {n}: {s}")));
    }
    let x: Vec<f64> = scales.iter().map(|(n, _)| n.ln()).collect();
    let y: Vec<f64> = scales.iter().map(|(_, s)| s.ln()).collect();
    let fit = ols(&x, &y)?;
    Ok(GrowthFit {
        slope: fit.slope,
        stderr: fit.slope_stderr,
        intercept: fit.intercept,
    })
}

/// Classify `delta_hat = slope - 1/alpha`.
pub fn classify_memory(slope: f64, stderr: f64, alpha: f64, bands: Bands) -> Result<MemoryReport> {
    check_alpha(alpha)?;
    if !slope.is_finite() || !(stderr >= 0.0) {
        return Err(Error::invalid("slope", "slope and stderr must be finite"));
    }
    let w = bands.band0 + bands.stderr_mult * stderr;
    let inv = 1.0 / alpha;
    let delta = slope - inv;
    let mut note = None;
    let class = if slope <= w {
        MemoryClass::StronglyNegative
    } else if delta.abs() <= w {
        MemoryClass::Zero
    } else if delta > w {
        if alpha <= 1.0 {
            note = Some(format!("positive memory needs alpha > 1 (alpha = {alpha})"));
            MemoryClass::Boundary
        } else if delta < 1.0 - inv + w {
            MemoryClass::Positive
        } else {
            note = Some(format!("delta {delta:.4} exceeds 1 - 1/alpha"));
            MemoryClass::Boundary
        }
    } else if delta > -inv + w {
        MemoryClass::Negative
    } else {
        note = Some(format!("delta {delta:.4} is at the edge of bounded growth"));
        MemoryClass::Boundary
    };
    Ok(MemoryReport {
        alpha,
        delta_hat: delta,
        exponent_hat: slope,
        class,
        stderr,
        n_grid: Vec::new(),
        replications: 0,
        note,
    })
}

fn report_from_curve(curve: &[ScalePoint], alpha: f64, reps: usize, bands: Bands) -> Result<MemoryReport> {
    let pts: Vec<(f64, f64)> = curve.iter().map(|p| (p.n as f64, p.scale)).collect();
    let fit = estimate_growth_exponent(&pts)?;
    let mut r = classify_memory(fit.slope, fit.stderr, alpha, bands)?;
    r.n_grid = curve.iter().map(|p| p.n).collect();
    r.replications = reps;
    Ok(r)
}

/// `A_n = (A_n^alpha)^{1/alpha}` on a grid.
pub fn exact_scale_curve(f: &Filter1D, alpha: f64, grid: &[usize]) -> Result<Vec<ScalePoint>> {
    check_alpha(alpha)?;
    grid.par_iter()
        .map(|&n| {
            let v = exact::norm_relative(f, n, alpha, EXACT_REL_TOL)?;
            let scale = v.value.powf(1.0 / alpha);
            Ok(ScalePoint {
                n,
                scale,
                bound: scale * v.bound / (alpha * v.value),
            })
        })
        .collect()
}

pub fn memory_exact(f: &Filter1D, alpha: f64, grid: &[usize], bands: Bands) -> Result<(Vec<ScalePoint>, MemoryReport)> {
    let curve = exact_scale_curve(f, alpha, grid)?;
    let report = report_from_curve(&curve, alpha, 0, bands)?;
    Ok((curve, report))
}

/// Median `|S_n|` across replications, with the asymptotic standard error
/// of a sample median estimated from the spread of the order statistics.
pub fn simulated_scale_curve(
    f: &Filter1D,
    law: InnovationLaw,
    grid: &[usize],
    reps: usize,
    seed: u64,
) -> Result<Vec<ScalePoint>> {
    if reps < 10 {
        return Err(Error::invalid("replications", "need at least 10"));
    }
    let sums = simulate_partial_sums(f, law, grid, reps, seed)?;
    let med = median_abs_scales(&sums)?;
    Ok(grid
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let mut col: Vec<f64> = sums.iter().map(|r| r[i].abs()).collect();
            col.sort_by(f64::total_cmp);
            // order statistics at 1/2 +- 1/(2 sqrt R) bracket the median
            // with one standard error
            let r = reps as f64;
            let half = 0.5 * r.sqrt();
            let lo = ((0.5 * r - half).floor().max(0.0)) as usize;
            let hi = ((0.5 * r + half).ceil() as usize).min(reps - 1);
            ScalePoint {
                n,
                scale: med[i],
                bound: 0.5 * (col[hi] - col[lo]),
            }
        })
        .collect())
}

pub fn memory_sim(
    f: &Filter1D,
    law: InnovationLaw,
    grid: &[usize],
    reps: usize,
    seed: u64,
    bands: Bands,
) -> Result<(Vec<ScalePoint>, MemoryReport)> {
    let curve = simulated_scale_curve(f, law, grid, reps, seed)?;
    let report = report_from_curve(&curve, law.alpha(), reps, bands)?;
    Ok((curve, report))
}

/// Directional reports `(t-axis, s-axis)` for a product-filter field: each
/// axis is scanned with the other index fixed at its largest grid value.
pub fn classify_directional(
    f: &Filter2D,
    alpha: f64,
    grid_n: &[usize],
    grid_m: &[usize],
    bands: Bands,
) -> Result<(MemoryReport, MemoryReport)> {
    if !matches!(f.family(), Family2D::Product(..)) {
        return Err(Error::Unsupported(
            "directional memory is only available for product filters".into(),
        ));
    }
    let (Some(&n_max), Some(&m_max)) = (grid_n.iter().max(), grid_m.iter().max()) else {
        return Err(Error::InsufficientData("empty grid".into()));
    };
    let (t_curve, s_curve) = directional_curves(f, alpha, grid_n, grid_m, n_max, m_max)?;
    Ok((
        report_from_curve(&t_curve, alpha, 0, bands)?,
        report_from_curve(&s_curve, alpha, 0, bands)?,
    ))
}

/// Rectangle scales `(Z_{n, m_max})_n` and `(Z_{n_max, m})_m`.
pub fn directional_curves(
    f: &Filter2D,
    alpha: f64,
    grid_n: &[usize],
    grid_m: &[usize],
    n_fixed: usize,
    m_fixed: usize,
) -> Result<(Vec<ScalePoint>, Vec<ScalePoint>)> {
    check_alpha(alpha)?;
    let point = |n: usize, m: usize, axis_n: usize| -> Result<ScalePoint> {
        let v = field_norm_alpha(f, n, m, alpha, EXACT_REL_TOL)?;
        let scale = v.value.powf(1.0 / alpha);
        Ok(ScalePoint {
            n: axis_n,
            scale,
            bound: scale * v.bound / (alpha * v.value),
        })
    };
    let t = grid_n.par_iter().map(|&n| point(n, m_fixed, n)).collect::<Result<Vec<_>>>()?;
    let s = grid_m.par_iter().map(|&m| point(n_fixed, m, m)).collect::<Result<Vec<_>>>()?;
    Ok((t, s))
}

/// Covariance-based memory for finite-variance processes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClassicMemory {
    Long,
    Short,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicReport {
    pub class: ClassicMemory,
    /// `sum_{|k| <= 2K} |gamma_k| / sum_{|k| <= K} |gamma_k|`.
    pub growth_ratio: f64,
    pub threshold: f64,
    pub coefficient_sum: Option<f64>,
    pub inconclusive: bool,
}

/// Lag horizon `K` of the divergence test.
pub const CLASSIC_HORIZON: usize = 512;

/// Long when `sum |gamma_k|` diverges, otherwise Short or Negative by the
/// sign of `sum gamma_k = (sum c_j)^2`.
pub fn classic_memory_class(f: &Filter1D) -> Result<ClassicReport> {
    let g = f.with_alpha(2.0)?;
    let k = CLASSIC_HORIZON;
    let lags: Vec<usize> = (0..=2 * k).collect();
    let gamma = rho_n_batch(&g, &lags, 1e-12)?;
    let partial = |upto: usize| gamma[0].value.abs() + 2.0 * gamma[1..=upto].iter().map(|x| x.value.abs()).sum::<f64>();
    let (s1, s2) = (partial(k), partial(2 * k));
    let growth_ratio = if s1 > 0.0 { s2 / s1 } else { 1.0 };
    let excess = 1.0 / (k as f64).ln();
    let threshold = 1.0 + excess;
    let inconclusive = (growth_ratio - threshold).abs() < 0.5 * excess;
    let coefficient_sum = f.coefficient_sum();
    let class = if growth_ratio > threshold {
        ClassicMemory::Long
    } else {
        let total = coefficient_sum.unwrap_or(f64::NAN);
        let l1 = f.power_sum(1.0);
        if total.abs() <= 1e-9 * l1.max(1.0) {
            ClassicMemory::Negative
        } else {
            ClassicMemory::Short
        }
    };
    Ok(ClassicReport {
        class,
        growth_ratio,
        threshold,
        coefficient_sum,
        inconclusive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::{C0Mode, SignPattern};

    fn hyper(beta: f64, sign: SignPattern, c0: C0Mode) -> Filter1D {
        Filter1D::hyperbolic(beta, sign, c0, 2.0).unwrap()
    }

    #[test]
    fn exact_slope_is_zero_memory() {
        let r = classify_memory(1.0 / 1.5, 0.0, 1.5, Bands::default()).unwrap();
        assert_eq!(r.class, MemoryClass::Zero);
        assert_eq!(r.delta_hat, 0.0);
    }

    #[test]
    fn class_boundaries() {
        let b = Bands::default();
        let c = |s: f64, a: f64| classify_memory(s, 0.0, a, b).unwrap().class;
        assert_eq!(c(0.8, 2.0), MemoryClass::Positive);
        assert_eq!(c(0.25, 2.0), MemoryClass::Negative);
        assert_eq!(c(0.02, 2.0), MemoryClass::StronglyNegative);
        assert_eq!(c(1.2, 2.0), MemoryClass::Boundary);
        assert_eq!(c(0.08, 2.0), MemoryClass::Negative);
        // alpha <= 1 cannot have positive memory
        let r = classify_memory(1.4, 0.0, 0.8, b).unwrap();
        assert_eq!(r.class, MemoryClass::Boundary);
        assert!(r.note.is_some());
        // stderr widens the zero band
        assert_eq!(classify_memory(0.62, 0.05, 2.0, b).unwrap().class, MemoryClass::Zero);
    }

    #[test]
    fn growth_fit_needs_six_points() {
        let pts: Vec<(f64, f64)> = (1..=5).map(|k| (k as f64, k as f64)).collect();
        assert!(matches!(estimate_growth_exponent(&pts), Err(Error::InsufficientData(_))));
        let pts: Vec<(f64, f64)> = (0..8).map(|k| (2f64.powi(k), 3.0 * 2f64.powf(0.7 * k as f64))).collect();
        let fit = estimate_growth_exponent(&pts).unwrap();
        assert!((fit.slope - 0.7).abs() < 1e-12);
        let mut bad = pts.clone();
        bad[2].1 = 0.0;
        assert!(estimate_growth_exponent(&bad).is_err());
    }

    #[test]
    fn iid_exact_route_is_zero_memory() {
        let f = Filter1D::explicit(vec![1.0], 1.5).unwrap();
        let (_, r) = memory_exact(&f, 1.5, &dyadic_grid(6, 12), Bands::default()).unwrap();
        assert_eq!(r.class, MemoryClass::Zero);
        assert!(r.delta_hat.abs() < 1e-12);
    }

    #[test]
    fn alternating_filter_classes_disagree() {
        // alternating, c_0 = 2: long by covariances, zero by partial sums
        let f = hyper(0.75, SignPattern::Alternating, C0Mode::Value(2.0));
        assert_eq!(classic_memory_class(&f).unwrap().class, ClassicMemory::Long);
        let (_, r) = memory_exact(&f, 2.0, &default_exact_grid(), Bands::default()).unwrap();
        assert_eq!(r.class, MemoryClass::Zero);
        // zero-sum version: still long by covariances, bounded partial sums
        let f = hyper(0.75, SignPattern::Alternating, C0Mode::ZeroSum);
        assert_eq!(classic_memory_class(&f).unwrap().class, ClassicMemory::Long);
        let (_, r) = memory_exact(&f, 2.0, &default_exact_grid(), Bands::default()).unwrap();
        assert_eq!(r.class, MemoryClass::StronglyNegative);
    }

    #[test]
    fn zero_sum_filter_has_negative_memory() {
        let f = hyper(1.25, SignPattern::Constant, C0Mode::ZeroSum);
        assert_eq!(classic_memory_class(&f).unwrap().class, ClassicMemory::Negative);
        let (_, r) = memory_exact(&f, 2.0, &default_exact_grid(), Bands::default()).unwrap();
        assert_eq!(r.class, MemoryClass::Negative);
        assert!((r.delta_hat + 0.25).abs() < 0.03, "{}", r.delta_hat);
    }

    #[test]
    fn classic_classes_of_simple_filters() {
        let f = Filter1D::explicit(vec![1.0, 1.0], 2.0).unwrap();
        assert_eq!(classic_memory_class(&f).unwrap().class, ClassicMemory::Short);
        let f = hyper(0.75, SignPattern::Constant, C0Mode::Value(1.0));
        assert_eq!(classic_memory_class(&f).unwrap().class, ClassicMemory::Long);
    }

    #[test]
    fn directional_white_noise_and_mixed_memory() {
        let one = Filter1D::explicit(vec![1.0], 2.0).unwrap();
        let f = Filter2D::product(one.clone(), one).unwrap();
        let g = dyadic_grid(6, 12);
        let (a, b) = classify_directional(&f, 2.0, &g, &g, Bands::default()).unwrap();
        assert_eq!((a.class, b.class), (MemoryClass::Zero, MemoryClass::Zero));

        let pa = hyper(0.7, SignPattern::Constant, C0Mode::Value(1.0));
        let pb = hyper(1.3, SignPattern::Constant, C0Mode::ZeroSum);
        let f = Filter2D::product(pa, pb).unwrap();
        let (a, b) = classify_directional(&f, 2.0, &g, &g, Bands::default()).unwrap();
        assert_eq!(a.class, MemoryClass::Positive);
        assert_eq!(b.class, MemoryClass::Negative);
        assert!((a.delta_hat - 0.3).abs() < 0.05 && (b.delta_hat + 0.3).abs() < 0.05);

        let ex = Filter2D::explicit(vec![vec![1.0]], 2.0).unwrap();
        assert!(matches!(classify_directional(&ex, 2.0, &g, &g, Bands::default()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn gaussian_simulation_tracks_exact_slope() {
        let f = hyper(0.8, SignPattern::Constant, C0Mode::Value(1.0));
        let grid = default_sim_grid();
        let (_, exact) = memory_exact(&f, 2.0, &grid, Bands::default()).unwrap();
        let law = InnovationLaw::gaussian(1.0).unwrap();
        let (_, sim) = memory_sim(&f, law, &grid, 400, 2024, Bands::default()).unwrap();
        let pooled = (exact.stderr.powi(2) + sim.stderr.powi(2)).sqrt();
        assert!(
            (sim.exponent_hat - exact.exponent_hat).abs() < 2.0 * pooled.max(0.02),
            "{} vs {}",
            sim.exponent_hat,
            exact.exponent_hat
        );
    }
}
