//! Monte Carlo for linear processes: sample paths, lag pairs and partial
//! sums, with one seeded stream per replication so results do not depend
//! on the number of threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::exact::{tail_prefix, window_power_sum};
use super::sampler::InnovationLaw;
use super::Estimate;
use crate::error::{Error, Result};
use crate::filter::{Family1D, Filter1D};

/// Stream for replication `rep` of a run seeded with `seed`.
pub fn replication_rng(seed: u64, rep: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(rep))
}

/// `X_0, ..., X_{len-1}` with `X_t = sum_{j<=trunc} c_j eps_{t-j}`.
pub fn simulate_process(f: &Filter1D, law: InnovationLaw, len: usize, trunc: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let c = f.coefficients(trunc + 1);
    let eps: Vec<f64> = (0..len + trunc).map(|_| law.sample(rng)).collect();
    (0..len)
        .map(|t| {
            // eps index of eps_{t-j} is t + trunc - j
            c.iter().enumerate().map(|(j, cj)| cj * eps[t + trunc - j]).sum()
        })
        .collect()
}

/// `count` independent pairs `(X_0, X_n)`.
pub fn simulate_lag_pairs(
    f: &Filter1D,
    law: InnovationLaw,
    n: usize,
    trunc: usize,
    count: usize,
    seed: u64,
) -> Vec<[f64; 2]> {
    (0..count as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replication_rng(seed, rep);
            let x = simulate_process(f, law, n + 1, trunc, &mut rng);
            [x[0], x[n]]
        })
        .collect()
}

/// Weights of `S_n = sum_i w_i eps_i`: explicit near weights and the
/// `alpha`-mass of the remaining remote ones.
#[derive(Debug, Clone)]
struct PartialSumPlan {
    weights: Vec<f64>,
    remote_mass: f64,
}

fn partial_sum_plan(f: &Filter1D, n: usize, alpha: f64) -> Result<PartialSumPlan> {
    let near = match f.family() {
        Family1D::Explicit(c) => c.len(),
        _ => 4 * n,
    };
    let c = f.coefficients(near + n + 1);
    let pre = tail_prefix(&c);
    let mut weights: Vec<f64> = (0..near).map(|k| pre[k + n] - pre[k]).collect();
    let mut head = 0.0;
    for &cj in &c[..n] {
        head += cj;
        weights.push(head);
    }
    let total: f64 = weights.iter().map(|w| w.abs().powf(alpha)).sum();
    let remote_mass = window_power_sum(f, n, alpha, near, 1e-9 * total.max(f64::MIN_POSITIVE))?.value;
    Ok(PartialSumPlan { weights, remote_mass })
}

/// Independent draws of `S_n` for each `n` in `grid`: entry `[rep][i]`.
pub fn simulate_partial_sums(
    f: &Filter1D,
    law: InnovationLaw,
    grid: &[usize],
    reps: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let alpha = law.alpha();
    let plans = grid
        .iter()
        .map(|&n| partial_sum_plan(f, n, alpha))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..reps as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replication_rng(seed, rep);
            plans
                .iter()
                .map(|p| {
                    let near: f64 = p.weights.iter().map(|w| w * law.sample(&mut rng)).sum();
                    near + law.sample_aggregate(p.remote_mass, &mut rng)
                })
                .collect()
        })
        .collect())
}

/// Median of `|S_n|` across replications, per grid point.
pub fn median_abs_scales(sums: &[Vec<f64>]) -> Result<Vec<f64>> {
    let Some(first) = sums.first() else {
        return Err(Error::InsufficientData("no replications".into()));
    };
    Ok((0..first.len())
        .map(|i| {
            let mut col: Vec<f64> = sums.iter().map(|r| r[i].abs()).collect();
            col.sort_by(f64::total_cmp);
            let h = col.len() / 2;
            if col.len() % 2 == 1 {
                col[h]
            } else {
                0.5 * (col[h - 1] + col[h])
            }
        })
        .collect())
}

/// `ln f(1,-1) - ln f(1,0) - ln f(0,-1)` from the real part of the empirical
/// characteristic function, with a delta-method standard error.
pub fn empirical_codifference(samples: &[[f64; 2]]) -> Result<Estimate> {
    if samples.len() < 1000 {
        return Err(Error::InsufficientData(format!(
            "need at least 1000 samples, got {}",
            samples.len()
        )));
    }
    let n = samples.len() as f64;
    let points = [(1.0, -1.0), (1.0, 0.0), (0.0, -1.0)];
    let cos_at = |(t, s): (f64, f64), x: &[f64; 2]| (t * x[0] + s * x[1]).cos();
    let mut phi = [0.0; 3];
    for (k, &p) in points.iter().enumerate() {
        phi[k] = samples.iter().map(|x| cos_at(p, x)).sum::<f64>() / n;
        if phi[k] <= 0.0 {
            return Err(Error::UnstableLog {
                t: p.0,
                s: p.1,
                value: phi[k],
            });
        }
    }
    let value = phi[0].ln() - phi[1].ln() - phi[2].ln();
    let infl: Vec<f64> = samples
        .iter()
        .map(|x| {
            cos_at(points[0], x) / phi[0] - cos_at(points[1], x) / phi[1] - cos_at(points[2], x) / phi[2]
        })
        .collect();
    let mean = infl.iter().sum::<f64>() / n;
    let var = infl.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(Estimate {
        value,
        stderr: (var / n).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::{C0Mode, SignPattern};
    use crate::memory::sampler::sample_sas;
    use crate::process::codifference_n;

    #[test]
    fn process_matches_manual_convolution() {
        let f = Filter1D::explicit(vec![1.0, -0.5, 0.25], 1.5).unwrap();
        let law = InnovationLaw::sas(1.5).unwrap();
        let x = simulate_process(&f, law, 5, 2, &mut replication_rng(9, 0));
        let mut rng = replication_rng(9, 0);
        let eps: Vec<f64> = (0..7).map(|_| law.sample(&mut rng)).collect();
        for t in 0..5 {
            let v = eps[t + 2] - 0.5 * eps[t + 1] + 0.25 * eps[t];
            assert!((x[t] - v).abs() < 1e-15);
        }
    }

    #[test]
    fn replications_are_thread_independent() {
        let f = Filter1D::geometric(2.0, 1.5).unwrap();
        let law = InnovationLaw::sas(1.5).unwrap();
        let a = simulate_partial_sums(&f, law, &[8, 16], 20, 3).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| simulate_partial_sums(&f, law, &[8, 16], 20, 3).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn iid_partial_sums_have_stable_scale() {
        // S_n = n^{1/alpha} Z for unit SaS innovations
        let f = Filter1D::explicit(vec![1.0], 1.5).unwrap();
        let law = InnovationLaw::sas(1.5).unwrap();
        let sums = simulate_partial_sums(&f, law, &[1, 64], 4000, 11).unwrap();
        let med = median_abs_scales(&sums).unwrap();
        let ratio = med[1] / med[0];
        assert!((ratio / 64f64.powf(1.0 / 1.5) - 1.0).abs() < 0.08, "{ratio}");
    }

    #[test]
    fn independent_pair_has_zero_codifference() {
        let mut rng = replication_rng(12, 0);
        let s: Vec<[f64; 2]> = (0..20_000).map(|_| [sample_sas(1.2, &mut rng), sample_sas(1.2, &mut rng)]).collect();
        let e = empirical_codifference(&s).unwrap();
        assert!(e.value.abs() < 0.05, "{e:?}");
    }

    #[test]
    fn identical_pair_has_codifference_two() {
        let mut rng = replication_rng(13, 0);
        let s: Vec<[f64; 2]> = (0..20_000)
            .map(|_| {
                let x = sample_sas(1.5, &mut rng);
                [x, x]
            })
            .collect();
        let e = empirical_codifference(&s).unwrap();
        assert!((e.value - 2.0).abs() < 4.0 * e.stderr + 1e-12, "{e:?}");
    }

    #[test]
    fn simulated_pairs_match_codifference_n() {
        let f = Filter1D::geometric(1.6, 1.4).unwrap();
        let law = InnovationLaw::sas(1.4).unwrap();
        for n in [1, 3] {
            let pairs = simulate_lag_pairs(&f, law, n, 60, 40_000, 100 + n as u64);
            let e = empirical_codifference(&pairs).unwrap();
            let exact = codifference_n(&f, n, 1e-12).unwrap().value;
            assert!((e.value - exact).abs() < 3.0 * e.stderr, "n={n}: {e:?} vs {exact}");
        }
    }

    #[test]
    fn gaussian_aggregate_is_exact_in_distribution() {
        let f = Filter1D::hyperbolic(0.8, SignPattern::Constant, C0Mode::Value(1.0), 2.0).unwrap();
        let plan = partial_sum_plan(&f, 16, 2.0).unwrap();
        let exact = crate::memory::exact::exact_variance_a2(&f, 16, 1e-9).unwrap().value;
        let near: f64 = plan.weights.iter().map(|w| w * w).sum();
        assert!((near + plan.remote_mass - exact).abs() < 1e-6 * exact);
    }

    #[test]
    fn too_few_samples_rejected() {
        assert!(matches!(empirical_codifference(&[[0.0, 0.0]; 10]), Err(Error::InsufficientData(_))));
        let bad = vec![[0.0, std::f64::consts::PI]; 2000];
        assert!(matches!(empirical_codifference(&bad), Err(Error::UnstableLog { .. })));
    }
}
