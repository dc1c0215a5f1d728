//! Finite spectral measures on the unit sphere and the dependence measures
//! they induce.
//!
//! A symmetric α-stable vector `X` in `R^d` has characteristic function
//!
//! ```text
//! E exp(i <t, X>) = exp( - sum_k w_k |<t, s_k>|^alpha )
//! ```
//!
//! for an atomic spectral measure with atoms `s_k` on the unit sphere and
//! weights `w_k`. From the atoms we compute
//!
//! * α-covariance `rho = sum s_1 s_2 w`,
//! * α-correlation `rho / sqrt(sum s_1^2 w * sum s_2^2 w)`, the Pearson
//!   correlation of a random direction drawn from the normalized measure,
//! * codifference `sum (|s_1|^a + |s_2|^a - |s_1 - s_2|^a) w`,
//! * covariation of `X_1` on `X_2`, `sum s_1 s_2^<a-1> w` (only for `a > 1`).
//!
//! Non-symmetric measures are accepted; the uncentered formulas above apply
//! unchanged and [`SpectralMeasure::symmetrize`] produces `(G(A) + G(-A))/2`.

mod estimate;
mod io;
mod subgaussian;

pub use estimate::{default_tail_count, estimate_spectral_from_samples};
pub use io::{read_spectral_csv, write_spectral_csv, SpectralHeader};
pub use subgaussian::{subgaussian_spectral, DEFAULT_SUBGAUSSIAN_ATOMS};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// Tolerance on the Euclidean norm of stored directions.
pub const UNIT_SPHERE_TOL: f64 = 1e-12;

/// `|a|^p sign(a)`.
#[inline]
pub fn signed_pow(a: f64, p: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a.abs().powf(p).copysign(a)
    }
}

pub fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(Error::invalid("alpha", format!("must lie in (0, 2], got {alpha}")))
    }
}

/// Atomic spectral measure on the unit sphere of `R^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure {
    dim: usize,
    alpha: f64,
    directions: Vec<f64>,
    weights: Vec<f64>,
    symmetric: bool,
}

/// The four dependence measures of a bivariate measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DependenceSummary {
    pub rho: f64,
    pub rho_tilde: f64,
    pub codifference: f64,
    pub covariation: Option<f64>,
}

impl SpectralMeasure {
    /// Empty measure (the point mass at the origin).
    pub fn new(dim: usize, alpha: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::invalid("dim", format!("must be at least 2, got {dim}")));
        }
        check_alpha(alpha)?;
        Ok(Self {
            dim,
            alpha,
            directions: Vec::new(),
            weights: Vec::new(),
            symmetric: true,
        })
    }

    /// Build from arbitrary non-zero vectors; see [`push`](Self::push).
    pub fn from_vectors<'a, I>(dim: usize, alpha: f64, atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a [f64], f64)>,
    {
        let mut m = Self::new(dim, alpha)?;
        for (v, w) in atoms {
            m.push(v, w)?;
        }
        Ok(m)
    }

    /// Add one atom. The vector is normalized onto the sphere and its norm
    /// folded into the weight as `w * |v|^alpha`, which leaves the
    /// characteristic function unchanged. Marks the measure non-symmetric
    /// unless it is later checked with [`detect_symmetry`](Self::detect_symmetry).
    pub fn push(&mut self, vector: &[f64], weight: f64) -> Result<()> {
        self.push_raw(vector, weight)?;
        self.symmetric = false;
        Ok(())
    }

    /// Add the pair of atoms `v` and `-v`, each with weight `weight`.
    pub fn push_pair(&mut self, vector: &[f64], weight: f64) -> Result<()> {
        self.push_raw(vector, weight)?;
        let neg: Vec<f64> = vector.iter().map(|x| -x).collect();
        self.push_raw(&neg, weight)
    }

    fn push_raw(&mut self, vector: &[f64], weight: f64) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: vector.len(),
            });
        }
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(Error::invalid("weight", format!("must be positive and finite, got {weight}")));
        }
        let norm = vector.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::invalid("vector", "atom direction must be non-zero and finite"));
        }
        self.directions.extend(vector.iter().map(|x| x / norm));
        let w = if (norm - 1.0).abs() <= UNIT_SPHERE_TOL {
            weight
        } else {
            weight * norm.powf(self.alpha)
        };
        self.weights.push(w);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn direction(&self, k: usize) -> &[f64] {
        &self.directions[k * self.dim..(k + 1) * self.dim]
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.directions
            .chunks_exact(self.dim)
            .zip(self.weights.iter().copied())
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().copied().sum::<CompensatedSum>().value()
    }

    /// Same atoms with a different index of stability.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self {
            alpha,
            ..self.clone()
        })
    }

    /// Measure `c * G`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::invalid("c", "scale must be positive and finite"));
        }
        Ok(Self {
            weights: self.weights.iter().map(|w| w * c).collect(),
            ..self.clone()
        })
    }

    /// `(G(A) + G(-A)) / 2`.
    pub fn symmetrize(&self) -> Self {
        let mut out = Self {
            directions: Vec::with_capacity(2 * self.directions.len()),
            weights: Vec::with_capacity(2 * self.weights.len()),
            ..self.clone()
        };
        for (s, w) in self.atoms() {
            out.directions.extend_from_slice(s);
            out.weights.push(0.5 * w);
            out.directions.extend(s.iter().map(|x| -x));
            out.weights.push(0.5 * w);
        }
        out.symmetric = true;
        out
    }

    /// Check whether every atom has an antipodal partner of equal weight and
    /// record the result.
    pub fn detect_symmetry(&mut self) -> bool {
        let key = |s: &[f64]| -> Vec<i64> { s.iter().map(|x| (x * 1e9).round() as i64).collect() };
        let mut pool: Vec<(Vec<i64>, usize)> = (0..self.len()).map(|k| (key(self.direction(k)), k)).collect();
        pool.sort();
        let mut used = vec![false; self.len()];
        let mut ok = true;
        for k in 0..self.len() {
            if used[k] {
                continue;
            }
            let neg: Vec<f64> = self.direction(k).iter().map(|x| -x).collect();
            let target = key(&neg);
            let start = pool.partition_point(|(kk, _)| *kk < target);
            let found = pool[start..]
                .iter()
                .take_while(|(kk, _)| *kk == target)
                .map(|(_, idx)| *idx)
                .find(|&idx| {
                    !used[idx]
                        && idx != k
                        && (self.weights[idx] - self.weights[k]).abs()
                            <= 1e-12 * self.weights[k].max(1.0)
                });
            match found {
                Some(idx) => {
                    used[k] = true;
                    used[idx] = true;
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        self.symmetric = ok;
        ok
    }

    /// `exp(-sum |<t, s>|^alpha w)`.
    pub fn char_function(&self, t: &[f64]) -> Result<f64> {
        if t.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: t.len(),
            });
        }
        if t.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("t", "must be finite"));
        }
        let mut acc = CompensatedSum::new();
        for (s, w) in self.atoms() {
            let dot: f64 = s.iter().zip(t).map(|(a, b)| a * b).sum();
            if dot != 0.0 {
                acc.add(dot.abs().powf(self.alpha) * w);
            }
        }
        Ok((-acc.value()).exp())
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.dim {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                dim: self.dim,
            })
        }
    }

    fn moment(&self, i: usize, j: usize) -> f64 {
        self.atoms()
            .map(|(s, w)| s[i] * s[j] * w)
            .sum::<CompensatedSum>()
            .value()
    }

    /// `int s_i s_j G(ds)`.
    pub fn alpha_covariance(&self, i: usize, j: usize) -> Result<f64> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i == j {
            return Err(Error::invalid("j", "indices must differ"));
        }
        Ok(self.moment(i, j))
    }

    /// Normalized α-covariance; always in `[-1, 1]`.
    pub fn alpha_correlation(&self, i: usize, j: usize) -> Result<f64> {
        let cov = self.alpha_covariance(i, j)?;
        let vi = self.moment(i, i);
        let vj = self.moment(j, j);
        if !(vi > 0.0) {
            return Err(Error::DegenerateComponent { component: i });
        }
        if !(vj > 0.0) {
            return Err(Error::DegenerateComponent { component: j });
        }
        Ok((cov / (vi * vj).sqrt()).clamp(-1.0, 1.0))
    }

    /// Matrix of second moments `int s s^T G(ds)`.
    pub fn alpha_cov_matrix(&self) -> Vec<Vec<f64>> {
        let d = self.dim;
        let mut acc = vec![CompensatedSum::new(); d * d];
        for (s, w) in self.atoms() {
            for i in 0..d {
                for j in i..d {
                    acc[i * d + j].add(s[i] * s[j] * w);
                }
            }
        }
        let mut out = vec![vec![0.0; d]; d];
        for i in 0..d {
            for j in i..d {
                let v = acc[i * d + j].value();
                out[i][j] = v;
                out[j][i] = v;
            }
        }
        out
    }

    /// Correlation matrix; entries for components without mass are an error.
    pub fn alpha_corr_matrix(&self) -> Result<Vec<Vec<f64>>> {
        let cov = self.alpha_cov_matrix();
        let d = self.dim;
        for (i, row) in cov.iter().enumerate() {
            if !(row[i] > 0.0) {
                return Err(Error::DegenerateComponent { component: i });
            }
        }
        let mut out = vec![vec![0.0; d]; d];
        for i in 0..d {
            for j in 0..d {
                out[i][j] = if i == j {
                    1.0
                } else {
                    (cov[i][j] / (cov[i][i] * cov[j][j]).sqrt()).clamp(-1.0, 1.0)
                };
            }
        }
        Ok(out)
    }

    fn require_bivariate(&self) -> Result<()> {
        if self.dim == 2 {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: 2,
                got: self.dim,
            })
        }
    }

    /// Codifference `tau(X_1, X_2)`.
    pub fn codifference(&self) -> Result<f64> {
        self.require_bivariate()?;
        let a = self.alpha;
        Ok(self
            .atoms()
            .map(|(s, w)| codifference_kernel(s[0], s[1], a) * w)
            .sum::<CompensatedSum>()
            .value())
    }

    /// Covariation of `X_1` on `X_2`.
    pub fn covariation(&self) -> Result<f64> {
        self.require_bivariate()?;
        self.covariation_between(0, 1)
    }

    /// Covariation of `X_i` on `X_j`: `int s_i s_j^<alpha-1> G(ds)`.
    pub fn covariation_between(&self, i: usize, j: usize) -> Result<f64> {
        self.check_index(i)?;
        self.check_index(j)?;
        if self.alpha <= 1.0 {
            return Err(Error::UnsupportedOrder { alpha: self.alpha });
        }
        let p = self.alpha - 1.0;
        Ok(self
            .atoms()
            .map(|(s, w)| s[i] * signed_pow(s[j], p) * w)
            .sum::<CompensatedSum>()
            .value())
    }

    /// All four measures of a bivariate measure.
    pub fn summary(&self) -> Result<DependenceSummary> {
        self.require_bivariate()?;
        Ok(DependenceSummary {
            rho: self.alpha_covariance(0, 1)?,
            rho_tilde: self.alpha_correlation(0, 1)?,
            codifference: self.codifference()?,
            covariation: if self.alpha > 1.0 {
                Some(self.covariation()?)
            } else {
                None
            },
        })
    }
}

/// `|a|^alpha + |b|^alpha - |a - b|^alpha`.
#[inline]
pub fn codifference_kernel(a: f64, b: f64, alpha: f64) -> f64 {
    let p = |x: f64| if x == 0.0 { 0.0 } else { x.abs().powf(alpha) };
    p(a) + p(b) - p(a - b)
}
