//! Exact scales of partial sums `S_n = X_1 + ... + X_n` of linear processes
//! and of rectangle sums `Z_{n,m}` of product-filter fields.
//!
//! Writing `S_n = sum_i w_i eps_i`, the weights are window sums of the
//! filter, and
//!
//! ```text
//! A_n^p = sum_{k >= 0} |sum_{j=1}^n c_{j+k}|^p + sum_{k=1}^n |sum_{j=0}^{n-k} c_j|^p.
//! ```
//!
//! The second sum is finite. The first is summed directly up to a cut-off
//! and closed off with a certified tail.

use crate::error::{Error, Result};
use crate::field::{Family2D, Filter2D};
use crate::filter::{abs_pow, Family1D, Filter1D, SignPattern};
use crate::numeric::zeta::hurwitz_difference;
use crate::numeric::{prefix_sums, smooth_tail_sum, Certified, CompensatedSum};
use crate::spectral::check_alpha;

const MIN_CUTOFF: usize = 1024;
const MAX_CUTOFF: usize = 1 << 26;

/// `out[m] = c_1 + ... + c_m` with `out[0] = 0`, from `c = [c_0, c_1, ...]`.
pub(crate) fn tail_prefix(c: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(c.len());
    out.push(0.0);
    out.extend(prefix_sums(&c[1..]));
    out
}

/// `sum_{m=0}^{n-1} |c_0 + ... + c_m|^p`.
pub fn head_power_sum(f: &Filter1D, n: usize, p: f64) -> f64 {
    let mut partial = 0.0;
    let mut acc = CompensatedSum::new();
    for c in f.coefficients(n) {
        partial += c;
        acc.add(abs_pow(partial, p));
    }
    acc.value()
}

/// Windows far from the origin (`centre >= FAR * n`) use a moment
/// expansion about the window centre; its relative error is `(n/c)^6`.
const FAR: f64 = 1000.0;

/// `|sum_{j=1}^n c_{j+x}|` continued to real `x >= 0` (hyperbolic family).
fn hyperbolic_window(beta: f64, sign: SignPattern, scale: f64, n: usize, x: f64) -> f64 {
    let nf = n as f64;
    let b = beta;
    // falling derivatives of y^{-beta}, up to sign: beta (beta+1) ... (beta+k-1)
    let d2 = b * (b + 1.0);
    let d3 = d2 * (b + 2.0);
    let d4 = d3 * (b + 3.0);
    let v = match sign {
        SignPattern::Constant => {
            let c = x + 0.5 * (nf + 1.0);
            if c >= FAR * nf {
                let q = (nf * nf - 1.0) / (c * c);
                c.powf(-b) * nf * (1.0 + d2 * q / 24.0 + d4 * q * (3.0 * nf * nf - 7.0) / (c * c) / 5760.0)
            } else {
                hurwitz_difference(b, x + 1.0, x + nf + 1.0)
            }
        }
        SignPattern::Alternating => {
            // U(a) = sum_{i<n} (-1)^i (a+i)^{-beta}, a = x + 1
            let a = x + 1.0;
            let c = a + 0.5 * (nf - 1.0);
            if c >= FAR * nf {
                let ic2 = 1.0 / (c * c);
                if n.is_multiple_of(2) {
                    c.powf(-b - 1.0) * (0.5 * nf * b + d3 * nf * (nf * nf - 3.0) / 48.0 * ic2)
                } else {
                    let m = 0.5 * (nf - 1.0);
                    let mm = m * (m + 1.0);
                    c.powf(-b) * (1.0 + 0.5 * mm * d2 * ic2 + mm * (mm - 1.0) / 24.0 * d4 * ic2 * ic2)
                }
            } else {
                // eta(a) = sum_{i>=0} (-1)^i (a+i)^{-beta}
                let eta = |a: f64| 2f64.powf(-b) * hurwitz_difference(b, 0.5 * a, 0.5 * (a + 1.0));
                if n.is_multiple_of(2) {
                    eta(a) - eta(a + nf)
                } else {
                    eta(a) + eta(a + nf)
                }
            }
        }
    };
    (scale * v).abs()
}

/// `sum_{k >= start} |sum_{j=1}^n c_{j+k}|^p` with error at most `tol`.
pub fn window_power_sum(f: &Filter1D, n: usize, p: f64, start: usize, tol: f64) -> Result<Certified> {
    if n == 0 {
        return Ok(Certified::ZERO);
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", "must be positive"));
    }
    match f.family() {
        Family1D::Explicit(c) => {
            let len = c.len();
            if start + 1 >= len {
                return Ok(Certified::ZERO);
            }
            let prefix = tail_prefix(&f.coefficients(len));
            let at = |m: usize| prefix[m.min(len - 1)];
            let s: CompensatedSum = (start..len - 1).map(|k| abs_pow(at(k + n) - at(k), p)).sum();
            Ok(Certified::exact(s.value()))
        }
        Family1D::Geometric { base } => {
            let r = base.recip();
            let w0: f64 = f.coefficients(n + 1)[1..].iter().copied().sum::<CompensatedSum>().value();
            let q = r.powf(p);
            Ok(Certified::exact(abs_pow(w0, p) * q.powf(start as f64) / (1.0 - q)))
        }
        Family1D::Hyperbolic { beta, sign, .. } => {
            let (beta, sign) = (*beta, *sign);
            let decay = match sign {
                SignPattern::Alternating if n.is_multiple_of(2) => p * (beta + 1.0),
                _ => p * beta,
            };
            if decay <= 1.0 {
                return Err(Error::Certificate(format!(
                    "partial-sum weights are not {p}-summable (beta = {beta})"
                )));
            }
            let scale = f.scale();
            let mut cut = MIN_CUTOFF.max(8 * n).max(start + 1).next_power_of_two();
            loop {
                let coeffs = f.coefficients(cut + n + 1);
                let prefix = tail_prefix(&coeffs);
                let direct: CompensatedSum = (start..cut)
                    .map(|k| abs_pow(prefix[k + n] - prefix[k], p))
                    .sum();
                let g = |x: f64| hyperbolic_window(beta, sign, scale, n, x).powf(p);
                let tail = smooth_tail_sum(g, cut as f64, decay, 0.5 * tol)?;
                if tail.bound <= 0.5 * tol || cut >= MAX_CUTOFF {
                    if tail.bound > tol {
                        return Err(Error::ToleranceUnreachable {
                            tol,
                            reason: format!("window tail bound {:.3e} at cut-off {cut}", tail.bound),
                        });
                    }
                    return Ok(Certified::exact(direct.value()) + tail);
                }
                cut *= 2;
            }
        }
    }
}

/// `A_n^alpha` for innovations in the normal domain of attraction of SαS.
pub fn exact_norm_a_alpha(f: &Filter1D, n: usize, alpha: f64, tol: f64) -> Result<Certified> {
    check_alpha(alpha)?;
    let head = head_power_sum(f, n, alpha);
    Ok(window_power_sum(f, n, alpha, 0, tol)? + Certified::exact(head))
}

/// `A_n^2 = Var S_n` for unit-variance innovations.
pub fn exact_variance_a2(f: &Filter1D, n: usize, tol: f64) -> Result<Certified> {
    exact_norm_a_alpha(f, n, 2.0, tol)
}

/// `A_n^alpha` with tolerance relative to the finite part of the sum.
pub(crate) fn norm_relative(f: &Filter1D, n: usize, alpha: f64, rel_tol: f64) -> Result<Certified> {
    check_alpha(alpha)?;
    let head = head_power_sum(f, n, alpha);
    let tol = rel_tol * head.max(f64::MIN_POSITIVE);
    Ok(window_power_sum(f, n, alpha, 0, tol)? + Certified::exact(head))
}

fn product_factors(f: &Filter2D) -> Result<(&Filter1D, &Filter1D)> {
    match f.family() {
        Family2D::Product(a, b) => Ok((a, b)),
        Family2D::Explicit(_) => Err(Error::Unsupported(
            "factorized rectangle scale needs a product filter".into(),
        )),
    }
}

fn certified_product(x: Certified, y: Certified) -> Certified {
    Certified {
        value: x.value * y.value,
        bound: x.bound * y.value.abs() + y.bound * x.value.abs() + x.bound * y.bound,
    }
}

/// `sum_{u,v} |sum_{t<=n, s<=m} c_{t-u, s-v}|^alpha` for a product filter,
/// which factorizes into the two one-dimensional norms.
pub fn field_norm_alpha(f: &Filter2D, n: usize, m: usize, alpha: f64, rel_tol: f64) -> Result<Certified> {
    let (a, b) = product_factors(f)?;
    let x = norm_relative(a, n, alpha, rel_tol)?;
    let y = norm_relative(b, m, alpha, rel_tol)?;
    Ok(certified_product(x, y))
}

/// `Var Z_{n,m}` for unit-variance innovations, `(D_1 + D_2)(E_1 + E_2)`.
///
/// Explicit filters fall back to summing squared rectangle weights, which
/// costs `O((n + rows)(m + cols))`.
pub fn field_scale_z(f: &Filter2D, n: usize, m: usize, tol: f64) -> Result<Certified> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", "must be positive"));
    }
    match f.family() {
        Family2D::Product(a, b) => {
            let x = exact_variance_a2(a, n, 0.25 * tol)?;
            let y = exact_variance_a2(b, m, 0.25 * tol)?;
            let first = certified_product(x, y);
            if first.bound <= tol {
                return Ok(first);
            }
            let tx = 0.25 * tol / (y.value.abs() + y.bound + 1.0);
            let ty = 0.25 * tol / (x.value.abs() + x.bound + 1.0);
            Ok(certified_product(
                exact_variance_a2(a, n, tx)?,
                exact_variance_a2(b, m, ty)?,
            ))
        }
        Family2D::Explicit(rows) => Ok(Certified::exact(explicit_rectangle_variance(rows, n, m))),
    }
}

fn explicit_rectangle_variance(rows: &[Vec<f64>], n: usize, m: usize) -> f64 {
    let r = rows.len();
    let c = rows.iter().map(Vec::len).max().unwrap_or(0);
    // 2-D prefix sums: p[i][j] = sum_{i' < i, j' < j} c_{i', j'}
    let mut p = vec![vec![0.0; c + 1]; r + 1];
    for i in 0..r {
        for j in 0..c {
            let v = rows[i].get(j).copied().unwrap_or(0.0);
            p[i + 1][j + 1] = v + p[i][j + 1] + p[i + 1][j] - p[i][j];
        }
    }
    let rect = |i0: i64, i1: i64, j0: i64, j1: i64| {
        // sum over [i0, i1] x [j0, j1] clipped to the support
        let ci = |x: i64| x.clamp(0, r as i64) as usize;
        let cj = |x: i64| x.clamp(0, c as i64) as usize;
        let (a0, a1, b0, b1) = (ci(i0), ci(i1 + 1), cj(j0), cj(j1 + 1));
        if a0 >= a1 || b0 >= b1 {
            return 0.0;
        }
        p[a1][b1] - p[a0][b1] - p[a1][b0] + p[a0][b0]
    };
    let (n, m) = (n as i64, m as i64);
    let mut acc = CompensatedSum::new();
    // Z = sum_{u,v} eps_{u,v} * sum_{t=1..n, s=1..m} c_{t-u, s-v}
    for u in (1 - r as i64)..=n {
        for v in (1 - c as i64)..=m {
            let w = rect(1 - u, n - u, 1 - v, m - v);
            acc.add(w * w);
        }
    }
    acc.value()
}
