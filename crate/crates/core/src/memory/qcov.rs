//! Q-covariance of an infinitely divisible vector in the plane,
//! `kappa = int x_1 x_2 / max(1, |x|^2) Q(dx)` for its Lévy measure `Q`.

use crate::error::{Error, Result};
use crate::spectral::SpectralMeasure;

#[derive(Debug, Clone, PartialEq)]
pub enum LevyPolarMeasure {
    /// Point masses `(x, mass)`.
    Atoms(Vec<([f64; 2], f64)>),
    /// `Q(dr, ds) = r^{-1-alpha} dr Gamma(ds)`, the Lévy measure of an SαS
    /// vector with angular part `Gamma`.
    Polar(SpectralMeasure),
}

/// `int_0^inf r^{1-alpha} / max(1, r^2) dr = 1/(2-alpha) + 1/alpha`.
pub fn radial_constant(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::invalid("alpha", format!("polar Lévy measure needs alpha in (0, 2), got {alpha}")));
    }
    Ok(1.0 / (2.0 - alpha) + 1.0 / alpha)
}

fn atom_term(x: [f64; 2], mass: f64) -> f64 {
    x[0] * x[1] * mass / (x[0] * x[0] + x[1] * x[1]).max(1.0)
}

pub fn q_covariance(q: &LevyPolarMeasure) -> Result<f64> {
    match q {
        LevyPolarMeasure::Atoms(atoms) => {
            for (x, m) in atoms {
                if !(m.is_finite() && *m >= 0.0) || !x.iter().all(|v| v.is_finite()) {
                    return Err(Error::invalid("atoms", "need finite points and nonnegative finite masses"));
                }
            }
            Ok(atoms.iter().map(|&(x, m)| atom_term(x, m)).sum())
        }
        LevyPolarMeasure::Polar(gamma) => {
            if gamma.dim() != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    got: gamma.dim(),
                });
            }
            Ok(gamma.alpha_covariance(0, 1)? * radial_constant(gamma.alpha())?)
        }
    }
}

/// Replace the radial part of a polar measure by `radial` point masses per
/// direction. Cells are equal in `kappa`-weight: `r = u^{1/(2-alpha)}` on
/// `(0, 1)` and `r = v^{-1/alpha}` on `(1, inf)`, with the atom at the
/// image of the cell midpoint carrying the exact radial mass of the cell.
pub fn discretize_polar(gamma: &SpectralMeasure, radial: usize) -> Result<LevyPolarMeasure> {
    let a = gamma.alpha();
    radial_constant(a)?;
    if gamma.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: gamma.dim(),
        });
    }
    if radial < 2 {
        return Err(Error::invalid("radial", "need at least two radial cells"));
    }
    let inner = radial / 2;
    let outer = radial - inner;
    // mass of r^{-1-a} dr over (r0, r1) is (r0^{-a} - r1^{-a}) / a
    let mass = |r0: f64, r1: f64| (r0.powf(-a) - if r1.is_finite() { r1.powf(-a) } else { 0.0 }) / a;
    let mut cells: Vec<(f64, f64)> = Vec::with_capacity(radial);
    let to_inner = |u: f64| u.powf(1.0 / (2.0 - a));
    for i in 0..inner {
        let (u0, u1) = (i as f64 / inner as f64, (i + 1) as f64 / inner as f64);
        let um = 0.5 * (u0 + u1);
        // first cell starts at r = 0 where the mass is infinite; use the
        // kappa-equivalent mass instead
        let m = if i == 0 {
            let r1 = to_inner(u1);
            let rm = to_inner(um);
            r1.powf(2.0 - a) / (2.0 - a) / (rm * rm)
        } else {
            mass(to_inner(u0), to_inner(u1))
        };
        cells.push((to_inner(um), m));
    }
    let to_outer = |v: f64| v.powf(-1.0 / a);
    for i in 0..outer {
        let (v0, v1) = (i as f64 / outer as f64, (i + 1) as f64 / outer as f64);
        let vm = 0.5 * (v0 + v1);
        cells.push((to_outer(vm), mass(to_outer(v1), to_outer(v0))));
    }
    let mut atoms = Vec::with_capacity(radial * gamma.len());
    for (s, w) in gamma.atoms() {
        for &(r, m) in &cells {
            atoms.push(([r * s[0], r * s[1]], m * w));
        }
    }
    Ok(LevyPolarMeasure::Atoms(atoms))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diagonal(alpha: f64) -> SpectralMeasure {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let atoms: [(&[f64], f64); 2] = [(&[h, h], 0.5), (&[-h, -h], 0.5)];
        SpectralMeasure::from_vectors(2, alpha, atoms).unwrap()
    }

    #[test]
    fn axis_atoms_give_zero() {
        let q = LevyPolarMeasure::Atoms(vec![([3.0, 0.0], 1.0), ([0.0, -0.2], 5.0)]);
        assert_eq!(q_covariance(&q).unwrap(), 0.0);
    }

    #[test]
    fn atoms_match_direct_sum() {
        let atoms = vec![([0.5, 0.5], 2.0), ([2.0, -1.0], 0.5), ([-0.1, -3.0], 1.5)];
        let direct = 0.25 * 2.0 / 1.0 + (-2.0) * 0.5 / 5.0 + 0.3 * 1.5 / 9.01;
        assert!((q_covariance(&LevyPolarMeasure::Atoms(atoms)).unwrap() - direct).abs() < 1e-15);
    }

    #[test]
    fn polar_discretization_matches_analytic() {
        for &a in &[0.5, 1.0, 1.5] {
            let g = diagonal(a);
            let exact = q_covariance(&LevyPolarMeasure::Polar(g.clone())).unwrap();
            assert!((exact - 0.5 * radial_constant(a).unwrap()).abs() < 1e-15);
            let approx = q_covariance(&discretize_polar(&g, 5000).unwrap()).unwrap();
            assert!((approx - exact).abs() < 1e-3 * exact, "a={a}: {approx} vs {exact}");
        }
    }

    #[test]
    fn polar_requires_alpha_below_two() {
        let g = diagonal(2.0);
        assert!(q_covariance(&LevyPolarMeasure::Polar(g)).is_err());
        let q = LevyPolarMeasure::Atoms(vec![([1.0, 1.0], -1.0)]);
        assert!(q_covariance(&q).is_err());
    }
}
