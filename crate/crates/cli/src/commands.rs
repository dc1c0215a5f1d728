//! Subcommand bodies. Each returns an [`Output`]: a numeric table plus an
//! optional JSON object of summaries.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde_json::{json, Value};
use stablecov::field::{field_dependence, Filter2D};
use stablecov::integral::{ou_row, OUParams};
use stablecov::memory::{
    self, classify_directional, directional_curves, q_covariance, Bands, InnovationLaw, LevyPolarMeasure,
    MemoryReport, ScalePoint,
};
use stablecov::numeric::ols;
use stablecov::process::{hyperbolic_decay, process_dependence, rho_n_batch};
use stablecov::spectral::{
    default_tail_count, estimate_spectral_from_samples, read_spectral_csv, write_spectral_csv,
};
use stablecov::table::Table;
use stablecov::{C0Mode, Error, Filter1D, SignPattern, SpectralMeasure};

use crate::spec::{parse_filter, parse_grid, parse_lags, parse_matrix, parse_range, parse_signs};
use crate::{Format, Law};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("cannot read input: {0}")]
    Input(std::io::Error),
    #[error("cannot write output: {0}")]
    Output(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if !e.is_validation() => 1,
            CliError::Lib(_) | CliError::Input(_) => 2,
            CliError::Output(_) => 1,
        }
    }
}

pub enum Output {
    Table { table: Table, summary: Option<Value> },
    Spectral { measure: SpectralMeasure, summary: Value },
}

impl Output {
    fn table(table: Table) -> Self {
        Output::Table { table, summary: None }
    }

    /// CSV goes to `w` with summaries on stderr; JSON merges both.
    pub fn write<W: Write>(&self, w: &mut W, format: Format) -> Result<(), CliError> {
        let io = CliError::Output;
        match (self, format) {
            (Output::Table { table, summary }, Format::Csv) => {
                table.write_csv(&mut *w).map_err(io)?;
                if let Some(s) = summary {
                    eprintln!("{}", serde_json::to_string_pretty(s).unwrap_or_default());
                }
            }
            (Output::Table { table, summary }, Format::Json) => {
                let v = match summary {
                    Some(Value::Object(m)) => {
                        let mut m = m.clone();
                        m.insert("rows".into(), table.to_json());
                        Value::Object(m)
                    }
                    _ => table.to_json(),
                };
                writeln!(w, "{}", serde_json::to_string_pretty(&v).unwrap_or_default()).map_err(io)?;
            }
            (Output::Spectral { measure, summary }, Format::Csv) => {
                write_spectral_csv(measure, &mut *w).map_err(io)?;
                eprintln!("{}", serde_json::to_string_pretty(summary).unwrap_or_default());
            }
            (Output::Spectral { measure, summary }, Format::Json) => {
                let atoms: Vec<Value> = measure.atoms().map(|(s, wt)| json!({"direction": s, "weight": wt})).collect();
                let v = json!({
                    "dim": measure.dim(),
                    "alpha": measure.alpha(),
                    "symmetric": measure.is_symmetric(),
                    "atoms": atoms,
                    "summary": summary,
                });
                writeln!(w, "{}", serde_json::to_string_pretty(&v).unwrap_or_default()).map_err(io)?;
            }
        }
        Ok(())
    }
}

pub fn process_deps(alpha: f64, filter: &str, lags: &str, tol: f64) -> Result<Output, CliError> {
    let f = parse_filter(filter, alpha)?;
    let lags = parse_lags(lags)?;
    let rows = process_dependence(&f, &lags, tol)?;
    let mut t = Table::new(["n", "rho", "rho_tilde", "codifference", "covariation", "tail_bound"]);
    for r in rows {
        t.push(vec![
            r.n as f64,
            r.rho,
            r.rho_tilde,
            r.codifference,
            r.covariation.unwrap_or(f64::NAN),
            r.tail_bound,
        ]);
    }
    Ok(Output::table(t))
}

pub fn field_deps(
    alpha: f64,
    filter_a: Option<&str>,
    filter_b: Option<&str>,
    matrix: Option<&str>,
    n_lags: &str,
    m_lags: &str,
    tol: f64,
) -> Result<Output, CliError> {
    let f = match (filter_a, filter_b, matrix) {
        (Some(a), Some(b), None) => Filter2D::product(parse_filter(a, alpha)?, parse_filter(b, alpha)?)?,
        (None, None, Some(m)) => Filter2D::explicit(parse_matrix(m)?, alpha)?,
        _ => {
            return Err(Error::Parse("give either --filter-a and --filter-b, or --matrix".into()).into());
        }
    };
    let ns = parse_range(n_lags)?;
    let ms = parse_range(m_lags)?;
    let lags: Vec<(i64, i64)> = ns.iter().flat_map(|&n| ms.iter().map(move |&m| (n, m))).collect();
    let rows = field_dependence(&f, &lags, tol)?;
    let mut t = Table::new(["n", "m", "rho", "rho_tilde", "tail_bound"]);
    for r in rows {
        t.push(vec![r.n as f64, r.m as f64, r.rho, r.rho_tilde, r.tail_bound]);
    }
    Ok(Output::table(t))
}

pub fn ou(alpha: f64, lambda: f64, tmax: f64, steps: usize) -> Result<Output, CliError> {
    let p = OUParams::new(lambda, alpha)?;
    if !(tmax >= 0.0 && tmax.is_finite()) {
        return Err(Error::Parse("tmax must be a nonnegative number".into()).into());
    }
    if steps == 0 {
        return Err(Error::Parse("steps must be positive".into()).into());
    }
    let mut t = Table::new(["t", "rho", "rho_normalized", "codifference", "codifference_normalized"]);
    for i in 0..=steps {
        let r = ou_row(tmax * i as f64 / steps as f64, p);
        t.push(vec![r.t, r.rho, r.rho_normalized, r.codifference, r.codifference_normalized]);
    }
    Ok(Output::table(t))
}

fn curve_table(curve: &[ScalePoint]) -> Table {
    let mut t = Table::new(["n", "scale", "log_n", "log_scale", "bound"]);
    for p in curve {
        t.push(vec![p.n as f64, p.scale, (p.n as f64).ln(), p.scale.ln(), p.bound]);
    }
    t
}

fn bands(band: f64) -> Result<Bands, CliError> {
    if !(band >= 0.0 && band.is_finite()) {
        return Err(Error::Parse("band must be a nonnegative number".into()).into());
    }
    Ok(Bands {
        band0: band,
        ..Bands::default()
    })
}

fn report_output(curve: &[ScalePoint], report: &MemoryReport) -> Output {
    Output::Table {
        table: curve_table(curve),
        summary: Some(serde_json::to_value(report).unwrap_or(Value::Null)),
    }
}

pub fn memory_exact(alpha: f64, filter: &str, grid: &str, band: f64) -> Result<Output, CliError> {
    let f = parse_filter(filter, alpha)?;
    let grid = parse_grid(grid)?;
    let (curve, report) = memory::memory_exact(&f, alpha, &grid, bands(band)?)?;
    Ok(report_output(&curve, &report))
}

#[allow(clippy::too_many_arguments)]
pub fn memory_sim(
    alpha: f64,
    filter: &str,
    law: Law,
    scale: f64,
    grid: &str,
    reps: usize,
    seed: u64,
    band: f64,
) -> Result<Output, CliError> {
    let f = parse_filter(filter, alpha)?;
    let law = match law {
        Law::Sas => InnovationLaw::sas(alpha)?,
        Law::Gaussian => {
            if alpha != 2.0 {
                return Err(Error::Parse("gaussian innovations need --alpha 2".into()).into());
            }
            InnovationLaw::gaussian(1.0)?
        }
        Law::Pareto => InnovationLaw::pareto(alpha, scale)?,
    };
    let grid = parse_grid(grid)?;
    let (curve, report) = memory::memory_sim(&f, law, &grid, reps, seed, bands(band)?)?;
    Ok(report_output(&curve, &report))
}

pub fn memory_field(
    alpha: f64,
    filter_a: &str,
    filter_b: &str,
    grid_n: &str,
    grid_m: &str,
    band: f64,
) -> Result<Output, CliError> {
    let f = Filter2D::product(parse_filter(filter_a, alpha)?, parse_filter(filter_b, alpha)?)?;
    let gn = parse_grid(grid_n)?;
    let gm = parse_grid(grid_m)?;
    let b = bands(band)?;
    let (rt, rs) = classify_directional(&f, alpha, &gn, &gm, b)?;
    let n_max = *gn.iter().max().unwrap_or(&1);
    let m_max = *gm.iter().max().unwrap_or(&1);
    let (ct, cs) = directional_curves(&f, alpha, &gn, &gm, n_max, m_max)?;
    let mut t = Table::new(["axis", "n", "scale", "log_n", "log_scale", "bound"]);
    for (axis, curve) in [(0.0, &ct), (1.0, &cs)] {
        for p in curve.iter() {
            t.push(vec![axis, p.n as f64, p.scale, (p.n as f64).ln(), p.scale.ln(), p.bound]);
        }
    }
    Ok(Output::Table {
        table: t,
        summary: Some(json!({ "t_axis": rt, "s_axis": rs })),
    })
}

fn read_samples(path: &Path) -> Result<Vec<[f64; 2]>, CliError> {
    let file = File::open(path).map_err(CliError::Input)?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(CliError::Input)?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let vals: Vec<&str> = line.split(',').collect();
        let parsed: Option<Vec<f64>> = vals.iter().map(|v| v.trim().parse().ok()).collect();
        match parsed {
            Some(v) if v.len() == 2 => out.push([v[0], v[1]]),
            None if i == 0 => continue,
            _ => {
                return Err(Error::Parse(format!("line {}: expected two numbers, got `{line}`", i + 1)).into());
            }
        }
    }
    Ok(out)
}

pub fn spectral_estimate(input: &Path, k: Option<usize>) -> Result<Output, CliError> {
    let samples = read_samples(input)?;
    let k = k.unwrap_or_else(|| default_tail_count(samples.len()));
    let m = estimate_spectral_from_samples(&samples, k)?;
    let s = m.summary()?;
    let summary = json!({
        "samples": samples.len(),
        "k": k,
        "alpha": m.alpha(),
        "rho": s.rho,
        "rho_tilde": s.rho_tilde,
        "codifference": s.codifference,
        "covariation": s.covariation,
    });
    Ok(Output::Spectral { measure: m, summary })
}

pub fn qcov(atoms: Option<&str>, spectral: Option<&Path>, radial: usize) -> Result<Output, CliError> {
    match (atoms, spectral) {
        (Some(a), None) => {
            let rows = parse_matrix(a)?;
            let atoms = rows
                .into_iter()
                .map(|r| match r[..] {
                    [x, y, m] => Ok(([x, y], m)),
                    _ => Err(Error::Parse("each atom needs x1,x2,mass".into())),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut t = Table::new(["kappa"]);
            t.push(vec![q_covariance(&LevyPolarMeasure::Atoms(atoms))?]);
            Ok(Output::table(t))
        }
        (None, Some(path)) => {
            let file = File::open(path).map_err(CliError::Input)?;
            let gamma = read_spectral_csv(BufReader::new(file))?;
            let exact = q_covariance(&LevyPolarMeasure::Polar(gamma.clone()))?;
            let approx = q_covariance(&memory::discretize_polar(&gamma, radial)?)?;
            let mut t = Table::new(["kappa", "discretized", "abs_difference"]);
            t.push(vec![exact, approx, (exact - approx).abs()]);
            Ok(Output::table(t))
        }
        _ => Err(Error::Parse("give exactly one of --atoms or --spectral".into()).into()),
    }
}

fn parse_sign(sign: &str) -> Result<SignPattern, CliError> {
    match sign {
        "const" | "constant" => Ok(SignPattern::Constant),
        "alt" | "alternating" => Ok(SignPattern::Alternating),
        _ => Err(Error::Parse(format!("sign must be const or alt, got `{sign}`")).into()),
    }
}

pub fn zero_sum_decay(alpha: f64, beta: f64, sign: &str, grid: &str, tol: f64) -> Result<Output, CliError> {
    let f = Filter1D::hyperbolic(beta, parse_sign(sign)?, C0Mode::ZeroSum, alpha)?;
    let grid = parse_grid(grid)?;
    let rho = rho_n_batch(&f, &grid, tol)?;
    let mut t = Table::new(["n", "rho", "tail_bound"]);
    for (n, r) in grid.iter().zip(&rho) {
        t.push(vec![*n as f64, r.value, r.bound]);
    }
    let pts: Vec<(f64, f64)> = grid
        .iter()
        .zip(&rho)
        .filter(|(_, r)| r.value != 0.0)
        .map(|(n, r)| ((*n as f64).ln(), r.value.abs().ln()))
        .collect();
    let fit = if pts.len() >= 3 {
        let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        Some(ols(&x, &y)?)
    } else {
        None
    };
    let summary = json!({
        "alpha": alpha,
        "beta": beta,
        "slope": fit.map(|f| f.slope),
        "slope_stderr": fit.map(|f| f.slope_stderr),
        "conjectured_exponent": 1.0 - beta * alpha,
        "nonzero_sum_exponent": hyperbolic_decay(alpha, beta).exponent(),
    });
    Ok(Output::Table { table: t, summary: Some(summary) })
}

pub fn sign_pattern(alpha: f64, beta: f64, signs: &str, length: usize, grid: &str) -> Result<Output, CliError> {
    let s = parse_signs(signs)?;
    let grid = parse_grid(grid)?;
    let n_max = grid.iter().copied().max().unwrap_or(0);
    if length < 8 * n_max {
        return Err(Error::Parse(format!("length {length} must be at least 8 times the largest grid point")).into());
    }
    let mut c: Vec<f64> = (0..length)
        .map(|k| if k == 0 { 0.0 } else { s[(k - 1) % s.len()] * (k as f64).powf(-beta) })
        .collect();
    c[0] = -c[1..].iter().sum::<f64>();
    let f = Filter1D::explicit(c, alpha)?;
    let (curve, report) = memory::memory_exact(&f, alpha, &grid, Bands::default())?;
    Ok(report_output(&curve, &report))
}
