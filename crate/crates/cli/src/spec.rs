//! Parsers for the filter mini-language and for grids.
//!
//! ```text
//! explicit:1,0.5,-0.25
//! geom:base=2[,scale=1]
//! hyper:beta=1.2[,sign=const|alt][,c0=zsum|<value>][,scale=1]
//! ```

use stablecov::{C0Mode, Error, Filter1D, Result, SignPattern};

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("`{key}`: `{v}` is not a number")))
}

fn key_values(body: &str) -> Result<Vec<(String, String)>> {
    body.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{kv}`")))?;
            Ok((k.trim().to_ascii_lowercase(), v.trim().to_string()))
        })
        .collect()
}

pub fn parse_filter(spec: &str, alpha: f64) -> Result<Filter1D> {
    let (kind, body) = spec
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("filter `{spec}` needs the form kind:params")))?;
    let mut scale = 1.0;
    let f = match kind.trim().to_ascii_lowercase().as_str() {
        "explicit" => {
            let coeffs = body
                .split(',')
                .map(|v| parse_f64("explicit", v))
                .collect::<Result<Vec<_>>>()?;
            Filter1D::explicit(coeffs, alpha)?
        }
        "geom" | "geometric" => {
            let mut base = None;
            for (k, v) in key_values(body)? {
                match k.as_str() {
                    "base" => base = Some(parse_f64("base", &v)?),
                    "scale" => scale = parse_f64("scale", &v)?,
                    _ => return Err(Error::Parse(format!("unknown geom key `{k}`"))),
                }
            }
            let base = base.ok_or_else(|| Error::Parse("geom filter needs base=".into()))?;
            Filter1D::geometric(base, alpha)?
        }
        "hyper" | "hyperbolic" => {
            let mut beta = None;
            let mut sign = SignPattern::Constant;
            let mut c0 = C0Mode::Value(1.0);
            for (k, v) in key_values(body)? {
                match k.as_str() {
                    "beta" => beta = Some(parse_f64("beta", &v)?),
                    "sign" => {
                        sign = match v.to_ascii_lowercase().as_str() {
                            "const" | "constant" => SignPattern::Constant,
                            "alt" | "alternating" => SignPattern::Alternating,
                            _ => return Err(Error::Parse(format!("sign must be const or alt, got `{v}`"))),
                        }
                    }
                    "c0" => {
                        c0 = if v.eq_ignore_ascii_case("zsum") {
                            C0Mode::ZeroSum
                        } else {
                            C0Mode::Value(parse_f64("c0", &v)?)
                        }
                    }
                    "scale" => scale = parse_f64("scale", &v)?,
                    _ => return Err(Error::Parse(format!("unknown hyper key `{k}`"))),
                }
            }
            let beta = beta.ok_or_else(|| Error::Parse("hyper filter needs beta=".into()))?;
            Filter1D::hyperbolic(beta, sign, c0, alpha)?
        }
        other => return Err(Error::Parse(format!("unknown filter kind `{other}`"))),
    };
    if scale == 1.0 {
        Ok(f)
    } else {
        f.scaled(scale)
    }
}

/// `"1,0.5;0.2,0.1"`: rows separated by `;`.
pub fn parse_matrix(spec: &str) -> Result<Vec<Vec<f64>>> {
    spec.split(';')
        .map(|row| row.split(',').map(|v| parse_f64("matrix", v)).collect())
        .collect()
}

/// `"a:b"` (inclusive) or a comma list.
pub fn parse_range(spec: &str) -> Result<Vec<i64>> {
    if let Some((a, b)) = spec.split_once(':') {
        let a: i64 = a.trim().parse().map_err(|_| Error::Parse(format!("bad range start `{a}`")))?;
        let b: i64 = b.trim().parse().map_err(|_| Error::Parse(format!("bad range end `{b}`")))?;
        if a > b {
            return Err(Error::Parse(format!("empty range {a}:{b}")));
        }
        Ok((a..=b).collect())
    } else {
        spec.split(',')
            .map(|v| v.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad integer `{v}`"))))
            .collect()
    }
}

/// Nonnegative lags.
pub fn parse_lags(spec: &str) -> Result<Vec<usize>> {
    parse_range(spec)?
        .into_iter()
        .map(|v| usize::try_from(v).map_err(|_| Error::Parse(format!("lag {v} must be nonnegative"))))
        .collect()
}

/// `"lo:hi"`: the powers of two in `[lo, hi]`; or an explicit comma list.
pub fn parse_grid(spec: &str) -> Result<Vec<usize>> {
    if let Some((a, b)) = spec.split_once(':') {
        let a: usize = a.trim().parse().map_err(|_| Error::Parse(format!("bad grid start `{a}`")))?;
        let b: usize = b.trim().parse().map_err(|_| Error::Parse(format!("bad grid end `{b}`")))?;
        let grid: Vec<usize> = (0..usize::BITS).map(|k| 1usize << k).filter(|&n| n >= a && n <= b).collect();
        if grid.is_empty() {
            return Err(Error::Parse(format!("grid {a}:{b} contains no power of two")));
        }
        Ok(grid)
    } else {
        let g = parse_lags(spec)?;
        if g.contains(&0) {
            return Err(Error::Parse("grid points must be positive".into()));
        }
        Ok(g)
    }
}

/// Periodic signs such as `"+-+--"`.
pub fn parse_signs(spec: &str) -> Result<Vec<f64>> {
    let s: Vec<f64> = spec
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '+' => Ok(1.0),
            '-' => Ok(-1.0),
            _ => Err(Error::Parse(format!("sign pattern may only contain + and -, got `{c}`"))),
        })
        .collect::<Result<_>>()?;
    if s.is_empty() {
        return Err(Error::Parse("empty sign pattern".into()));
    }
    Ok(s)
}
