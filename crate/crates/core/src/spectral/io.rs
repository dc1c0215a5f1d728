//! CSV form: a JSON header line `{"dim", "alpha", "symmetric"}` followed by
//! a `s1,...,sd,weight` header and one row per atom.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::SpectralMeasure;
use crate::error::{Error, Result};
use crate::table::fmt17;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralHeader {
    pub dim: usize,
    pub alpha: f64,
    pub symmetric: bool,
}

pub fn write_spectral_csv<W: Write>(m: &SpectralMeasure, mut w: W) -> std::io::Result<()> {
    let header = SpectralHeader {
        dim: m.dim(),
        alpha: m.alpha(),
        symmetric: m.is_symmetric(),
    };
    writeln!(w, "{}", serde_json::to_string(&header)?)?;
    let mut cols: Vec<String> = (1..=m.dim()).map(|i| format!("s{i}")).collect();
    cols.push("weight".into());
    writeln!(w, "{}", cols.join(","))?;
    for (s, wt) in m.atoms() {
        let mut row: Vec<String> = s.iter().map(|&x| fmt17(x)).collect();
        row.push(fmt17(wt));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// Parse the CSV form. A `symmetric: true` header is verified against the
/// atoms.
pub fn read_spectral_csv<R: BufRead>(r: R) -> Result<SpectralMeasure> {
    let mut lines = r.lines();
    let mut next = || -> Result<Option<String>> {
        for line in lines.by_ref() {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            let t = line.trim();
            if !t.is_empty() {
                return Ok(Some(t.to_string()));
            }
        }
        Ok(None)
    };
    let head = next()?.ok_or_else(|| Error::Parse("empty spectral measure file".into()))?;
    let header: SpectralHeader =
        serde_json::from_str(&head).map_err(|e| Error::Parse(format!("header: {e}")))?;
    let cols = next()?.ok_or_else(|| Error::Parse("missing column header".into()))?;
    if cols.split(',').count() != header.dim + 1 {
        return Err(Error::Parse(format!(
            "expected {} columns, found `{cols}`",
            header.dim + 1
        )));
    }
    let mut m = SpectralMeasure::new(header.dim, header.alpha)?;
    let mut lineno = 2;
    while let Some(row) = next()? {
        lineno += 1;
        let vals: Vec<f64> = row
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("line {lineno}: {e}")))?;
        if vals.len() != header.dim + 1 {
            return Err(Error::Parse(format!("line {lineno}: wrong number of fields")));
        }
        m.push(&vals[..header.dim], vals[header.dim])?;
    }
    if header.symmetric && !m.detect_symmetry() {
        return Err(Error::invalid("symmetric", "header claims symmetry but atoms are not paired"));
    }
    if !header.symmetric {
        m.symmetric = false;
    }
    Ok(m)
}
