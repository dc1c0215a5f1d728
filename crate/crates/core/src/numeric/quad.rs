//! Globally adaptive Gauss–Kronrod (7/15 pair extended to 10/21) quadrature.
//!
//! Semi-infinite pieces are mapped onto `(0, 1]` with `x = a + (1 - t) / t`,
//! which turns exponentially and polynomially decaying integrands into finite
//! (possibly endpoint-singular) ones. Breakpoints split the domain so that
//! indicator edges never fall inside a Kronrod panel.

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_22,
    0.0,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_725,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_96,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_84,
    0.134_709_217_311_473_34,
    0.142_775_938_577_060_09,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

/// Tolerances and budget for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 0.0,
            max_panels: 4000,
        }
    }
}

impl Quadrature {
    pub fn with_abs_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }
}

/// Value of an integral together with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
enum Piece {
    Finite,
    /// `[origin, +inf)` through `x = origin + (1 - t) / t`.
    Upper(f64),
    /// `(-inf, origin]` through `x = origin - (1 - t) / t`.
    Lower(f64),
}

impl Piece {
    #[inline]
    fn eval<F: Fn(f64) -> f64>(&self, f: &F, t: f64) -> f64 {
        match *self {
            Piece::Finite => f(t),
            Piece::Upper(a) => {
                let x = a + (1.0 - t) / t;
                mapped(f(x), t)
            }
            Piece::Lower(b) => {
                let x = b - (1.0 - t) / t;
                mapped(f(x), t)
            }
        }
    }
}

#[inline]
fn mapped(fx: f64, t: f64) -> f64 {
    if fx == 0.0 {
        0.0
    } else {
        let v = fx / (t * t);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    piece: usize,
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    splittable: bool,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, piece: Piece, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = piece.eval(f, center);
    let mut res_g = 0.0;
    let mut res_k = fc * WGK[10];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..5 {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let f1 = piece.eval(f, center - dx);
        let f2 = piece.eval(f, center + dx);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g += WG[j] * (f1 + f2);
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let jtw = 2 * j;
        let dx = half * XGK[jtw];
        let f1 = piece.eval(f, center - dx);
        let f2 = piece.eval(f, center + dx);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let err = (res_k - res_g) * half;
    let abs_half = half.abs();
    (
        res_k * half,
        rescale_error(err, res_abs * abs_half, res_asc * abs_half),
    )
}

/// Integrate `f` over `[a, b]`; either end may be infinite.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: Quadrature) -> Result<Integral> {
    integrate_with_breaks(f, &[a, b], opts)
}

/// Integrate `f` over `[points[0], points[last]]`, splitting at every interior
/// point. The outer points may be infinite; interior points must be finite
/// and the list must be non-decreasing.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    opts: Quadrature,
) -> Result<Integral> {
    if points.len() < 2 {
        return Err(Error::invalid("points", "need at least two points"));
    }
    if points.iter().any(|p| p.is_nan()) || points.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("points", "must be non-decreasing"));
    }
    if points[1..points.len() - 1].iter().any(|p| !p.is_finite()) {
        return Err(Error::invalid("points", "interior breakpoints must be finite"));
    }

    let mut pieces = Vec::new();
    let mut panels = Vec::new();
    let last = points.len() - 2;
    for (idx, w) in points.windows(2).enumerate() {
        let (lo, hi) = (w[0], w[1]);
        if lo == hi {
            continue;
        }
        let (piece, ta, tb) = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => (Piece::Finite, lo, hi),
            (true, false) => (Piece::Upper(lo), 0.0, 1.0),
            (false, true) => (Piece::Lower(hi), 0.0, 1.0),
            (false, false) => {
                debug_assert!(idx == 0 && idx == last);
                // split the real line at zero
                pieces.push(Piece::Lower(0.0));
                let (v, e) = gauss_kronrod(&f, Piece::Lower(0.0), 0.0, 1.0);
                panels.push(Panel {
                    piece: pieces.len() - 1,
                    a: 0.0,
                    b: 1.0,
                    value: v,
                    error: e,
                    splittable: true,
                });
                (Piece::Upper(0.0), 0.0, 1.0)
            }
        };
        pieces.push(piece);
        let (v, e) = gauss_kronrod(&f, piece, ta, tb);
        panels.push(Panel {
            piece: pieces.len() - 1,
            a: ta,
            b: tb,
            value: v,
            error: e,
            splittable: true,
        });
    }

    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if !value.is_finite() {
            return Err(Error::NoConvergence {
                error: f64::INFINITY,
                tol: opts.abs_tol,
            });
        }
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= target {
            return Ok(Integral { value, error });
        }
        let worst = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| p.splittable)
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i);
        let Some(worst) = worst else {
            return Err(Error::NoConvergence {
                error,
                tol: target,
            });
        };
        if panels.len() >= opts.max_panels {
            return Err(Error::NoConvergence {
                error,
                tol: target,
            });
        }
        let p = panels[worst];
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) || (p.b - p.a) < 64.0 * f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE) {
            panels[worst].splittable = false;
            continue;
        }
        let piece = pieces[p.piece];
        let (v1, e1) = gauss_kronrod(&f, piece, p.a, mid);
        let (v2, e2) = gauss_kronrod(&f, piece, mid, p.b);
        panels[worst] = Panel {
            b: mid,
            value: v1,
            error: e1,
            ..p
        };
        panels.push(Panel {
            a: mid,
            value: v2,
            error: e2,
            ..p
        });
    }
}
