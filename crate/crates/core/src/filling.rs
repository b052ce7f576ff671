//! Dehn filling: `I_M(x) = Σ_{m,e} K(m, e; p, q) I_N(m, e)`.
//!
//! The kernel is supported on three lines `pm + 2qe ∈ {0, ±2}`. Each line is
//! walked outward in both directions from its point nearest the origin,
//! tracking `d(t)`, the lowest exponent of the t-th term.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::index::CuspedIndexer;
use crate::series::{HalfExp, TruncatedSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Slope {
    pub p: i64,
    pub q: i64,
}

impl Slope {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if gcd(p, q) != 1 {
            return Err(Error::NotCoprime { p, q });
        }
        Ok(Slope { p, q })
    }

    /// The representative of `±(p, q)` with `q > 0`, or `(1, 0)`.
    pub fn canonical(self) -> Self {
        if self.q < 0 || (self.q == 0 && self.p < 0) {
            Slope { p: -self.p, q: -self.q }
        } else {
            self
        }
    }

    pub fn norm(self) -> i64 {
        self.p.abs() + self.q.abs()
    }

    /// Fraction notation: `1/0`, `0`, `p`, or `p/q` with positive denominator.
    pub fn notation(self) -> String {
        let Slope { p, q } = self.canonical();
        match q {
            0 => "1/0".to_string(),
            1 => p.to_string(),
            _ => format!("{p}/{q}"),
        }
    }
}

impl std::fmt::Display for Slope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.notation())
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `(g, x, y)` with `ax + by = g = gcd(a, b)`.
fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        return if a < 0 { (-a, -1, 0) } else { (a, 1, 0) };
    }
    let (g, x, y) = egcd(b, a.rem_euclid(b));
    (g, y, x - a.div_euclid(b) * y)
}

/// Some `(r, s)` with `qr - ps = 1`, normalized to `0 <= r < |p|` (`(1, 0)` when `p = 0`).
pub fn choose_rs(slope: Slope) -> (i64, i64) {
    let Slope { p, q } = slope;
    if p == 0 {
        return (q, 0);
    }
    // q r ≡ 1 (mod p)
    let (_, x, _) = egcd(q, p);
    let r = x.rem_euclid(p.abs());
    let s = (q * r - 1) / p;
    (r, s)
}

/// Twice the filling kernel at `(m, e)`, as an exact series.
pub fn kernel_doubled(m: i64, e: i64, slope: Slope, rs: (i64, i64)) -> Result<TruncatedSeries> {
    let Slope { p, q } = slope;
    let (r, s) = rs;
    if q * r - p * s != 1 {
        return Err(Error::BadRs {
            p,
            q,
            r,
            s,
            value: q * r - p * s,
        });
    }
    let sign = if (r * m).rem_euclid(2) == 0 { 1 } else { -1 };
    Ok(match p * m + 2 * q * e {
        0 => {
            let a = r * m + 2 * s * e;
            let up = TruncatedSeries::monomial(sign, HalfExp::from_twice(a));
            let down = TruncatedSeries::monomial(sign, HalfExp::from_twice(-a));
            &up + &down
        }
        2 | -2 => TruncatedSeries::monomial(-sign, HalfExp::ZERO),
        _ => TruncatedSeries::zero(HalfExp::EXACT),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FillOptions {
    pub tmax: u32,
    pub window: usize,
    pub warmup: u32,
    /// Consecutive above-cutoff terms that end a direction.
    pub margin: u32,
}

impl Default for FillOptions {
    fn default() -> Self {
        FillOptions {
            tmax: 256,
            window: 8,
            warmup: 16,
            margin: 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FillStatus {
    Converged,
    Divergent,
    Exhausted,
}

impl FillStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            FillStatus::Converged => "converged",
            FillStatus::Divergent => "divergent",
            FillStatus::Exhausted => "exhausted",
        }
    }
}

/// One direction along one support line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RayTrace {
    pub offset: i64,
    pub start: (i64, i64),
    pub step: (i64, i64),
    /// Twice `d(t)` for `t = 0, 1, 2, ...` along `step`; `None` for a zero term.
    pub twice_degrees: Vec<Option<i64>>,
    pub status: FillStatus,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FillDiagnostics {
    pub rs: (i64, i64),
    pub contributing_terms: usize,
    pub max_abs_t: i64,
    pub unsolvable_offsets: Vec<i64>,
    pub rays: Vec<RayTrace>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FilledIndexResult {
    pub slope: Slope,
    pub status: FillStatus,
    pub series: Option<TruncatedSeries>,
    pub diagnostics: FillDiagnostics,
}

pub fn filled_index(indexer: &CuspedIndexer, slope: Slope, cutoff: HalfExp, opts: FillOptions) -> Result<FilledIndexResult> {
    filled_index_with_rs(indexer, slope, choose_rs(slope), cutoff, opts)
}

pub fn filled_index_with_rs(
    indexer: &CuspedIndexer,
    slope: Slope,
    rs: (i64, i64),
    cutoff: HalfExp,
    opts: FillOptions,
) -> Result<FilledIndexResult> {
    kernel_doubled(0, 0, slope, rs)?;
    let Slope { p, q } = slope;
    let (g, x, y) = egcd(p, 2 * q);
    let step = (2 * q / g, -p / g);

    let mut acc = TruncatedSeries::zero(cutoff);
    let mut diagnostics = FillDiagnostics {
        rs,
        ..Default::default()
    };
    let mut status = FillStatus::Converged;

    'lines: for offset in [0, 2, -2] {
        if offset % g != 0 {
            diagnostics.unsolvable_offsets.push(offset);
            continue;
        }
        let start = if offset == -2 {
            let (m, e) = nearest_origin((x * 2 / g, y * 2 / g), step);
            (-m, -e)
        } else {
            nearest_origin((x * offset / g, y * offset / g), step)
        };
        let back = (start.0 - step.0, start.1 - step.1);
        for (origin, dir) in [(start, step), (back, (-step.0, -step.1))] {
            let ray = walk(indexer, slope, rs, offset, origin, dir, cutoff, opts, &mut acc, &mut diagnostics)?;
            let ray_status = ray.status;
            diagnostics.rays.push(ray);
            if ray_status != FillStatus::Converged {
                status = ray_status;
                break 'lines;
            }
        }
    }

    let series = match status {
        FillStatus::Converged => Some(
            acc.try_map_coeffs(|c| (c % 2 == 0).then_some(c / 2))
                .expect("filled index has a half-integer coefficient"),
        ),
        _ => None,
    };
    Ok(FilledIndexResult {
        slope,
        status,
        series,
        diagnostics,
    })
}

/// The point of `start + t·step` closest to the origin.
fn nearest_origin(start: (i64, i64), step: (i64, i64)) -> (i64, i64) {
    let num = -(start.0 * step.0 + start.1 * step.1);
    let den = step.0 * step.0 + step.1 * step.1;
    let t = (2 * num + den).div_euclid(2 * den);
    (start.0 + t * step.0, start.1 + t * step.1)
}

#[allow(clippy::too_many_arguments)]
fn walk(
    indexer: &CuspedIndexer,
    slope: Slope,
    rs: (i64, i64),
    offset: i64,
    origin: (i64, i64),
    dir: (i64, i64),
    cutoff: HalfExp,
    opts: FillOptions,
    acc: &mut TruncatedSeries,
    diagnostics: &mut FillDiagnostics,
) -> Result<RayTrace> {
    let mut trace = RayTrace {
        offset,
        start: origin,
        step: dir,
        twice_degrees: Vec::new(),
        status: FillStatus::Exhausted,
    };
    // d(t), with vanishing terms at EXACT
    let mut lows: Vec<HalfExp> = Vec::new();
    let mut above = 0u32;
    for t in 0..=opts.tmax as i64 {
        let (m, e) = (origin.0 + t * dir.0, origin.1 + t * dir.1);
        let kernel = kernel_doubled(m, e, slope, rs)?;
        let shift = if offset == 0 {
            HalfExp::from_twice((rs.0 * m + 2 * rs.1 * e).abs())
        } else {
            HalfExp::ZERO
        };
        let cusped = indexer.index(m, e, cutoff + shift)?;
        let low = match cusped.min_exp() {
            Some(d) => {
                let d = d - shift;
                trace.twice_degrees.push(Some(d.twice()));
                d
            }
            None => {
                trace.twice_degrees.push(None);
                HalfExp::EXACT
            }
        };
        lows.push(low);
        diagnostics.max_abs_t = diagnostics.max_abs_t.max(t);
        if low <= cutoff {
            diagnostics.contributing_terms += 1;
            *acc = &*acc + &kernel.mul_upto(&cusped, cutoff);
            above = 0;
        } else {
            above += 1;
        }

        let w = opts.window;
        if t > opts.warmup as i64 && lows.len() >= w {
            let window = &lows[lows.len() - w..];
            let last = window[w - 1];
            if last <= cutoff && window[..w - 1].iter().all(|&d| last <= d) {
                trace.status = FillStatus::Divergent;
                return Ok(trace);
            }
        }
        let n = lows.len();
        let margin = opts.margin as usize;
        if above >= opts.margin && n > margin && lows[n - 1] >= lows[n - 1 - margin] {
            trace.status = FillStatus::Converged;
            return Ok(trace);
        }
    }
    Ok(trace)
}
