//! Exceptional-slope prediction from filled indices.
//!
//! A filled index that vanishes or equals 1 marks a non-hyperbolic filling,
//! as does a divergent sum; a series `1 + ...` with further nonzero terms is
//! read as hyperbolic. Vanishing indices are reported as Lens-space
//! candidates.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::filling::{filled_index, FillOptions, FillStatus, FilledIndexResult, Slope};
use crate::manifold::Manifold;
use crate::series::{HalfExp, TruncatedSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeClassKind {
    Hyperbolic,
    NonHyperbolicZero,
    NonHyperbolicOne,
    NonHyperbolicDivergent,
    Indeterminate,
}

impl SlopeClassKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SlopeClassKind::Hyperbolic => "hyperbolic",
            SlopeClassKind::NonHyperbolicZero => "non_hyperbolic_zero",
            SlopeClassKind::NonHyperbolicOne => "non_hyperbolic_one",
            SlopeClassKind::NonHyperbolicDivergent => "non_hyperbolic_divergent",
            SlopeClassKind::Indeterminate => "indeterminate",
        }
    }

    pub fn is_exceptional(self) -> bool {
        self != SlopeClassKind::Hyperbolic
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SlopeClass {
    pub kind: SlopeClassKind,
    /// Order through which the deciding pattern was checked.
    pub evidence_order: HalfExp,
}

pub fn classify(result: &FilledIndexResult, sharp: HalfExp) -> SlopeClass {
    let series = match (result.status, &result.series) {
        (FillStatus::Converged, Some(s)) => s,
        (FillStatus::Divergent, _) => {
            return SlopeClass {
                kind: SlopeClassKind::NonHyperbolicDivergent,
                evidence_order: result.series.as_ref().map_or(sharp, TruncatedSeries::cutoff),
            }
        }
        _ => {
            return SlopeClass {
                kind: SlopeClassKind::Indeterminate,
                evidence_order: HalfExp::ZERO,
            }
        }
    };
    classify_series(series, sharp)
}

pub fn classify_series(series: &TruncatedSeries, sharp: HalfExp) -> SlopeClass {
    let upto = sharp.min(series.cutoff());
    let head = series.truncate(upto);
    let one = TruncatedSeries::constant(1, upto);
    let kind = if head.is_zero() {
        SlopeClassKind::NonHyperbolicZero
    } else if head == one {
        SlopeClassKind::NonHyperbolicOne
    } else if series.min_exp() == Some(HalfExp::ZERO) && series.coeff(HalfExp::ZERO) == Some(1) {
        SlopeClassKind::Hyperbolic
    } else {
        SlopeClassKind::Indeterminate
    };
    let evidence_order = match kind {
        SlopeClassKind::Hyperbolic => series.terms().nth(1).map_or(upto, |(d, _)| d),
        _ => upto,
    };
    SlopeClass { kind, evidence_order }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SlopeReport {
    /// Slope in the manifold's reported coordinates.
    pub slope: Slope,
    pub notation: String,
    pub class: SlopeClass,
    pub result: FilledIndexResult,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub manifold: String,
    pub cutoff: HalfExp,
    pub sharp: HalfExp,
    pub reports: Vec<SlopeReport>,
    pub exceptional: Vec<String>,
    pub lens_candidates: Vec<String>,
}

/// Canonical coprime slopes with `|p| + |q| <= max_norm`, ordered by `(|p|+|q|, p, q)`.
pub fn slopes_up_to(max_norm: i64) -> Vec<Slope> {
    let mut out = Vec::new();
    for q in 0..=max_norm {
        for p in -max_norm..=max_norm {
            if p.abs() + q <= max_norm {
                if let Ok(s) = Slope::new(p, q) {
                    if s.canonical() == s {
                        out.push(s);
                    }
                }
            }
        }
    }
    sort_slopes(&mut out);
    out
}

fn sort_slopes(slopes: &mut [Slope]) {
    slopes.sort_by_key(|s| (s.norm(), s.p, s.q));
}

/// Filled index and class at one slope in the manifold's reported coordinates.
pub fn report(manifold: &Manifold, slope: Slope, cutoff: HalfExp, sharp: HalfExp, opts: FillOptions) -> Result<SlopeReport> {
    let (p, q) = manifold.to_meridian_longitude(slope.p, slope.q);
    let result = filled_index(&manifold.indexer, Slope::new(p, q)?, cutoff, opts)?;
    Ok(SlopeReport {
        slope,
        notation: slope.notation(),
        class: classify(&result, sharp),
        result,
    })
}

pub fn scan(manifold: &Manifold, max_norm: i64, cutoff: HalfExp, sharp: HalfExp, opts: FillOptions) -> Result<ScanReport> {
    scan_slopes(manifold, &slopes_up_to(max_norm), cutoff, sharp, opts)
}

/// Evaluates the given slopes in parallel; duplicates up to sign are dropped.
pub fn scan_slopes(manifold: &Manifold, slopes: &[Slope], cutoff: HalfExp, sharp: HalfExp, opts: FillOptions) -> Result<ScanReport> {
    let mut slopes: Vec<Slope> = slopes.iter().map(|s| s.canonical()).collect();
    sort_slopes(&mut slopes);
    slopes.dedup();
    let reports = slopes
        .par_iter()
        .map(|&s| report(manifold, s, cutoff, sharp, opts))
        .collect::<Result<Vec<_>>>()?;
    let pick = |f: fn(SlopeClassKind) -> bool| -> Vec<String> {
        reports
            .iter()
            .filter(|r| f(r.class.kind))
            .map(|r| r.notation.clone())
            .collect()
    };
    Ok(ScanReport {
        manifold: manifold.name().to_string(),
        cutoff,
        sharp,
        exceptional: pick(SlopeClassKind::is_exceptional),
        lens_candidates: pick(|k| k == SlopeClassKind::NonHyperbolicZero),
        reports,
    })
}

impl SlopeReport {
    /// The series as the tables print it: `0`, `1`, `∞`, or the expansion.
    pub fn value_text(&self) -> String {
        match (self.result.status, &self.result.series) {
            (FillStatus::Divergent, _) => "∞".to_string(),
            (FillStatus::Exhausted, _) => "exhausted".to_string(),
            (_, Some(s)) => match self.class.kind {
                SlopeClassKind::NonHyperbolicZero => "0".to_string(),
                SlopeClassKind::NonHyperbolicOne => "1".to_string(),
                _ => format!("{s:#}"),
            },
            (_, None) => "?".to_string(),
        }
    }
}

impl ScanReport {
    /// Two columns, `(p,q) | I`, folding `(p,q)` and `(-p,q)` into `(|p|,±q)` when equal.
    pub fn to_table(&self) -> String {
        let mut rows: Vec<(String, String, &str)> = Vec::new();
        let mut folded = vec![false; self.reports.len()];
        for (i, r) in self.reports.iter().enumerate() {
            if folded[i] {
                continue;
            }
            let value = r.value_text();
            let Slope { p, q } = r.slope;
            let mirror = self.reports.iter().enumerate().skip(i + 1).find(|(_, o)| {
                p != 0 && q != 0 && o.slope == Slope { p: -p, q } && o.value_text() == value
            });
            let label = match mirror {
                Some((j, _)) => {
                    folded[j] = true;
                    format!("({},±{})", p.abs(), q)
                }
                None => format!("({p},{q})"),
            };
            rows.push((label, value, r.class.kind.as_str()));
        }
        let width = rows.iter().map(|r| r.0.chars().count()).max().unwrap_or(0).max(5);
        let mut out = String::new();
        let _ = writeln!(out, "# {} filled indices through x^{}", self.manifold, self.cutoff);
        let _ = writeln!(out, "{:<width$} | I", "(p,q)");
        for (label, value, kind) in rows {
            let pad = width - label.chars().count();
            let _ = writeln!(out, "{label}{} | {value}    [{kind}]", " ".repeat(pad));
        }
        let _ = writeln!(out, "exceptional: {{{}}}", self.exceptional.join(", "));
        let _ = writeln!(out, "lens candidates: {{{}}}", self.lens_candidates.join(", "));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(terms: &[(i64, i64)], cutoff: i64) -> TruncatedSeries {
        TruncatedSeries::from_terms(terms.iter().map(|&(d, c)| (HalfExp::from_int(d), c)), HalfExp::from_int(cutoff))
    }

    #[test]
    fn classes() {
        let sharp = HalfExp::from_int(5);
        let kind = |s: TruncatedSeries| classify_series(&s, sharp).kind;
        assert_eq!(kind(series(&[], 5)), SlopeClassKind::NonHyperbolicZero);
        assert_eq!(kind(series(&[(0, 1)], 5)), SlopeClassKind::NonHyperbolicOne);
        assert_eq!(kind(series(&[(0, 1), (7, 3)], 9)), SlopeClassKind::NonHyperbolicOne);
        assert_eq!(
            kind(series(&[(0, 1), (1, -2), (2, -3), (4, 3), (5, 10)], 5)),
            SlopeClassKind::Hyperbolic
        );
        assert_eq!(kind(series(&[(0, 2), (1, 1)], 5)), SlopeClassKind::Indeterminate);
        assert_eq!(kind(series(&[(1, 1)], 5)), SlopeClassKind::Indeterminate);
    }

    #[test]
    fn slope_enumeration() {
        let s = slopes_up_to(2);
        let text: Vec<String> = s.iter().map(|s| s.notation()).collect();
        assert_eq!(text, ["0", "1/0", "-1", "1"]);
        assert_eq!(slopes_up_to(7).len(), 36);
    }
}
