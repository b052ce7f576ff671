//! The tetrahedron index `I_Δ(m, e; x)`.
//!
//! The defining sum runs over `n >= [e] = (|e| - e)/2` of
//! `(-1)^n x^(n(n+1)/2 - (n + e/2) m) / ((x)_n (x)_(n+e))`.
//! For `m <= 0` the numerator exponents strictly increase with `n`, so the sum
//! is evaluated directly and the first term is the leading term. Arguments with
//! `m > 0` are first mapped into that regime with the identities
//!
//! ```text
//! I(m, e) = I(-e, -m)                          (e >= 0)
//! I(m, e) = (-x^(1/2))^(-e) I(e, -e - m)       (e <  0)
//! ```
//!
//! which avoids summing thousands of mutually cancelling terms for large `m`.
//! [`tet_index_direct`] keeps the literal sum for any `(m, e)`.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::RwLock;

use crate::error::{Error, Result};
use crate::series::{pochhammer_inverse_ints, HalfExp, MinDegree, SeriesJson, TruncatedSeries};

/// First summation index `[e] = (|e| - e)/2`.
pub fn first_term_index(e: i64) -> i64 {
    (e.abs() - e) / 2
}

/// Twice the numerator exponent of the `n`-th term.
fn term_twice_exp(m: i64, e: i64, n: i64) -> i64 {
    n * (n + 1) - (2 * n + e) * m
}

/// The defining sum, truncated at `cutoff`. Terms are included up to the
/// point where the numerator exponent is increasing in `n` and above `cutoff`.
pub fn tet_index_direct(m: i64, e: i64, cutoff: HalfExp) -> TruncatedSeries {
    assert!(!cutoff.is_exact(), "tetrahedron index needs a finite cutoff");
    let c = cutoff.twice();
    let start = first_term_index(e);
    let mut terms = Vec::new();
    let mut n = start;
    loop {
        let exp = term_twice_exp(m, e, n);
        if n >= m && exp > c {
            break;
        }
        if exp <= c {
            terms.push((n, exp));
        }
        n += 1;
    }
    let Some(lo) = terms.iter().map(|t| t.1).min() else {
        return TruncatedSeries::zero(cutoff);
    };
    let max_degree = ((c - lo) / 2) as usize;
    let mut acc = vec![0i64; max_degree + 1];

    let mut pochhammer = pochhammer_inverse_ints(&[start as usize, (start + e) as usize], max_degree);
    let mut current = start;
    for (n, exp) in terms {
        while current < n {
            current += 1;
            for k in [current, current + e] {
                let k = k as usize;
                for i in k..=max_degree {
                    pochhammer[i] = pochhammer[i]
                        .checked_add(pochhammer[i - k])
                        .expect("series coefficient overflow");
                }
            }
        }
        let sign = if n % 2 == 0 { 1 } else { -1 };
        let offset = ((exp - lo) / 2) as usize;
        let degree = ((c - exp) / 2) as usize;
        for j in 0..=degree {
            acc[offset + j] = acc[offset + j]
                .checked_add(sign * pochhammer[j])
                .expect("series coefficient overflow");
        }
    }

    let mut dense = vec![0i64; 2 * max_degree + 1];
    for (j, v) in acc.into_iter().enumerate() {
        dense[2 * j] = v;
    }
    TruncatedSeries::new(HalfExp::from_twice(lo), dense, cutoff)
}

/// How an argument pair is mapped into the `m <= 0` regime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Reduced {
    m: i64,
    e: i64,
    /// Twice the exponent of the monomial prefactor.
    shift: i64,
    sign: i64,
}

fn reduce_args(m: i64, e: i64) -> Reduced {
    if m <= 0 {
        Reduced { m, e, shift: 0, sign: 1 }
    } else if e >= 0 {
        Reduced { m: -e, e: -m, shift: 0, sign: 1 }
    } else {
        Reduced {
            m: e,
            e: -e - m,
            shift: -e,
            sign: if e % 2 == 0 { 1 } else { -1 },
        }
    }
}

/// `I_Δ(m, e; x)` through `cutoff`.
pub fn tet_index(m: i64, e: i64, cutoff: HalfExp) -> TruncatedSeries {
    let r = reduce_args(m, e);
    if r.shift == 0 && r.sign == 1 {
        return tet_index_direct(r.m, r.e, cutoff);
    }
    let shift = HalfExp::from_twice(r.shift);
    tet_index_direct(r.m, r.e, cutoff - shift)
        .shift(shift)
        .scale(r.sign)
}

/// Exponent at which probing for the leading coefficient starts.
fn probe_cutoff(m: i64, e: i64) -> HalfExp {
    let r = reduce_args(m, e);
    let n = first_term_index(r.e);
    HalfExp::from_twice(term_twice_exp(r.m, r.e, n) + r.shift)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TetIndexKey {
    pub m: i64,
    pub e: i64,
    pub cutoff: HalfExp,
}

impl TetIndexKey {
    pub fn new(m: i64, e: i64, cutoff: HalfExp) -> Self {
        TetIndexKey { m, e, cutoff }
    }
}

/// Shared memo of tetrahedron indices, keyed by `(m, e)`, holding the
/// highest-cutoff series computed so far.
#[derive(Debug, Default)]
pub struct TetIndexCache {
    entries: RwLock<HashMap<(i64, i64), TruncatedSeries>>,
}

impl TetIndexCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("tet cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, key: TetIndexKey) -> TruncatedSeries {
        if let Some(s) = self.entries.read().expect("tet cache poisoned").get(&(key.m, key.e)) {
            if s.cutoff() >= key.cutoff {
                return s.truncate(key.cutoff);
            }
        }
        let series = tet_index(key.m, key.e, key.cutoff);
        self.insert(key.m, key.e, series.clone());
        series
    }

    /// Keeps whichever of the stored and offered series reaches further.
    fn insert(&self, m: i64, e: i64, series: TruncatedSeries) {
        let mut map = self.entries.write().expect("tet cache poisoned");
        match map.get(&(m, e)) {
            Some(old) if old.cutoff() >= series.cutoff() => {}
            _ => {
                map.insert((m, e), series);
            }
        }
    }

    /// Lowest nonzero exponent of `I_Δ(m, e)`, read off a computed series.
    /// Probing stops at `limit`, past which the answer is `Unknown`.
    pub fn min_degree(&self, m: i64, e: i64, limit: HalfExp) -> MinDegree {
        if let Some(s) = self.entries.read().expect("tet cache poisoned").get(&(m, e)) {
            if let Some(d) = s.min_exp() {
                return MinDegree::Known(d);
            }
        }
        let mut probe = probe_cutoff(m, e).min(limit);
        loop {
            let s = self.get(TetIndexKey::new(m, e, probe));
            match s.min_degree() {
                MinDegree::Known(d) => return MinDegree::Known(d),
                unknown if probe >= limit => return unknown,
                _ => {
                    let step = probe.twice().abs().max(8);
                    probe = HalfExp::from_twice(probe.twice() + step).min(limit);
                }
            }
        }
    }

    /// Reads a cache file: a JSON object mapping `"m,e"` to a series.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let raw: BTreeMap<String, SeriesJson> = serde_json::from_str(&text)
            .map_err(|err| Error::schema(path.display().to_string(), err.to_string()))?;
        let cache = TetIndexCache::new();
        for (key, series) in raw {
            let parsed = key
                .split_once(',')
                .and_then(|(m, e)| Some((m.trim().parse().ok()?, e.trim().parse().ok()?)));
            let Some((m, e)) = parsed else {
                return Err(Error::schema(format!("{}/{key}", path.display()), "key must be \"m,e\""));
            };
            cache.insert(m, e, series.into());
        }
        Ok(cache)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let map = self.entries.read().expect("tet cache poisoned");
        let sorted: BTreeMap<(i64, i64), SeriesJson> =
            map.iter().map(|(k, v)| (*k, v.to_json())).collect();
        let keyed: serde_json::Map<String, serde_json::Value> = sorted
            .into_iter()
            .map(|((m, e), v)| (format!("{m},{e}"), serde_json::to_value(v).expect("series json")))
            .collect();
        let text = serde_json::to_string(&keyed).expect("cache json");
        std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}
