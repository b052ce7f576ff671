#![allow(dead_code)]

use std::collections::BTreeMap;

use dehnscope::{HalfExp, TruncatedSeries};

/// Power series of `1 / prod_{k=1..n} (1 - x^k)` through `x^len-1`, by long division.
fn pochhammer_inverse(n: i64, len: usize) -> Vec<i128> {
    let mut poly = vec![0i128; len];
    poly[0] = 1;
    for k in 1..=n as usize {
        for d in (k..len).rev() {
            poly[d] -= poly[d - k];
        }
    }
    let mut inv = vec![0i128; len];
    for d in 0..len {
        let mut acc = if d == 0 { 1 } else { 0 };
        for j in 1..=d {
            acc -= poly[j] * inv[d - j];
        }
        inv[d] = acc;
    }
    inv
}

/// Term-by-term `I_Δ(m, e)` summed through twice the requested cutoff, then cut back.
pub fn oracle_tet(m: i64, e: i64, cutoff: HalfExp) -> TruncatedSeries {
    let limit = 2 * cutoff.twice().max(0);
    let mut acc: BTreeMap<i64, i128> = BTreeMap::new();
    let mut n = 0.max(-e);
    loop {
        let lead = n * (n + 1) - (2 * n + e) * m;
        if lead > limit && n > m {
            break;
        }
        if lead <= limit {
            let len = ((limit - lead) / 2 + 1) as usize;
            let a = pochhammer_inverse(n, len);
            let b = pochhammer_inverse(n + e, len);
            let sign: i128 = if n % 2 == 0 { 1 } else { -1 };
            for (i, ai) in a.iter().enumerate() {
                for (j, bj) in b.iter().take(len - i).enumerate() {
                    let c = sign * ai * bj;
                    if c != 0 {
                        *acc.entry(lead + 2 * (i + j) as i64).or_default() += c;
                    }
                }
            }
        }
        n += 1;
    }
    let terms = acc
        .into_iter()
        .filter(|&(t, c)| t <= cutoff.twice() && c != 0)
        .map(|(t, c)| (HalfExp::from_twice(t), i64::try_from(c).expect("oracle coefficient fits i64")));
    TruncatedSeries::from_terms(terms, cutoff)
}

/// Series from `(twice exponent, coefficient)` pairs.
pub fn series(terms: &[(i64, i64)], cutoff: i64) -> TruncatedSeries {
    TruncatedSeries::from_terms(
        terms.iter().map(|&(t, c)| (HalfExp::from_twice(t), c)),
        HalfExp::from_int(cutoff),
    )
}

/// Series from integer-exponent coefficients `c_0, c_1, ...`, cut off at the last one.
pub fn dense(coeffs: &[i64]) -> TruncatedSeries {
    TruncatedSeries::from_terms(
        coeffs.iter().enumerate().map(|(d, &c)| (HalfExp::from_int(d as i64), c)),
        HalfExp::from_int(coeffs.len() as i64 - 1),
    )
}

pub fn x(n: i64) -> HalfExp {
    HalfExp::from_int(n)
}
