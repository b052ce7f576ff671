//! Truncated formal series in `x^(1/2)` with integer coefficients.
//!
//! A [`TruncatedSeries`] stores a dense window of coefficients starting at its
//! lowest nonzero exponent, together with a cutoff: coefficients above the
//! cutoff are unknown, not zero. Every operation propagates the cutoff so that
//! no result ever claims a coefficient it could not have computed.
//!
//! Exponents are [`HalfExp`] values, stored as twice the actual exponent.
//! Coefficients are `i64`; every coefficient operation is checked and panics
//! with `"series coefficient overflow"` instead of wrapping.

use std::cmp::{max, min, Ordering};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An exponent in `(1/2)Z`, stored as twice its value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HalfExp(i64);

impl HalfExp {
    pub const ZERO: HalfExp = HalfExp(0);
    /// Cutoff of a series that is known to all orders (monomials, kernels).
    pub const EXACT: HalfExp = HalfExp(i64::MAX / 4);

    pub const fn from_twice(twice: i64) -> Self {
        HalfExp(twice)
    }

    pub const fn from_int(n: i64) -> Self {
        HalfExp(2 * n)
    }

    pub const fn twice(self) -> i64 {
        self.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn is_exact(self) -> bool {
        self.0 >= Self::EXACT.0
    }

    /// The next exponent, `self + 1/2`.
    pub const fn next(self) -> Self {
        HalfExp(self.0 + 1)
    }

    /// Cutoff arithmetic: an exact cutoff stays exact under finite shifts.
    pub(crate) fn shift_cutoff(self, by: HalfExp) -> Self {
        if self.is_exact() || by.is_exact() {
            Self::EXACT
        } else {
            HalfExp(self.0 + by.0)
        }
    }
}

impl Add for HalfExp {
    type Output = HalfExp;
    fn add(self, rhs: HalfExp) -> HalfExp {
        HalfExp(self.0.checked_add(rhs.0).expect("exponent overflow"))
    }
}

impl Sub for HalfExp {
    type Output = HalfExp;
    fn sub(self, rhs: HalfExp) -> HalfExp {
        HalfExp(self.0.checked_sub(rhs.0).expect("exponent overflow"))
    }
}

impl Neg for HalfExp {
    type Output = HalfExp;
    fn neg(self) -> HalfExp {
        HalfExp(-self.0)
    }
}

impl fmt::Display for HalfExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for HalfExp {
    type Err = String;

    /// Accepts `7`, `-3`, `7/2` and `3.5`.
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let bad = || format!("invalid exponent {s:?}; expected an integer or a half-integer like 7/2");
        if let Some((num, den)) = s.split_once('/') {
            let num: i64 = num.trim().parse().map_err(|_| bad())?;
            match den.trim() {
                "1" => Ok(HalfExp::from_int(num)),
                "2" => Ok(HalfExp(num)),
                _ => Err(bad()),
            }
        } else if let Some((whole, frac)) = s.split_once('.') {
            let negative = whole.starts_with('-');
            let whole: i64 = if whole == "-" || whole.is_empty() {
                0
            } else {
                whole.parse().map_err(|_| bad())?
            };
            let half = match frac.trim_end_matches('0') {
                "" => 0,
                "5" => 1,
                _ => return Err(bad()),
            };
            let twice = 2 * whole + if negative { -half } else { half };
            Ok(HalfExp(twice))
        } else {
            s.parse::<i64>().map(HalfExp::from_int).map_err(|_| bad())
        }
    }
}

/// Lowest nonzero exponent of a series, or the cutoff through which it is zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MinDegree {
    Known(HalfExp),
    /// The series vanishes through this exponent; nothing is known beyond it.
    Unknown(HalfExp),
}

impl MinDegree {
    /// A guaranteed lower bound on the lowest nonzero exponent.
    pub fn lower_bound(self) -> HalfExp {
        match self {
            MinDegree::Known(d) => d,
            MinDegree::Unknown(c) if c.is_exact() => c,
            MinDegree::Unknown(c) => c.next(),
        }
    }
}

fn add_coeff(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("series coefficient overflow")
}

fn mul_coeff(a: i64, b: i64) -> i64 {
    a.checked_mul(b).expect("series coefficient overflow")
}

/// Element of `Z((x^(1/2)))` known through a cutoff exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    min: HalfExp,
    coeffs: Vec<i64>,
    cutoff: HalfExp,
}

impl TruncatedSeries {
    /// Builds a series from a dense coefficient window starting at `min`.
    /// Entries above `cutoff` are discarded; the result is normalized.
    pub fn new(min: HalfExp, mut coeffs: Vec<i64>, cutoff: HalfExp) -> Self {
        let keep = if cutoff.is_exact() {
            coeffs.len()
        } else if cutoff < min {
            0
        } else {
            coeffs.len().min((cutoff.twice() - min.twice()) as usize + 1)
        };
        coeffs.truncate(keep);
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        let lead = coeffs.iter().position(|&c| c != 0);
        match lead {
            None => Self::zero(cutoff),
            Some(0) => TruncatedSeries { min, coeffs, cutoff },
            Some(k) => TruncatedSeries {
                min: HalfExp(min.twice() + k as i64),
                coeffs: coeffs.split_off(k),
                cutoff,
            },
        }
    }

    /// Builds a series from sparse `(exponent, coefficient)` terms.
    pub fn from_terms<I>(terms: I, cutoff: HalfExp) -> Self
    where
        I: IntoIterator<Item = (HalfExp, i64)>,
    {
        let terms: Vec<(HalfExp, i64)> = terms
            .into_iter()
            .filter(|&(h, c)| c != 0 && (cutoff.is_exact() || h <= cutoff))
            .collect();
        let Some(lo) = terms.iter().map(|t| t.0).min() else {
            return Self::zero(cutoff);
        };
        let hi = terms.iter().map(|t| t.0).max().unwrap_or(lo);
        let mut coeffs = vec![0i64; (hi.twice() - lo.twice()) as usize + 1];
        for (h, c) in terms {
            let slot = &mut coeffs[(h.twice() - lo.twice()) as usize];
            *slot = add_coeff(*slot, c);
        }
        Self::new(lo, coeffs, cutoff)
    }

    /// The canonical zero, known to vanish through `cutoff`.
    pub fn zero(cutoff: HalfExp) -> Self {
        let min = if cutoff.is_exact() { cutoff } else { cutoff.next() };
        TruncatedSeries {
            min,
            coeffs: Vec::new(),
            cutoff,
        }
    }

    /// An exact monomial `sign * x^exp`.
    pub fn monomial(sign: i64, exp: HalfExp) -> Self {
        Self::new(exp, vec![sign], HalfExp::EXACT)
    }

    pub fn constant(value: i64, cutoff: HalfExp) -> Self {
        Self::new(HalfExp::ZERO, vec![value], cutoff)
    }

    /// `(-x^(1/2))^a` for `a` given in half-units; `a` must be an integer.
    pub fn neg_sqrt_x_pow(twice_power: i64) -> Result<Self> {
        if twice_power % 2 != 0 {
            return Err(Error::NonIntegerPower { twice_power });
        }
        let a = twice_power / 2;
        let sign = if a.rem_euclid(2) == 0 { 1 } else { -1 };
        Ok(Self::monomial(sign, HalfExp::from_twice(a)))
    }

    /// `1/(x)_n` with `(x)_n = (1-x)(1-x^2)...(1-x^n)`, expanded through `cutoff`.
    pub fn pochhammer_inverse(n: u32, cutoff: HalfExp) -> Self {
        assert!(!cutoff.is_exact(), "pochhammer_inverse needs a finite cutoff");
        if cutoff < HalfExp::ZERO {
            return Self::zero(cutoff);
        }
        let degree = (cutoff.twice() / 2) as usize;
        let ints = pochhammer_inverse_ints(&[n as usize], degree);
        let mut coeffs = vec![0i64; 2 * degree + 1];
        for (i, c) in ints.into_iter().enumerate() {
            coeffs[2 * i] = c;
        }
        Self::new(HalfExp::ZERO, coeffs, cutoff)
    }

    pub fn cutoff(&self) -> HalfExp {
        self.cutoff
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn min_exp(&self) -> Option<HalfExp> {
        (!self.is_zero()).then_some(self.min)
    }

    pub fn min_degree(&self) -> MinDegree {
        match self.min_exp() {
            Some(d) => MinDegree::Known(d),
            None => MinDegree::Unknown(self.cutoff),
        }
    }

    /// Highest exponent carrying a stored coefficient.
    pub fn max_exp(&self) -> Option<HalfExp> {
        (!self.is_zero()).then(|| HalfExp(self.min.twice() + self.coeffs.len() as i64 - 1))
    }

    /// Coefficient at `exp`, or `None` above the cutoff.
    pub fn coeff(&self, exp: HalfExp) -> Option<i64> {
        if !self.cutoff.is_exact() && exp > self.cutoff {
            return None;
        }
        if self.is_zero() || exp < self.min {
            return Some(0);
        }
        let idx = (exp.twice() - self.min.twice()) as usize;
        Some(self.coeffs.get(idx).copied().unwrap_or(0))
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (HalfExp, i64)> + '_ {
        let base = self.min.twice();
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(move |(i, &c)| (HalfExp(base + i as i64), c))
    }

    /// Forgets every coefficient above `cutoff` (never raises the cutoff).
    pub fn truncate(&self, cutoff: HalfExp) -> Self {
        if cutoff >= self.cutoff {
            return self.clone();
        }
        Self::new(self.min, self.coeffs.clone(), cutoff)
    }

    /// Multiplies by `x^by`.
    pub fn shift(&self, by: HalfExp) -> Self {
        let cutoff = self.cutoff.shift_cutoff(by);
        if self.is_zero() {
            return Self::zero(cutoff);
        }
        TruncatedSeries {
            min: self.min + by,
            coeffs: self.coeffs.clone(),
            cutoff,
        }
    }

    pub fn scale(&self, k: i64) -> Self {
        let coeffs = self.coeffs.iter().map(|&c| mul_coeff(c, k)).collect();
        Self::new(self.min, coeffs, self.cutoff)
    }

    /// Lower bound on the lowest nonzero exponent (used in cutoff algebra).
    fn lowest(&self) -> HalfExp {
        self.min_degree().lower_bound()
    }

    /// Product, additionally truncated at `limit`.
    pub fn mul_upto(&self, rhs: &Self, limit: HalfExp) -> Self {
        let cutoff = min(
            min(
                self.cutoff.shift_cutoff(rhs.lowest()),
                rhs.cutoff.shift_cutoff(self.lowest()),
            ),
            limit,
        );
        if self.is_zero() || rhs.is_zero() {
            return Self::zero(cutoff);
        }
        let lo = self.min + rhs.min;
        if !cutoff.is_exact() && lo > cutoff {
            return Self::zero(cutoff);
        }
        let full = self.coeffs.len() + rhs.coeffs.len() - 1;
        let len = if cutoff.is_exact() {
            full
        } else {
            full.min((cutoff.twice() - lo.twice()) as usize + 1)
        };
        let mut out = vec![0i64; len];
        for (i, &a) in self.coeffs.iter().enumerate().take(len) {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate().take(len - i) {
                if b != 0 {
                    out[i + j] = add_coeff(out[i + j], mul_coeff(a, b));
                }
            }
        }
        Self::new(lo, out, cutoff)
    }

    /// `self + k * rhs`, the accumulation step of every lattice sum.
    pub fn add_scaled(&self, rhs: &Self, k: i64) -> Self {
        let cutoff = min(self.cutoff, rhs.cutoff);
        let (lo, hi) = match (self.min_exp(), rhs.min_exp()) {
            (None, None) => return Self::zero(cutoff),
            (Some(a), None) => (a, self.max_exp().unwrap_or(a)),
            (None, Some(b)) => (b, rhs.max_exp().unwrap_or(b)),
            (Some(a), Some(b)) => (
                min(a, b),
                max(self.max_exp().unwrap_or(a), rhs.max_exp().unwrap_or(b)),
            ),
        };
        let hi = if cutoff.is_exact() { hi } else { min(hi, cutoff) };
        if hi < lo {
            return Self::zero(cutoff);
        }
        let mut out = vec![0i64; (hi.twice() - lo.twice()) as usize + 1];
        for (h, c) in self.terms().take_while(|t| t.0 <= hi) {
            out[(h.twice() - lo.twice()) as usize] = c;
        }
        for (h, c) in rhs.terms().take_while(|t| t.0 <= hi) {
            let slot = &mut out[(h.twice() - lo.twice()) as usize];
            *slot = add_coeff(*slot, mul_coeff(c, k));
        }
        Self::new(lo, out, cutoff)
    }

    /// True when both series have the same coefficients through `upto`.
    /// Returns false if either is not known that far.
    pub fn agrees_through(&self, other: &Self, upto: HalfExp) -> bool {
        if (!self.cutoff.is_exact() && self.cutoff < upto)
            || (!other.cutoff.is_exact() && other.cutoff < upto)
        {
            return false;
        }
        self.truncate(upto).terms().eq(other.truncate(upto).terms())
    }

    /// Applies `f` to every coefficient, e.g. exact halving.
    pub fn try_map_coeffs<F>(&self, mut f: F) -> Option<Self>
    where
        F: FnMut(i64) -> Option<i64>,
    {
        let coeffs = self.coeffs.iter().map(|&c| f(c)).collect::<Option<Vec<_>>>()?;
        Some(Self::new(self.min, coeffs, self.cutoff))
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            min_twice_exp: self.min.twice(),
            coeffs: self.coeffs.clone(),
            cutoff_twice_exp: self.cutoff.twice(),
        }
    }
}

/// Coefficients of `prod_k 1/(x)_{n_k}` at integer powers `0..=degree`.
pub(crate) fn pochhammer_inverse_ints(ns: &[usize], degree: usize) -> Vec<i64> {
    let mut c = vec![0i64; degree + 1];
    c[0] = 1;
    for &n in ns {
        for k in 1..=n.min(degree) {
            for i in k..=degree {
                c[i] = add_coeff(c[i], c[i - k]);
            }
        }
    }
    c
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self.add_scaled(rhs, 1)
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self.add_scaled(rhs, -1)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        self.scale(-1)
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self.mul_upto(rhs, HalfExp::EXACT)
    }
}

/// Wire form of a series: `{ "min_twice_exp", "coeffs", "cutoff_twice_exp" }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub min_twice_exp: i64,
    pub coeffs: Vec<i64>,
    pub cutoff_twice_exp: i64,
}

impl From<SeriesJson> for TruncatedSeries {
    fn from(j: SeriesJson) -> Self {
        TruncatedSeries::new(
            HalfExp::from_twice(j.min_twice_exp),
            j.coeffs,
            HalfExp::from_twice(j.cutoff_twice_exp),
        )
    }
}

impl From<TruncatedSeries> for SeriesJson {
    fn from(s: TruncatedSeries) -> Self {
        s.to_json()
    }
}

impl Serialize for TruncatedSeries {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TruncatedSeries {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        SeriesJson::deserialize(deserializer).map(Into::into)
    }
}

fn write_power(f: &mut fmt::Formatter<'_>, exp: HalfExp) -> fmt::Result {
    match exp.twice() {
        2 => write!(f, "x"),
        t if t % 2 == 0 => write!(f, "x^{}", t / 2),
        t => write!(f, "x^({t}/2)"),
    }
}

/// Renders as `1 - 2*x - 3*x^2 + 4*x^(7/2)`; the alternate form `{:#}`
/// appends ` + ...` when the series is truncated.
impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (exp, c) in self.terms() {
            let mag = c.unsigned_abs();
            match (first, c.cmp(&0)) {
                (true, Ordering::Less) => write!(f, "-")?,
                (true, _) => {}
                (false, Ordering::Less) => write!(f, " - ")?,
                (false, _) => write!(f, " + ")?,
            }
            first = false;
            if exp == HalfExp::ZERO {
                write!(f, "{mag}")?;
            } else {
                if mag != 1 {
                    write!(f, "{mag}*")?;
                }
                write_power(f, exp)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        if f.alternate() && !self.cutoff.is_exact() {
            write!(f, " + ...")?;
        }
        Ok(())
    }
}
