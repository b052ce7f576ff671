//! The cusped 3D index `I_N(m, e; x)` as a convergent lattice sum.
//!
//! Both input routes compile to a [`LatticeSum`]: a prefactor exponent and `K`
//! tetrahedron argument pairs, each affine in `(m, e, e_2, ..., e_K)`. For
//! gluing data the argument pairs are the rows of `G^-1` applied to
//! `γ = (m, 0, ..., 0, e, e_2, ..., e_K)` and the prefactor is `<ν, γ>`.
//!
//! The sum is taken over L∞ shells around an approximate center of the
//! summand degrees. Each term's lowest exponent is known exactly from the
//! tetrahedron indices, so terms above the cutoff are skipped without being
//! multiplied out. Summation stops once `margin` consecutive shells contribute
//! nothing and the per-shell lowest degree has been rising across them.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gluing::{Affine, GluingData, LatticeIndexFormula, ManifoldSource, ManifoldSpec};
use crate::series::{HalfExp, TruncatedSeries};
use crate::symplectic::{complete, SymplecticFrame};
use crate::tetindex::{TetIndexCache, TetIndexKey};

/// How far past the working cutoff a tetrahedron's leading exponent is probed.
const DEGREE_HORIZON: i64 = 4096;
/// Shells at least this large are evaluated in parallel.
const PARALLEL_SHELL: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SumOptions {
    /// Consecutive non-contributing shells required before stopping.
    pub margin: u32,
    /// Hard bound on the shell radius.
    pub max_shell: u32,
}

impl Default for SumOptions {
    fn default() -> Self {
        SumOptions {
            margin: 3,
            max_shell: 64,
        }
    }
}

/// A lattice-sum description shared by the engine and formula routes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSum {
    /// Twice the exponent of `(-x^(1/2))`.
    pub twice_prefactor: Affine,
    pub tet_args: Vec<[Affine; 2]>,
    pub sum_vars: usize,
}

impl LatticeSum {
    pub fn from_formula(f: &LatticeIndexFormula) -> Self {
        LatticeSum {
            twice_prefactor: f.prefactor.scaled(2),
            tet_args: f.tet_args.clone(),
            sum_vars: f.sum_vars,
        }
    }

    /// Substitutes `γ = (m, 0, ..., 0, e, e_2, ..., e_K)` into `G^-1 γ` and `<ν, γ>`.
    pub fn from_frame(data: &GluingData, frame: &SymplecticFrame) -> Self {
        let k = data.k;
        let inv = frame.inverse();
        let affine_row = |row: &[i64]| Affine::new(0, row[0], row[k], row[k + 1..].to_vec());
        let tet_args = (0..k)
            .map(|i| [affine_row(&inv[i]), affine_row(&inv[k + i])])
            .collect();
        let twice_prefactor = Affine::new(
            0,
            -data.two_nu_last,
            2 * data.nu[0],
            data.nu[1..].iter().map(|v| 2 * v).collect(),
        );
        LatticeSum {
            twice_prefactor,
            tet_args,
            sum_vars: k - 1,
        }
    }

    /// Integer point near the minimum of the summed squared tetrahedron
    /// arguments; summand degrees grow away from it.
    fn center(&self, m: i64, e: i64) -> Vec<i64> {
        let n = self.sum_vars;
        if n == 0 {
            return Vec::new();
        }
        let mut normal = vec![vec![0f64; n + 1]; n];
        let zeros = vec![0i64; n];
        for pair in &self.tet_args {
            for a in pair {
                let base = a.eval(m, e, &zeros) as f64;
                let coef: Vec<f64> = (0..n).map(|i| *a.evars.get(i).unwrap_or(&0) as f64).collect();
                for i in 0..n {
                    for j in 0..n {
                        normal[i][j] += coef[i] * coef[j];
                    }
                    normal[i][n] -= coef[i] * base;
                }
            }
        }
        solve_dense(normal)
            .map(|v| v.into_iter().map(|x| x.round() as i64).collect())
            .unwrap_or(zeros)
    }
}

/// Gaussian elimination on an augmented `n × (n+1)` system; `None` if singular.
fn solve_dense(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, pivot);
        for row in 0..n {
            if row != col {
                let f = a[row][col] / a[col][col];
                let pivot_row = a[col].clone();
                for (x, y) in a[row].iter_mut().zip(&pivot_row).skip(col) {
                    *x -= f * y;
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
}

/// A manifold's index data: gluing data with its frame, or a direct formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IndexSource {
    Engine {
        data: GluingData,
        frame: SymplecticFrame,
    },
    Formula(LatticeIndexFormula),
}

impl IndexSource {
    /// Uses the supplied frame when present (it must extend the gluing rows),
    /// otherwise completes one.
    pub fn from_spec(spec: &ManifoldSpec) -> Result<Self> {
        match &spec.source {
            ManifoldSource::Formula(f) => Ok(IndexSource::Formula(f.clone())),
            ManifoldSource::Gluing { data, frame } => {
                let frame = match frame {
                    Some(g) => {
                        let frame = SymplecticFrame::from_matrix(g.clone())?;
                        if !frame.extends(data) {
                            return Err(Error::NotExtendable(
                                "supplied frame does not start with the gluing rows".into(),
                            ));
                        }
                        frame
                    }
                    None => complete(data)?,
                };
                Ok(IndexSource::Engine {
                    data: data.clone(),
                    frame,
                })
            }
        }
    }

    pub fn lattice_sum(&self) -> LatticeSum {
        match self {
            IndexSource::Engine { data, frame } => LatticeSum::from_frame(data, frame),
            IndexSource::Formula(f) => LatticeSum::from_formula(f),
        }
    }
}

/// One term of the lattice sum: its lowest exponent (a lower bound when a
/// factor's leading exponent lies past the probe horizon) and, if that is
/// within the cutoff, its series.
struct Term {
    degree: HalfExp,
    series: Option<TruncatedSeries>,
}

/// Evaluates cusped indices of one manifold, memoizing by `(m, e)`.
#[derive(Debug)]
pub struct CuspedIndexer {
    name: String,
    sum: LatticeSum,
    tets: Arc<TetIndexCache>,
    options: SumOptions,
    memo: RwLock<HashMap<(i64, i64), TruncatedSeries>>,
}

impl CuspedIndexer {
    pub fn new(name: impl Into<String>, source: &IndexSource, tets: Arc<TetIndexCache>, options: SumOptions) -> Self {
        Self::from_sum(name, source.lattice_sum(), tets, options)
    }

    pub fn from_sum(name: impl Into<String>, sum: LatticeSum, tets: Arc<TetIndexCache>, options: SumOptions) -> Self {
        CuspedIndexer {
            name: name.into(),
            sum,
            tets,
            options,
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn options(&self) -> SumOptions {
        self.options
    }

    pub fn lattice_sum(&self) -> &LatticeSum {
        &self.sum
    }

    pub fn tet_cache(&self) -> &Arc<TetIndexCache> {
        &self.tets
    }

    /// `I_N(m, e)` through `cutoff`, served from the memo when possible.
    pub fn index(&self, m: i64, e: i64, cutoff: HalfExp) -> Result<TruncatedSeries> {
        if let Some(s) = self.memo.read().expect("index memo poisoned").get(&(m, e)) {
            if s.cutoff() >= cutoff {
                return Ok(s.truncate(cutoff));
            }
        }
        let series = self.compute(m, e, cutoff)?;
        let mut memo = self.memo.write().expect("index memo poisoned");
        match memo.get(&(m, e)) {
            Some(old) if old.cutoff() >= cutoff => {}
            _ => {
                memo.insert((m, e), series.clone());
            }
        }
        Ok(series)
    }

    /// `I_N(m, e)` through `cutoff`, always summed afresh.
    pub fn compute(&self, m: i64, e: i64, cutoff: HalfExp) -> Result<TruncatedSeries> {
        let n = self.sum.sum_vars;
        let center = self.sum.center(m, e);
        let mut acc = TruncatedSeries::zero(cutoff);
        let mut quiet = 0u32;
        let mut shell_mins: Vec<HalfExp> = Vec::new();
        for radius in 0..=self.options.max_shell {
            let points = shell(&center, radius as i64);
            let terms: Vec<Result<Term>> = if points.len() >= PARALLEL_SHELL {
                points.par_iter().map(|v| self.term(m, e, v, cutoff)).collect()
            } else {
                points.iter().map(|v| self.term(m, e, v, cutoff)).collect()
            };
            let mut contributed = false;
            let mut shell_min: Option<HalfExp> = None;
            for term in terms {
                let term = term?;
                shell_min = Some(shell_min.map_or(term.degree, |d| d.min(term.degree)));
                if let Some(s) = term.series {
                    contributed = true;
                    acc = &acc + &s;
                }
            }
            if n == 0 {
                return Ok(acc);
            }
            quiet = if contributed { 0 } else { quiet + 1 };
            shell_mins.push(shell_min.expect("shells are nonempty"));
            if quiet >= self.options.margin && rising(&shell_mins, self.options.margin as usize) {
                return Ok(acc);
            }
        }
        Err(Error::NonTermination {
            m,
            e,
            radius: self.options.max_shell,
        })
    }

    fn term(&self, m: i64, e: i64, vars: &[i64], cutoff: HalfExp) -> Result<Term> {
        let twice_power = self.sum.twice_prefactor.eval(m, e, vars);
        if twice_power % 2 != 0 {
            return Err(Error::InconsistentNu {
                m,
                e,
                twice_exponent: twice_power,
            });
        }
        let prefactor = TruncatedSeries::neg_sqrt_x_pow(twice_power)?;
        let power = HalfExp::from_twice(twice_power / 2);
        let rel = cutoff - power;
        let horizon = HalfExp::from_twice(rel.twice().max(0) + DEGREE_HORIZON);

        let args: Vec<(i64, i64)> = self
            .sum
            .tet_args
            .iter()
            .map(|[a, b]| (a.eval(m, e, vars), b.eval(m, e, vars)))
            .collect();
        let lows: Vec<HalfExp> = args
            .iter()
            .map(|&(a, b)| self.tets.min_degree(a, b, horizon).lower_bound())
            .collect();
        let low_sum = lows.iter().fold(HalfExp::ZERO, |s, &d| s + d);
        let degree = power + low_sum;
        if degree > cutoff {
            return Ok(Term { degree, series: None });
        }

        let mut product = TruncatedSeries::constant(1, rel);
        for (&(a, b), &low) in args.iter().zip(&lows) {
            let need = rel - (low_sum - low);
            let factor = self.tets.get(TetIndexKey::new(a, b, need));
            product = product.mul_upto(&factor, rel);
        }
        let series = prefactor.mul_upto(&product, cutoff);
        Ok(Term {
            degree,
            series: Some(series),
        })
    }

    /// Materializes the requested entries, computing one of each `±(m, e)` pair.
    pub fn table(&self, pairs: &[(i64, i64)], cutoff: HalfExp) -> Result<IndexTable> {
        let mut entries: BTreeMap<(i64, i64), TruncatedSeries> = BTreeMap::new();
        for &(m, e) in pairs {
            if entries.contains_key(&(m, e)) {
                continue;
            }
            let series = match entries.get(&(-m, -e)) {
                Some(s) => s.clone(),
                None => self.index(m, e, cutoff)?,
            };
            entries.insert((-m, -e), series.clone());
            entries.insert((m, e), series);
        }
        Ok(IndexTable {
            source: self.name.clone(),
            cutoff,
            entries,
        })
    }
}

/// Last `margin` steps non-decreasing with a net rise.
fn rising(mins: &[HalfExp], margin: usize) -> bool {
    if mins.len() <= margin {
        return false;
    }
    let tail = &mins[mins.len() - margin - 1..];
    tail.windows(2).all(|w| w[1] >= w[0]) && tail[margin] > tail[0]
}

/// Points of `Z^n` at L∞ distance exactly `radius` from `center`.
fn shell(center: &[i64], radius: i64) -> Vec<Vec<i64>> {
    let n = center.len();
    if n == 0 {
        return if radius == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    let mut offset = vec![-radius; n];
    loop {
        if offset.iter().any(|x| x.abs() == radius) {
            out.push(center.iter().zip(&offset).map(|(c, o)| c + o).collect());
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            if offset[i] < radius {
                offset[i] += 1;
                break;
            }
            offset[i] = -radius;
            i += 1;
        }
    }
}

/// A cusped index request against a given source.
#[derive(Clone, Debug)]
pub struct CuspedIndexRequest {
    pub source: IndexSource,
    pub m: i64,
    pub e: i64,
    pub cutoff: HalfExp,
}

pub fn cusped_index(req: &CuspedIndexRequest, tets: Arc<TetIndexCache>, options: SumOptions) -> Result<TruncatedSeries> {
    CuspedIndexer::new("request", &req.source, tets, options).compute(req.m, req.e, req.cutoff)
}

pub fn formula_index(
    f: &LatticeIndexFormula,
    m: i64,
    e: i64,
    cutoff: HalfExp,
    tets: Arc<TetIndexCache>,
    options: SumOptions,
) -> Result<TruncatedSeries> {
    CuspedIndexer::from_sum("formula", LatticeSum::from_formula(f), tets, options).compute(m, e, cutoff)
}

/// Materialized cusped-index entries for one source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexTable {
    pub source: String,
    pub cutoff: HalfExp,
    pub entries: BTreeMap<(i64, i64), TruncatedSeries>,
}

impl IndexTable {
    pub fn get(&self, m: i64, e: i64) -> Option<&TruncatedSeries> {
        self.entries.get(&(m, e))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Entry<'a> {
            m: i64,
            e: i64,
            series: &'a TruncatedSeries,
            text: String,
        }
        let entries: Vec<Entry> = self
            .entries
            .iter()
            .map(|(&(m, e), s)| Entry {
                m,
                e,
                series: s,
                text: s.to_string(),
            })
            .collect();
        serde_json::json!({
            "source": self.source,
            "cutoff_twice_exp": self.cutoff.twice(),
            "entries": entries,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shells_cover_the_box() {
        let c = [3, -1];
        let mut all: Vec<Vec<i64>> = (0..=2).flat_map(|r| shell(&c, r)).collect();
        all.sort();
        let mut boxed = Vec::new();
        for a in 1..=5 {
            for b in -3..=1 {
                boxed.push(vec![a, b]);
            }
        }
        assert_eq!(all, boxed);
        assert_eq!(shell(&[], 0), vec![Vec::<i64>::new()]);
        assert!(shell(&[], 1).is_empty());
        assert_eq!(shell(&[0], 2), vec![vec![-2], vec![2]]);
    }

    #[test]
    fn rising_requires_net_increase() {
        let h = HalfExp::from_twice;
        assert!(rising(&[h(9), h(4), h(5), h(5), h(7)], 3));
        assert!(!rising(&[h(5), h(5), h(5), h(5)], 3));
        assert!(!rising(&[h(9), h(8), h(10), h(12)], 3));
        assert!(!rising(&[h(1), h(2)], 3));
    }

    #[test]
    fn empty_product_is_one() {
        let f = LatticeIndexFormula {
            prefactor: Affine::default(),
            tet_args: Vec::new(),
            sum_vars: 0,
        };
        let s = formula_index(&f, 3, -2, HalfExp::from_int(4), Arc::default(), SumOptions::default()).unwrap();
        assert_eq!(s, TruncatedSeries::constant(1, HalfExp::from_int(4)));
    }

    #[test]
    fn odd_prefactor_is_inconsistent_nu() {
        let data = GluingData {
            name: "unit".into(),
            k: 1,
            a: vec![vec![1]],
            b: vec![vec![0]],
            c: vec![0],
            d: vec![1],
            nu: vec![0],
            two_nu_last: 1,
        };
        let frame = complete(&data).unwrap();
        let source = IndexSource::Engine { data, frame };
        let indexer = CuspedIndexer::new("unit", &source, Arc::default(), SumOptions::default());
        assert!(indexer.compute(0, 0, HalfExp::from_int(2)).is_ok());
        assert!(matches!(
            indexer.compute(1, 0, HalfExp::from_int(2)),
            Err(Error::InconsistentNu { m: 1, e: 0, .. })
        ));
    }
}
