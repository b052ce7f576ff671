//! Golden values and property checks over the builtin catalog.
//!
//! Output is one `PASS`/`FAIL` line per check and contains no timings, so two
//! runs produce identical text.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::catalog;
use crate::classify::{scan, scan_slopes, SlopeClassKind};
use crate::error::Result;
use crate::filling::{choose_rs, filled_index, filled_index_with_rs, FillOptions, FillStatus, Slope};
use crate::gluing::{parse_manifold_str, ManifoldSource, ManifoldSpec};
use crate::index::{CuspedIndexer, IndexSource, SumOptions};
use crate::manifold::Manifold;
use crate::series::{HalfExp, TruncatedSeries};
use crate::symplectic::{complete, SymplecticFrame};
use crate::tetindex::{tet_index, tet_index_direct, TetIndexCache};

/// Deliberate corruption used to confirm that failures are reported.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Flips one longitude entry of the builtin 4_1 data.
    CorruptBuiltin,
}

impl std::str::FromStr for Fault {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "corrupt-builtin" => Ok(Fault::CorruptBuiltin),
            _ => Err(format!("unknown fault {s:?}; expected corrupt-builtin")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfTestReport {
    pub checks: Vec<CheckResult>,
}

impl SelfTestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{status} {}: {}", c.name, c.detail);
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        let _ = writeln!(out, "{} checks, {} failed", self.checks.len(), failed);
        out
    }
}

type Golden = ((i64, i64), &'static [(i64, i64)]);
type Check = fn(&Ctx) -> std::result::Result<String, String>;

struct Ctx {
    fault: Option<Fault>,
}

impl Ctx {
    fn spec(&self, name: &str) -> Result<ManifoldSpec> {
        let text = catalog::source_text(name)?;
        match (self.fault, name) {
            (Some(Fault::CorruptBuiltin), "4_1") => parse_manifold_str(&text.replace("\"Lpp\": [0, 2]", "\"Lpp\": [0, 3]")),
            _ => parse_manifold_str(text),
        }
    }

    fn manifold(&self, name: &str) -> std::result::Result<Manifold, String> {
        self.spec(name)
            .and_then(|spec| Manifold::new(spec, Arc::default(), SumOptions::default()))
            .map_err(|err| format!("{name}: {err}"))
    }
}

const CHECKS: &[(&str, Check)] = &[
    ("tet_golden", tet_golden),
    ("tet_oracle", tet_oracle),
    ("cusped_4_1_golden", cusped_4_1_golden),
    ("cusped_5_2_golden", cusped_5_2_golden),
    ("engine_matches_formula", engine_matches_formula),
    ("frame_independence", frame_independence),
    ("z2_symmetry", z2_symmetry),
    ("shell_stability", shell_stability),
    ("fill_meridian_zero", fill_meridian_zero),
    ("surgery_equivalence", surgery_equivalence),
    ("rs_shift_invariance", rs_shift_invariance),
    ("slope_sign_symmetry", slope_sign_symmetry),
    ("scan_4_1", scan_4_1),
    ("scan_5_2", scan_5_2),
    ("scan_m003", scan_m003),
];

pub fn run(fault: Option<Fault>) -> SelfTestReport {
    let ctx = Ctx { fault };
    let checks = CHECKS
        .iter()
        .map(|&(name, check)| {
            let (passed, detail) = match check(&ctx) {
                Ok(detail) => (true, detail),
                Err(detail) => (false, detail),
            };
            CheckResult { name, passed, detail }
        })
        .collect();
    SelfTestReport { checks }
}

fn int(n: i64) -> HalfExp {
    HalfExp::from_int(n)
}

/// Builds a series from `(twice exponent, coefficient)` pairs.
pub(crate) fn series(terms: &[(i64, i64)], cutoff: HalfExp) -> TruncatedSeries {
    TruncatedSeries::from_terms(terms.iter().map(|&(t, c)| (HalfExp::from_twice(t), c)), cutoff)
}

fn expect_eq(label: &str, got: &TruncatedSeries, want: &TruncatedSeries) -> std::result::Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{label}: got {got}, expected {want}"))
    }
}

fn domain<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|err| err.to_string())
}

fn tet_golden(_: &Ctx) -> std::result::Result<String, String> {
    let four = int(4);
    let cases: [Golden; 4] = [
        ((0, 0), &[(0, 1), (2, -1), (4, -2), (6, -2), (8, -2)]),
        ((1, 0), &[(2, -1), (4, -1), (8, 1)]),
        ((0, 1), &[(0, 1), (4, -1), (6, -2), (8, -3)]),
        ((1, 1), &[(3, -1), (5, -1), (7, -1)]),
    ];
    for ((m, e), terms) in cases {
        expect_eq(&format!("I_tet({m},{e})"), &tet_index(m, e, four), &series(terms, four))?;
    }
    Ok("4 expansions through x^4".into())
}

fn tet_oracle(_: &Ctx) -> std::result::Result<String, String> {
    let cutoff = int(8);
    let mut n = 0;
    for m in -3..=3 {
        for e in -3..=3 {
            let direct = tet_index_direct(m, e, int(16)).truncate(cutoff);
            expect_eq(&format!("I_tet({m},{e})"), &tet_index(m, e, cutoff), &direct)?;
            n += 1;
        }
    }
    Ok(format!("{n} pairs through x^8 against direct summation"))
}

fn cusped_4_1_golden(ctx: &Ctx) -> std::result::Result<String, String> {
    let m = ctx.manifold("4_1")?;
    let four = int(4);
    let cases: [Golden; 4] = [
        ((0, 0), &[(0, 1), (2, -2), (4, -3), (6, 2), (8, 8)]),
        ((0, 1), &[(2, -2), (4, -2), (6, 2), (8, 8)]),
        ((1, 0), &[(3, -2), (7, 4)]),
        ((1, 1), &[(2, -1), (4, -1), (6, 2), (8, 7)]),
    ];
    for ((a, b), terms) in cases {
        let want = series(terms, four);
        for (sa, sb) in [(a, b), (-a, -b), (a, -b), (-a, b)] {
            let got = domain(m.indexer.index(sa, sb, four))?;
            expect_eq(&format!("I({sa},{sb})"), &got, &want)?;
        }
    }
    Ok("I(0,0), I(0,±1), I(±1,0), I(±1,±1) through x^4".into())
}

fn cusped_5_2_golden(ctx: &Ctx) -> std::result::Result<String, String> {
    let m = ctx.manifold("5_2")?;
    let seven = int(7);
    let want = series(
        &[(0, 1), (2, -4), (4, -1), (6, 16), (8, 26), (10, 23), (12, -34), (14, -122)],
        seven,
    );
    expect_eq("I(0,0)", &domain(m.indexer.index(0, 0, seven))?, &want)?;
    Ok("I(0,0) through x^7".into())
}

fn engine_matches_formula(ctx: &Ctx) -> std::result::Result<String, String> {
    let engine = ctx.manifold("4_1")?;
    let formula = ctx.manifold("4_1_formula")?;
    let cutoff = int(6);
    for m in -2..=2 {
        for e in -2..=2 {
            let a = domain(engine.indexer.index(m, e, cutoff))?;
            let b = domain(formula.indexer.index(m, e, cutoff))?;
            expect_eq(&format!("I({m},{e})"), &a, &b)?;
        }
    }
    Ok("4_1 engine and formula agree for |m|,|e| <= 2 through x^6".into())
}

fn frame_independence(ctx: &Ctx) -> std::result::Result<String, String> {
    let spec = domain(ctx.spec("4_1"))?;
    let ManifoldSource::Gluing { data, .. } = &spec.source else {
        return Err("4_1 is not gluing data".into());
    };
    let paper = domain(IndexSource::from_spec(&spec))?;
    let mut g = domain(complete(data))?.g;
    let k = data.k;
    // p_K += 3 q_K gives a second completion
    let q_k = g[k - 1].clone();
    for (a, b) in g[2 * k - 1].iter_mut().zip(&q_k) {
        *a += 3 * b;
    }
    let completed = IndexSource::Engine {
        data: data.clone(),
        frame: domain(SymplecticFrame::from_matrix(g))?,
    };
    let tets: Arc<TetIndexCache> = Arc::default();
    let a = CuspedIndexer::new("paper", &paper, tets.clone(), SumOptions::default());
    let b = CuspedIndexer::new("completed", &completed, tets, SumOptions::default());
    let cutoff = int(6);
    for m in -2..=2 {
        for e in -2..=2 {
            let x = domain(a.index(m, e, cutoff))?;
            let y = domain(b.index(m, e, cutoff))?;
            expect_eq(&format!("I({m},{e})"), &x, &y)?;
        }
    }
    Ok("two different frames agree for |m|,|e| <= 2".into())
}

fn z2_symmetry(ctx: &Ctx) -> std::result::Result<String, String> {
    let cutoff = int(6);
    for name in ["4_1", "5_2", "m003"] {
        let man = ctx.manifold(name)?;
        for m in -2..=2 {
            for e in -2..=2 {
                let a = domain(man.indexer.compute(m, e, cutoff))?;
                let b = domain(man.indexer.compute(-m, -e, cutoff))?;
                expect_eq(&format!("{name} I({m},{e}) vs I({},{})", -m, -e), &a, &b)?;
            }
        }
    }
    Ok("I(m,e) = I(-m,-e) for |m|,|e| <= 2 on 4_1, 5_2, m003".into())
}

fn shell_stability(ctx: &Ctx) -> std::result::Result<String, String> {
    let cutoff = int(6);
    for name in ["4_1", "5_2", "m003"] {
        let man = ctx.manifold(name)?;
        let wide = CuspedIndexer::new(
            "wide",
            &man.source,
            Arc::default(),
            SumOptions {
                margin: 6,
                max_shell: 96,
            },
        );
        for m in -2..=2 {
            for e in -2..=2 {
                let base = domain(man.indexer.index(m, e, cutoff))?;
                expect_eq(&format!("{name} I({m},{e}) margin 6"), &domain(wide.index(m, e, cutoff))?, &base)?;
                let deeper = domain(man.indexer.compute(m, e, cutoff + int(2)))?;
                expect_eq(&format!("{name} I({m},{e}) cutoff +2"), &deeper.truncate(cutoff), &base)?;
            }
        }
    }
    Ok("results unchanged by a wider margin or a deeper cutoff".into())
}

fn fill_meridian_zero(ctx: &Ctx) -> std::result::Result<String, String> {
    let m = ctx.manifold("4_1")?;
    let r = domain(filled_index(&m.indexer, Slope { p: 1, q: 0 }, int(6), FillOptions::default()))?;
    match r.series {
        Some(s) if r.status == FillStatus::Converged && s.is_zero() => Ok("4_1 (1,0) is 0 through x^6".into()),
        _ => Err(format!("4_1 (1,0): status {}", r.status.as_str())),
    }
}

fn surgery_equivalence(ctx: &Ctx) -> std::result::Result<String, String> {
    let nine = int(9);
    let want = series(
        &[(0, 1), (2, -1), (4, -2), (6, -1), (8, -1), (10, 1), (12, 2), (14, 7), (16, 8), (18, 12)],
        nine,
    );
    for (name, p) in [("4_1", -5), ("5_2", 5)] {
        let m = ctx.manifold(name)?;
        let r = domain(filled_index(&m.indexer, Slope { p, q: 1 }, nine, FillOptions::default()))?;
        let got = r.series.ok_or_else(|| format!("{name} ({p},1): status {}", r.status.as_str()))?;
        expect_eq(&format!("{name} ({p},1)"), &got, &want)?;
    }
    Ok("4_1 at (-5,1) and 5_2 at (5,1) agree through x^9".into())
}

const SHIFT_SLOPES: [(i64, i64); 6] = [(1, 0), (0, 1), (1, 2), (-5, 1), (3, 2), (5, 3)];

fn rs_shift_invariance(ctx: &Ctx) -> std::result::Result<String, String> {
    let cutoff = int(5);
    for name in ["4_1", "5_2"] {
        let m = ctx.manifold(name)?;
        for (p, q) in SHIFT_SLOPES {
            let slope = Slope { p, q };
            let (r, s) = choose_rs(slope);
            let a = domain(filled_index_with_rs(&m.indexer, slope, (r, s), cutoff, FillOptions::default()))?;
            for k in [-2, 1, 3] {
                let b = domain(filled_index_with_rs(
                    &m.indexer,
                    slope,
                    (r + k * p, s + k * q),
                    cutoff,
                    FillOptions::default(),
                ))?;
                if (a.status, &a.series) != (b.status, &b.series) {
                    return Err(format!("{name} ({p},{q}): (r,s) shifted by {k}(p,q) changes the result"));
                }
            }
        }
    }
    Ok(format!("{} slopes on 4_1 and 5_2, three shifts each", SHIFT_SLOPES.len()))
}

fn slope_sign_symmetry(ctx: &Ctx) -> std::result::Result<String, String> {
    let cutoff = int(5);
    for name in ["4_1", "5_2"] {
        let m = ctx.manifold(name)?;
        for (p, q) in SHIFT_SLOPES {
            let a = domain(filled_index(&m.indexer, Slope { p, q }, cutoff, FillOptions::default()))?;
            let b = domain(filled_index(&m.indexer, Slope { p: -p, q: -q }, cutoff, FillOptions::default()))?;
            if (a.status, &a.series) != (b.status, &b.series) {
                return Err(format!("{name}: ({p},{q}) and ({},{}) differ", -p, -q));
            }
        }
    }
    Ok("filled index unchanged under (p,q) -> (-p,-q)".into())
}

fn scan_expect(
    ctx: &Ctx,
    name: &str,
    slopes: Option<&[(i64, i64)]>,
    max_norm: i64,
    classes: &[((i64, i64), SlopeClassKind)],
    exceptional: &[&str],
    lens: &[&str],
) -> std::result::Result<String, String> {
    let m = ctx.manifold(name)?;
    let five = int(5);
    let report = match slopes {
        Some(list) => {
            let list: Vec<Slope> = list.iter().map(|&(p, q)| Slope { p, q }).collect();
            domain(scan_slopes(&m, &list, five, five, FillOptions::default()))?
        }
        None => domain(scan(&m, max_norm, five, five, FillOptions::default()))?,
    };
    for r in &report.reports {
        let want = classes
            .iter()
            .find(|((p, q), _)| Slope { p: *p, q: *q }.canonical() == r.slope)
            .map_or(SlopeClassKind::Hyperbolic, |(_, k)| *k);
        if r.class.kind != want {
            return Err(format!(
                "{name} {}: classified {}, expected {}",
                r.notation,
                r.class.kind.as_str(),
                want.as_str()
            ));
        }
    }
    let sorted = |v: &[String]| {
        let mut v = v.to_vec();
        v.sort();
        v
    };
    let owned = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    if sorted(&report.exceptional) != sorted(&owned(exceptional)) {
        return Err(format!("{name}: exceptional set {{{}}}", report.exceptional.join(", ")));
    }
    if sorted(&report.lens_candidates) != sorted(&owned(lens)) {
        return Err(format!("{name}: lens candidates {{{}}}", report.lens_candidates.join(", ")));
    }
    Ok(format!(
        "{} slopes; exceptional {{{}}}; lens candidates {{{}}}",
        report.reports.len(),
        report.exceptional.join(", "),
        report.lens_candidates.join(", ")
    ))
}

use SlopeClassKind::{NonHyperbolicDivergent as Div, NonHyperbolicOne as One, NonHyperbolicZero as Zero};

pub(crate) const TABLE_4_1: &[((i64, i64), SlopeClassKind)] = &[
    ((1, 0), Zero),
    ((0, 1), One),
    ((1, 1), One),
    ((1, -1), One),
    ((2, 1), One),
    ((2, -1), One),
    ((3, 1), One),
    ((3, -1), One),
    ((4, 1), Div),
    ((4, -1), Div),
];

pub(crate) const TABLE_5_2: &[((i64, i64), SlopeClassKind)] = &[
    ((1, 0), Zero),
    ((0, 1), Div),
    ((1, 1), One),
    ((2, 1), One),
    ((3, 1), One),
    ((4, 1), Div),
];

pub(crate) const SLOPES_M003: &[(i64, i64)] = &[(0, 1), (1, 0), (1, -1), (1, -2), (1, 1), (1, 2), (2, -1), (3, -2)];

pub(crate) const TABLE_M003: &[((i64, i64), SlopeClassKind)] = &[
    ((0, 1), Zero),
    ((1, 0), Zero),
    ((1, -1), Zero),
    ((1, -2), One),
    ((1, 1), One),
    ((1, 2), Div),
    ((2, -1), One),
    ((3, -2), Div),
];

fn scan_4_1(ctx: &Ctx) -> std::result::Result<String, String> {
    scan_expect(
        ctx,
        "4_1",
        None,
        7,
        TABLE_4_1,
        &["1/0", "0", "1", "-1", "2", "-2", "3", "-3", "4", "-4"],
        &["1/0"],
    )
}

fn scan_5_2(ctx: &Ctx) -> std::result::Result<String, String> {
    scan_expect(ctx, "5_2", None, 6, TABLE_5_2, &["1/0", "0", "1", "2", "3", "4"], &["1/0"])
}

fn scan_m003(ctx: &Ctx) -> std::result::Result<String, String> {
    scan_expect(
        ctx,
        "m003",
        Some(SLOPES_M003),
        0,
        TABLE_M003,
        &["0", "1/0", "-1", "-1/2", "1", "1/2", "-2", "-3/2"],
        &["0", "1/0", "-1"],
    )
}
