//! Acceptance criteria, one PASS/FAIL line each. Runtime limits are part of
//! each criterion.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::{dense, oracle_tet, series, x};
use dehnscope::classify::slopes_up_to;
use dehnscope::filling::{choose_rs, filled_index_with_rs};
use dehnscope::gluing::ManifoldSource;
use dehnscope::symplectic::{complete, SymplecticFrame};
use dehnscope::{
    catalog, filled_index, scan, scan_slopes, tet_index, CuspedIndexer, FillOptions, FillStatus, IndexSource, Manifold,
    Slope, SlopeClassKind, SumOptions,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn builtin(name: &str) -> Manifold {
    Manifold::builtin(name).expect("builtin loads")
}

fn tetrahedron_golden() -> Outcome {
    let four = x(4);
    let golden = [
        ((0, 0), dense(&[1, -1, -2, -2, -2])),
        ((1, 0), dense(&[0, -1, -1, 0, 1])),
        ((0, 1), dense(&[1, 0, -1, -2, -3])),
        ((1, 1), series(&[(3, -1), (5, -1), (7, -1)], 4)),
    ];
    for ((m, e), want) in &golden {
        let got = tet_index(*m, *e, four);
        ensure(&got == want, || format!("I_tet({m},{e}) = {got}, paper {want}"))?;
        let deep = x(12);
        let got = tet_index(*m, *e, deep);
        let oracle = oracle_tet(*m, *e, deep);
        ensure(got == oracle, || format!("I_tet({m},{e}) through x^12 differs from the oracle"))?;
    }
    Ok("paper through x^4, oracle through x^12".into())
}

fn cusped_golden() -> Outcome {
    let engine = builtin("4_1");
    let formula = builtin("4_1_formula");
    let golden = [
        ((0, 0), dense(&[1, -2, -3, 2, 8])),
        ((0, 1), dense(&[0, -2, -2, 2, 8])),
        ((1, 0), series(&[(3, -2), (7, 4)], 4)),
        ((1, 1), dense(&[0, -1, -1, 2, 7])),
    ];
    for ((a, b), want) in &golden {
        for (m, e) in [(*a, *b), (-a, -b), (*a, -b), (-a, *b)] {
            let got = engine.indexer.index(m, e, x(4)).map_err(|e| e.to_string())?;
            ensure(&got == want, || format!("I({m},{e}) = {got}, paper {want}"))?;
            let hi = engine.indexer.index(m, e, x(8)).map_err(|e| e.to_string())?;
            let other = formula.indexer.index(m, e, x(8)).map_err(|e| e.to_string())?;
            ensure(hi == other, || format!("I({m},{e}) engine and formula differ through x^8"))?;
        }
    }
    Ok("paper through x^4, engine = formula through x^8".into())
}

fn five_two_golden() -> Outcome {
    let m = builtin("5_2");
    let got = m.indexer.index(0, 0, x(7)).map_err(|e| e.to_string())?;
    let want = dense(&[1, -4, -1, 16, 26, 23, -34, -122]);
    ensure(got == want, || format!("I(0,0) = {got}"))?;
    Ok("I(0,0) through x^7".into())
}

fn surgery_equivalence() -> Outcome {
    let want = dense(&[1, -1, -2, -1, -1, 1, 2, 7, 8, 12]);
    for (name, p) in [("4_1", -5), ("5_2", 5)] {
        let m = builtin(name);
        let r = filled_index(&m.indexer, Slope::new(p, 1).unwrap(), x(9), FillOptions::default()).map_err(|e| e.to_string())?;
        let got = r.series.ok_or_else(|| format!("{name} ({p},1) did not converge"))?;
        ensure(got == want, || format!("{name} ({p},1) = {got}"))?;
    }
    Ok("4_1 (-5,1) = 5_2 (5,1) through x^9".into())
}

fn slope_tables() -> Outcome {
    use SlopeClassKind::*;
    let five = x(5);
    let opts = FillOptions::default();
    let sorted = |v: &[String]| {
        let mut v = v.to_vec();
        v.sort();
        v
    };
    let owned = |v: &[&str]| sorted(&v.iter().map(|s| s.to_string()).collect::<Vec<_>>());

    let check = |name: &str,
                 report: dehnscope::ScanReport,
                 table: &[((i64, i64), SlopeClassKind)],
                 exceptional: Option<&[&str]>,
                 lens: &[&str]|
     -> Result<(), String> {
        for r in &report.reports {
            let want = table
                .iter()
                .find(|((p, q), _)| Slope { p: *p, q: *q }.canonical() == r.slope)
                .map_or(Hyperbolic, |(_, k)| *k);
            ensure(r.class.kind == want, || format!("{name} {}: {:?}, expected {:?}", r.notation, r.class.kind, want))?;
        }
        if let Some(ex) = exceptional {
            ensure(sorted(&report.exceptional) == owned(ex), || format!("{name} exceptional {:?}", report.exceptional))?;
        }
        ensure(sorted(&report.lens_candidates) == owned(lens), || format!("{name} lens {:?}", report.lens_candidates))
    };

    let r = scan(&builtin("4_1"), 7, five, five, opts).map_err(|e| e.to_string())?;
    ensure(r.exceptional.len() == 10, || format!("4_1 has {} exceptional slopes", r.exceptional.len()))?;
    check(
        "4_1",
        r,
        &[
            ((1, 0), NonHyperbolicZero),
            ((0, 1), NonHyperbolicOne),
            ((1, 1), NonHyperbolicOne),
            ((1, -1), NonHyperbolicOne),
            ((2, 1), NonHyperbolicOne),
            ((2, -1), NonHyperbolicOne),
            ((3, 1), NonHyperbolicOne),
            ((3, -1), NonHyperbolicOne),
            ((4, 1), NonHyperbolicDivergent),
            ((4, -1), NonHyperbolicDivergent),
        ],
        Some(&["1/0", "0", "1", "-1", "2", "-2", "3", "-3", "4", "-4"]),
        &["1/0"],
    )?;

    let r = scan(&builtin("5_2"), 6, five, five, opts).map_err(|e| e.to_string())?;
    check(
        "5_2",
        r,
        &[
            ((1, 0), NonHyperbolicZero),
            ((0, 1), NonHyperbolicDivergent),
            ((1, 1), NonHyperbolicOne),
            ((2, 1), NonHyperbolicOne),
            ((3, 1), NonHyperbolicOne),
            ((4, 1), NonHyperbolicDivergent),
        ],
        Some(&["1/0", "0", "1", "2", "3", "4"]),
        &["1/0"],
    )?;

    let table = [
        ((0, 1), NonHyperbolicZero),
        ((1, 0), NonHyperbolicZero),
        ((1, -1), NonHyperbolicZero),
        ((1, -2), NonHyperbolicOne),
        ((1, 1), NonHyperbolicOne),
        ((1, 2), NonHyperbolicDivergent),
        ((2, -1), NonHyperbolicOne),
        ((3, -2), NonHyperbolicDivergent),
    ];
    let slopes: Vec<Slope> = table.iter().map(|&((p, q), _)| Slope::new(p, q).unwrap()).collect();
    let r = scan_slopes(&builtin("m003"), &slopes, five, five, opts).map_err(|e| e.to_string())?;
    check("m003", r, &table, None, &["0", "1/0", "-1"])?;
    Ok("4_1 (36 slopes), 5_2 (24 slopes), m003 (8 slopes)".into())
}

fn property_suites() -> Outcome {
    let six = x(6);

    // two completions of the 4_1 rows
    let spec = catalog::builtin("4_1").unwrap();
    let ManifoldSource::Gluing { data, .. } = &spec.source else { unreachable!() };
    let g1 = complete(data).map_err(|e| e.to_string())?.g;
    let mut g2 = g1.clone();
    let q_2 = g2[1].clone();
    for (a, b) in g2[3].iter_mut().zip(&q_2) {
        *a -= 2 * b;
    }
    let frames = [g1, g2].map(|g| {
        let source = IndexSource::Engine {
            data: data.clone(),
            frame: SymplecticFrame::from_matrix(g).unwrap(),
        };
        CuspedIndexer::new("4_1", &source, Arc::default(), SumOptions::default())
    });
    for m in -2..=2 {
        for e in -2..=2 {
            let a = frames[0].index(m, e, six).map_err(|e| e.to_string())?;
            let b = frames[1].index(m, e, six).map_err(|e| e.to_string())?;
            ensure(a == b, || format!("completions disagree at ({m},{e})"))?;
        }
    }

    // Z2 symmetry and shell/cutoff stability on every builtin
    for name in ["4_1", "5_2", "m003"] {
        let man = builtin(name);
        let wide = CuspedIndexer::new(name, &man.source, Arc::default(), SumOptions { margin: 6, max_shell: 96 });
        for m in -2..=2i64 {
            for e in -2..=2i64 {
                let a = man.indexer.compute(m, e, six).map_err(|e| e.to_string())?;
                let b = man.indexer.compute(-m, -e, six).map_err(|e| e.to_string())?;
                ensure(a == b, || format!("{name} Z2 fails at ({m},{e})"))?;
                let w = wide.compute(m, e, six).map_err(|e| e.to_string())?;
                ensure(a == w, || format!("{name} ({m},{e}) changes with margin 6"))?;
                let deeper = man.indexer.compute(m, e, x(8)).map_err(|e| e.to_string())?;
                ensure(deeper.truncate(six) == a, || format!("{name} ({m},{e}) changes with cutoff"))?;
                let t = tet_index(m, e, x(10)).truncate(six);
                ensure(t == tet_index(m, e, six), || format!("I_tet({m},{e}) changes with cutoff"))?;
            }
        }
    }

    // (r,s) shifts, slope sign, integrality of assembled series
    let opts = FillOptions::default();
    let mut filled = 0;
    for name in ["4_1", "5_2"] {
        let man = builtin(name);
        for s in slopes_up_to(6) {
            let rs = choose_rs(s);
            let base = catch_unwind(AssertUnwindSafe(|| filled_index_with_rs(&man.indexer, s, rs, x(5), opts)))
                .map_err(|_| format!("{name} {s}: non-integral filled series"))?
                .map_err(|e| e.to_string())?;
            filled += 1;
            for k in [-1, 2] {
                let shifted = filled_index_with_rs(&man.indexer, s, (rs.0 + k * s.p, rs.1 + k * s.q), x(5), opts)
                    .map_err(|e| e.to_string())?;
                ensure((base.status, &base.series) == (shifted.status, &shifted.series), || {
                    format!("{name} {s}: (r,s) shift by {k} changes the result")
                })?;
            }
            let neg = filled_index(&man.indexer, Slope { p: -s.p, q: -s.q }, x(5), opts).map_err(|e| e.to_string())?;
            ensure((base.status, &base.series) == (neg.status, &neg.series), || format!("{name} {s}: sign flip differs"))?;
            if base.status == FillStatus::Converged {
                ensure(base.series.is_some(), || format!("{name} {s}: missing series"))?;
            }
        }
    }
    Ok(format!("completion, Z2, stability on 3 builtins; shifts, signs and integrality on {filled} fillings"))
}

fn determinism() -> Outcome {
    let run = |jobs: &str| {
        Command::new(env!("CARGO_BIN_EXE_dehnscope"))
            .args(["selftest", "--jobs", jobs])
            .env_remove("DEHNSCOPE_CACHE")
            .output()
            .map_err(|e| e.to_string())
    };
    let a = run("1")?;
    let b = run("8")?;
    ensure(a.status.success() && b.status.success(), || {
        format!("selftest failed:\n{}", String::from_utf8_lossy(&a.stdout))
    })?;
    ensure(a.stdout == b.stdout, || "selftest output differs between --jobs 1 and --jobs 8".into())?;
    Ok(format!("{} identical bytes", a.stdout.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("tetrahedron index golden", tetrahedron_golden, Duration::from_secs(1)),
        ("cusped index golden (4_1 engine)", cusped_golden, Duration::from_secs(10)),
        ("5_2 direct formula golden", five_two_golden, Duration::from_secs(30)),
        ("surgery equivalence", surgery_equivalence, Duration::from_secs(60)),
        ("slope table reproduction", slope_tables, Duration::from_secs(600)),
        ("property suites", property_suites, Duration::from_secs(300)),
        ("determinism", determinism, Duration::from_secs(300)),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(_) if elapsed > *limit => Err(format!("took {elapsed:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} [{elapsed:.2?}] {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name} [{elapsed:.2?}] {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
