//! The `dehnscope` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::classify::{scan, scan_slopes, ScanReport};
use crate::error::{Error, Result};
use crate::filling::{filled_index, FillOptions, Slope};
use crate::index::{IndexSource, SumOptions};
use crate::manifold::Manifold;
use crate::selftest::{self, Fault};
use crate::series::HalfExp;
use crate::tetindex::{TetIndexCache, TetIndexKey};

#[derive(Parser, Debug)]
#[command(name = "dehnscope", version, about = "3D index of cusped and Dehn-filled 3-manifolds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tetrahedron index I_Δ(m, e)
    Tet(TetArgs),
    /// Cusped index I_N(m, e) of a manifold
    Cusped(CuspedArgs),
    /// Dehn-filled index at one slope
    Fill(FillArgs),
    /// Classify every slope up to a norm (or a given list)
    Scan(ScanArgs),
    /// Print the symplectic frame G and its inverse as JSON
    DumpFrame(SourceArgs),
    /// Run the golden and property checks
    Selftest(SelftestArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Json,
}

#[derive(Args, Debug)]
pub struct CacheArgs {
    /// Tetrahedron index cache file, loaded if present and saved afterwards
    #[arg(long, env = "DEHNSCOPE_CACHE")]
    pub cache: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TetArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub m: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub e: i64,
    /// Cutoff exponent, e.g. 4 or 9/2
    #[arg(long, default_value = "4")]
    pub order: HalfExp,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[command(flatten)]
    pub cache: CacheArgs,
}

#[derive(Args, Debug)]
pub struct SourceArgs {
    /// A manifold JSON file or builtin:NAME
    pub file: String,
}

#[derive(Args, Debug)]
pub struct CuspedArgs {
    pub file: String,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
    pub m: i64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
    pub e: i64,
    /// Batch mode: "m1,e1;m2,e2;..."
    #[arg(long, allow_hyphen_values = true)]
    pub pairs: Option<String>,
    #[arg(long, default_value = "4")]
    pub order: HalfExp,
    /// Quiet shells required before the lattice sum stops
    #[arg(long, default_value_t = 3)]
    pub margin: u32,
    #[arg(long, default_value_t = 64)]
    pub max_shell: u32,
    /// Also print the frame used by the engine
    #[arg(long)]
    pub dump_frame: bool,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[command(flatten)]
    pub cache: CacheArgs,
}

#[derive(Args, Debug)]
pub struct FillArgs {
    pub file: String,
    #[arg(long, allow_hyphen_values = true)]
    pub p: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub q: i64,
    #[arg(long, default_value = "7")]
    pub order: HalfExp,
    #[arg(long, default_value_t = 256)]
    pub tmax: u32,
    #[arg(long, default_value_t = 8)]
    pub window: usize,
    #[arg(long, default_value_t = 16)]
    pub warmup: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(flatten)]
    pub cache: CacheArgs,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    pub file: String,
    #[arg(long, default_value_t = 7)]
    pub max_slope: i64,
    /// Explicit slopes "p1,q1;p2,q2;..." instead of a norm bound
    #[arg(long, allow_hyphen_values = true)]
    pub slopes: Option<String>,
    #[arg(long, default_value = "5")]
    pub order: HalfExp,
    #[arg(long, default_value = "5")]
    pub sharp: HalfExp,
    #[arg(long, default_value_t = 256)]
    pub tmax: u32,
    #[arg(long, default_value_t = 8)]
    pub window: usize,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub cache: CacheArgs,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Corrupt an input on purpose: corrupt-builtin
    #[arg(long)]
    pub inject_fault: Option<Fault>,
}

/// Parses `argv` and runs the command, returning the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Tet(a) => tet(a, out),
        Command::Cusped(a) => cusped(a, out),
        Command::Fill(a) => fill(a, out),
        Command::Scan(a) => scan_cmd(a, out),
        Command::DumpFrame(a) => {
            let m = Manifold::load(&a.file, Arc::default(), SumOptions::default())?;
            emit(out, &frame_json(&m.source))?;
            Ok(0)
        }
        Command::Selftest(a) => {
            let report = with_jobs(a.jobs, || selftest::run(a.inject_fault))?;
            let text = match a.format {
                Format::Table => report.to_text(),
                Format::Json => {
                    let checks: Vec<_> = report
                        .checks
                        .iter()
                        .map(|c| serde_json::json!({"name": c.name, "passed": c.passed, "detail": c.detail}))
                        .collect();
                    pretty(&serde_json::json!({"passed": report.passed(), "checks": checks}))
                }
            };
            emit(out, &text)?;
            Ok(if report.passed() { 0 } else { 1 })
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    let text = if text.ends_with('\n') { text.to_string() } else { format!("{text}\n") };
    out.write_all(text.as_bytes()).map_err(|source| Error::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

fn load_cache(args: &CacheArgs) -> Result<Arc<TetIndexCache>> {
    match &args.cache {
        Some(path) if path.exists() => Ok(Arc::new(TetIndexCache::load(path)?)),
        _ => Ok(Arc::default()),
    }
}

fn save_cache(args: &CacheArgs, cache: &TetIndexCache) -> Result<()> {
    match &args.cache {
        Some(path) => cache.save(path),
        None => Ok(()),
    }
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder.build().map_err(|e| Error::schema("--jobs", e.to_string()))?;
    Ok(pool.install(f))
}

/// Parses "a,b;c,d;..." into integer pairs.
pub fn parse_pairs(text: &str, flag: &str) -> Result<Vec<(i64, i64)>> {
    text.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let bad = || Error::schema(flag, format!("expected \"a,b\", found {item:?}"));
            let (a, b) = item.split_once(',').ok_or_else(bad)?;
            Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
        })
        .collect()
}

fn tet(a: TetArgs, out: &mut dyn Write) -> Result<i32> {
    let cache = load_cache(&a.cache)?;
    let s = cache.get(TetIndexKey::new(a.m, a.e, a.order));
    let text = match a.format {
        Format::Table => s.to_string(),
        Format::Json => pretty(&serde_json::json!({"m": a.m, "e": a.e, "series": s, "text": s.to_string()})),
    };
    emit(out, &text)?;
    save_cache(&a.cache, &cache)?;
    Ok(0)
}

fn frame_json(source: &IndexSource) -> String {
    match source {
        IndexSource::Engine { frame, .. } => pretty(&serde_json::json!({"G": frame.g, "G_inv": frame.g_inv})),
        IndexSource::Formula(_) => pretty(&serde_json::json!({"G": null, "G_inv": null, "note": "formula input has no frame"})),
    }
}

fn cusped(a: CuspedArgs, out: &mut dyn Write) -> Result<i32> {
    let cache = load_cache(&a.cache)?;
    let options = SumOptions {
        margin: a.margin,
        max_shell: a.max_shell,
    };
    let m = Manifold::load(&a.file, cache.clone(), options)?;
    if a.dump_frame {
        emit(out, &frame_json(&m.source))?;
    }
    let pairs = match &a.pairs {
        Some(text) => parse_pairs(text, "--pairs")?,
        None => vec![(a.m, a.e)],
    };
    let table = m.indexer.table(&pairs, a.order)?;
    let text = match a.format {
        Format::Json => pretty(&table.to_json()),
        Format::Table => {
            let mut s = String::new();
            for (&(m, e), series) in &table.entries {
                s.push_str(&format!("I({m},{e}) = {series:#}\n"));
            }
            s
        }
    };
    emit(out, &text)?;
    save_cache(&a.cache, &cache)?;
    Ok(0)
}

fn fill(a: FillArgs, out: &mut dyn Write) -> Result<i32> {
    let cache = load_cache(&a.cache)?;
    let m = Manifold::load(&a.file, cache.clone(), SumOptions::default())?;
    let reported = Slope::new(a.p, a.q)?;
    let (p, q) = m.to_meridian_longitude(a.p, a.q);
    let opts = FillOptions {
        tmax: a.tmax,
        window: a.window,
        warmup: a.warmup,
        ..FillOptions::default()
    };
    let r = filled_index(&m.indexer, Slope::new(p, q)?, a.order, opts)?;
    let text = match a.format {
        Format::Json => pretty(&serde_json::json!({
            "slope": [reported.p, reported.q],
            "status": r.status,
            "series": r.series,
            "text": r.series.as_ref().map(|s| format!("{s:#}")),
            "diagnostics": r.diagnostics,
        })),
        Format::Table => format!(
            "slope ({},{}) [{}]: {}",
            reported.p,
            reported.q,
            r.status.as_str(),
            r.series.as_ref().map_or("∞".to_string(), |s| format!("{s:#}"))
        ),
    };
    emit(out, &text)?;
    save_cache(&a.cache, &cache)?;
    Ok(0)
}

fn scan_cmd(a: ScanArgs, out: &mut dyn Write) -> Result<i32> {
    if a.slopes.is_none() && a.max_slope < 1 {
        return Err(Error::schema("--max-slope", "must be at least 1"));
    }
    let cache = load_cache(&a.cache)?;
    let m = Manifold::load(&a.file, cache.clone(), SumOptions::default())?;
    let opts = FillOptions {
        tmax: a.tmax,
        window: a.window,
        ..FillOptions::default()
    };
    let report: ScanReport = with_jobs(a.jobs, || match &a.slopes {
        Some(text) => {
            let slopes = parse_pairs(text, "--slopes")?
                .into_iter()
                .map(|(p, q)| Slope::new(p, q))
                .collect::<Result<Vec<_>>>()?;
            scan_slopes(&m, &slopes, a.order, a.sharp, opts)
        }
        None => scan(&m, a.max_slope, a.order, a.sharp, opts),
    })??;
    let text = match a.format {
        Format::Table => report.to_table(),
        Format::Json => pretty(&serde_json::to_value(&report).expect("reports serialize")),
    };
    emit(out, &text)?;
    save_cache(&a.cache, &cache)?;
    Ok(0)
}
