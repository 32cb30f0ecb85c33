//! `sphere-feynman` command line.
//!
//! Configuration is layered: built-in defaults, then `--config FILE`, then
//! `--set key=value` overrides, then explicitly given named flags. The
//! effective configuration is echoed into every output's metadata.

use chrono::{SecondsFormat, Utc};
use clap::parser::ValueSource;
use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use crate::bump::BumpProfile;
use crate::error::{Error, Result};
use crate::experiments::{self, Column, ExperimentConfig, ResultTable, TestState};
use crate::propagator::slice_eigenvalues;
use crate::spectral::SpectralState;

/// Environment variable capping worker threads (`0` = one per core).
pub const THREADS_ENV: &str = "SPHERE_FEYNMAN_THREADS";

const DEFAULT_N: &str = "8,16,32,64,128,256,512,1024,2048,4096";

fn defaults() -> ExperimentConfig {
    ExperimentConfig::default()
}

#[derive(Parser, Debug)]
#[command(
    name = "sphere-feynman",
    version,
    about = "Time-slicing approximation of the Schrödinger propagator on the unit sphere"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Slice eigenvalues α_l(t) for 0 ≤ l ≤ lmax
    Eigenvalues(Flags),
    /// Operator-norm error with the growing projector N^{1/3−ε}
    Converge(Flags),
    /// Error on a test state, with and without the projector ρ(N)
    Strong(Flags),
    /// Degrees where one slice halves the amplitude
    Counterexample(Flags),
    /// Van Vleck and residual identities against finite differences
    Verify(Flags),
    /// Every experiment above in turn
    All(Flags),
}

#[derive(Args, Debug)]
struct Flags {
    /// JSON file with ExperimentConfig fields
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override one config field, e.g. `--set bump.r_cut=2.0`; repeatable
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Total time t
    #[arg(long, allow_negative_numbers = true, default_value_t = defaults().t_total)]
    t: f64,
    /// Slice counts, comma separated and strictly increasing; for
    /// `counterexample` this sets the scan sweep (default 4,8,…,512)
    #[arg(long = "n", value_name = "LIST", default_value = DEFAULT_N)]
    n: String,
    /// ε in the projector energy N^{1/3−ε}
    #[arg(long, default_value_t = defaults().epsilon)]
    epsilon: f64,
    /// Highest harmonic degree for eigenvalues and presets
    #[arg(long, default_value_t = defaults().l_max)]
    lmax: usize,
    /// Radius where the cutoff starts to fall
    #[arg(long, default_value_t = defaults().bump.r_flat())]
    r_flat: f64,
    /// Radius where the cutoff reaches zero
    #[arg(long, default_value_t = defaults().bump.r_cut())]
    r_cut: f64,
    /// Test state: lowband, gauss, delta-like, or a JSON state file
    #[arg(long, value_name = "PRESET|PATH", default_value = "lowband")]
    state: String,
    /// Seed of the random point pairs in `verify`
    #[arg(long, default_value_t = defaults().seed)]
    seed: u64,
    /// Run name used in output file names
    #[arg(long, default_value_t = defaults().name)]
    name: String,
}

fn explicit(m: &ArgMatches, id: &str) -> bool {
    m.value_source(id) == Some(ValueSource::CommandLine)
}

fn parse_n(list: &str, field: &'static str) -> Result<Vec<usize>> {
    list.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|e| Error::invalid(field, format!("{s:?}: {e}")))
        })
        .collect()
}

fn parse_state(spec: &str) -> Result<TestState> {
    if let Ok(p) = serde_json::from_value(Value::String(spec.to_string())) {
        return Ok(TestState::Preset(p));
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(Error::invalid(
            "test_state",
            format!("{spec:?} is neither a preset (lowband, gauss, delta-like) nor a file"),
        ));
    }
    let s: SpectralState = serde_json::from_reader(std::fs::File::open(path)?)?;
    Ok(TestState::Explicit(s))
}

fn set_path(root: &mut Value, key: &str, value: Value) -> Result<()> {
    let mut cur = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let obj = cur.as_object_mut().ok_or_else(|| {
            Error::invalid("set", format!("{key}: {part} is not inside an object"))
        })?;
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        cur = obj.entry(part.to_string()).or_insert_with(|| json!({}));
    }
    Ok(())
}

fn build_config(m: &ArgMatches, flags: &Flags, scan: bool) -> Result<ExperimentConfig> {
    let mut cfg = match &flags.config {
        Some(path) => serde_json::from_reader::<_, ExperimentConfig>(std::io::BufReader::new(
            std::fs::File::open(path)?,
        ))?,
        None => ExperimentConfig::default(),
    };
    if !flags.set.is_empty() {
        let mut v = serde_json::to_value(&cfg)?;
        for kv in &flags.set {
            let (k, raw) = kv
                .split_once('=')
                .ok_or_else(|| Error::invalid("set", format!("{kv:?} is not KEY=VALUE")))?;
            let val = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
            set_path(&mut v, k.trim(), val)?;
        }
        cfg = serde_json::from_value(v)?;
    }
    if explicit(m, "t") {
        cfg.t_total = flags.t;
    }
    if explicit(m, "n") {
        if scan {
            cfg.scan_n_sweep = parse_n(&flags.n, "scan_n_sweep")?;
        } else {
            cfg.n_sweep = parse_n(&flags.n, "n_sweep")?;
        }
    }
    if explicit(m, "epsilon") {
        cfg.epsilon = flags.epsilon;
    }
    if explicit(m, "lmax") {
        cfg.l_max = flags.lmax;
    }
    if explicit(m, "r_flat") || explicit(m, "r_cut") {
        let rf = if explicit(m, "r_flat") {
            flags.r_flat
        } else {
            cfg.bump.r_flat()
        };
        let rc = if explicit(m, "r_cut") {
            flags.r_cut
        } else {
            cfg.bump.r_cut()
        };
        cfg.bump = BumpProfile::new(rf, rc)?;
    }
    if explicit(m, "state") {
        cfg.test_state = parse_state(&flags.state)?;
    }
    if explicit(m, "seed") {
        cfg.seed = flags.seed;
    }
    if explicit(m, "name") {
        cfg.name = flags.name.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        Error::invalid(
            "SPHERE_FEYNMAN_THREADS",
            format!("{raw:?} is not a thread count"),
        )
    })?;
    // a second initialisation in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn eigenvalue_table(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let ev = slice_eigenvalues(cfg.t_total, cfg.l_max, &cfg.bump)?;
    let mut table = ResultTable::new();
    table
        .metadata
        .insert("experiment".into(), json!("eigenvalues"));
    table
        .metadata
        .insert("config".into(), serde_json::to_value(cfg)?);
    table
        .metadata
        .insert("version".into(), json!(experiments::VERSION));
    table.push_column(
        "l",
        Column::Integer((0..=cfg.l_max).map(|l| Some(l as i64)).collect()),
    )?;
    table.push_column("alpha", Column::Complex(ev.alpha().to_vec()))?;
    table.push_column(
        "abs_alpha",
        Column::Real(ev.alpha().iter().map(|a| a.norm()).collect()),
    )?;
    table.push_column("quad_error", Column::Real(ev.quad_error().to_vec()))?;
    Ok(table)
}

fn run_one(experiment: &str, cfg: &ExperimentConfig) -> Result<ResultTable> {
    match experiment {
        "eigenvalues" => eigenvalue_table(cfg),
        "converge" => experiments::run_uniform_convergence(cfg),
        "strong" => experiments::run_strong_convergence(cfg),
        "counterexample" => experiments::run_counterexample(cfg),
        "verify" => experiments::run_verification_suite(cfg),
        other => unreachable!("unknown experiment {other}"),
    }
}

fn unique_stem(dir: &Path, experiment: &str, name: &str) -> String {
    let stamp = Utc::now().format("%Y%m%dT%H%M%SZ");
    let base = format!("{experiment}-{name}-{stamp}");
    let mut stem = base.clone();
    let mut k = 1;
    while dir.join(format!("{stem}.csv")).exists()
        || dir.join(format!("FAILED-{stem}.txt")).exists()
    {
        stem = format!("{base}-{k}");
        k += 1;
    }
    stem
}

fn summarize(experiment: &str, table: &ResultTable) {
    match experiment {
        "verify" => {
            if let (Some(Column::Text(names)), Some(err)) =
                (table.column("check"), table.real("max_error"))
            {
                for (n, e) in names.iter().zip(err) {
                    println!("  {n}: max error {e:.3e}");
                }
            }
        }
        "counterexample" => {
            if let Some(missing) = table.metadata.get("not_found").and_then(Value::as_array) {
                if !missing.is_empty() {
                    println!(
                        "  no degree below 1/2 within the scan for {} rows",
                        missing.len()
                    );
                }
            }
        }
        _ => {}
    }
}

/// Runs the CLI and returns the process exit code: 0 on success, 1 on
/// configuration errors, 2 on numerical failures.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match Cli::command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return 1;
        }
    };
    let (sub, sub_m) = matches.subcommand().expect("subcommand is required");
    let (all, flags) = match &cli.command {
        Command::All(f) => (true, f),
        Command::Eigenvalues(f)
        | Command::Converge(f)
        | Command::Strong(f)
        | Command::Verify(f) => (false, f),
        Command::Counterexample(f) => (false, f),
    };
    let scan = matches!(cli.command, Command::Counterexample(_));
    let cfg = match configure_threads().and_then(|_| build_config(sub_m, flags, scan)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    if let Err(e) = std::fs::create_dir_all(&flags.out) {
        eprintln!("error: cannot create {}: {e}", flags.out.display());
        return 1;
    }
    let list: &[&str] = if all {
        &[
            "eigenvalues",
            "converge",
            "strong",
            "counterexample",
            "verify",
        ]
    } else {
        std::slice::from_ref(&sub)
    };

    let mut code = 0;
    for &experiment in list {
        let started = Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true);
        let stem = unique_stem(&flags.out, experiment, &cfg.name);
        match run_one(experiment, &cfg) {
            Ok(mut table) => {
                table.metadata.insert("started".into(), json!(started));
                table.metadata.insert(
                    "finished".into(),
                    json!(Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)),
                );
                match table.save(&flags.out, &stem) {
                    Ok((csv, _)) => {
                        println!("{experiment}: {} rows -> {}", table.rows(), csv.display());
                        summarize(experiment, &table);
                    }
                    Err(e) => {
                        eprintln!("error: {experiment}: {e}");
                        code = code.max(1);
                    }
                }
            }
            Err(e) => {
                eprintln!("error: {experiment}: {e}");
                if e.is_config_error() {
                    return 1;
                }
                let marker = flags.out.join(format!("FAILED-{stem}.txt"));
                let _ = std::fs::write(&marker, format!("{experiment} failed at {started}: {e}\n"));
                code = 2;
            }
        }
    }
    code
}
