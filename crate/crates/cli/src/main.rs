//! `vcontact`: simulate scans, process and match profiles, run the
//! evaluation studies, and run the profile exchange.
//!
//! Study commands write CSV to `--out` (or stdout) and one JSON summary
//! line to stdout (or stderr when the CSV went to stdout). Exit status is 0
//! on success, 2 on a configuration or usage error, 1 otherwise.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde::Serialize;
use vcontact_core::{
    build_area_profile, build_case_profile, match_and_notify, parse_processed_profile, parse_signal_profile,
    serialize_processed_profile, DetectionConfig, LifespanSchedule,
};
use vcontact_eval::{
    baseline_means, proximity_means, robustness_means, run_baseline_comparison, run_in_out_simulation,
    run_proximity_study, run_robustness_suite, simulate_proximity, to_csv, EvalError, Experiment,
};
use vcontact_exchange::{
    client_sync, AppState, HttpTransport, RetryPolicy, Store, SyncConfig, TOKEN_ENV,
};
use vcontact_sim::ScenarioConfig;

#[derive(Parser)]
#[command(name = "vcontact", version, about = "WiFi-scan contact detection toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate signal profiles and ground truth from a scenario file.
    Simulate {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Turn a signal profile into a processed profile.
    Process {
        profile: PathBuf,
        /// Lifespan in seconds.
        #[arg(long, default_value_t = 1800)]
        lifespan: u32,
        /// Build an area profile over the stay `START..END` instead.
        #[arg(long, value_name = "START..END")]
        area: Option<String>,
        #[arg(long, default_value = "case")]
        label: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Match a user's signal profile against processed profiles.
    Match {
        #[arg(long)]
        user: PathBuf,
        #[arg(long = "published", required = true, num_args = 1..)]
        published: Vec<PathBuf>,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
    },
    /// Full precision/recall curves per seed and proximity.
    Calibrate(StudyArgs),
    /// Calibrated metrics per seed and proximity.
    ProximityStudy {
        #[command(flatten)]
        args: StudyArgs,
        /// Add Jaccard, AMD and AED rows.
        #[arg(long)]
        baselines: bool,
    },
    /// Inside/outside classification of a surveyed area.
    InoutStudy(StudyArgs),
    /// Filtering, noise, sampling period and device-pair tables.
    Robustness(StudyArgs),
    /// Run the exchange server.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long)]
        data_dir: PathBuf,
        #[arg(long, default_value = "127.0.0.1")]
        bind: String,
        #[arg(long, default_value_t = 28)]
        retention_days: i64,
    },
    /// Upload a processed profile; prints its record id.
    Publish {
        file: PathBuf,
        #[arg(long)]
        endpoint: String,
    },
    /// Fetch new profiles and match the local profile against everything held.
    Sync {
        #[arg(long)]
        endpoint: String,
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
    },
}

#[derive(clap::Args)]
struct StudyArgs {
    config: PathBuf,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Other(String),
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        if e.is_config() {
            Failure::Config(e.to_string())
        } else {
            Failure::Other(e.to_string())
        }
    }
}

fn other(e: impl std::fmt::Display) -> Failure {
    Failure::Other(e.to_string())
}

fn config(e: impl std::fmt::Display) -> Failure {
    Failure::Config(e.to_string())
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Other(format!("{}: {e}", path.display())))
}

fn experiment(path: &Path) -> Result<Experiment, Failure> {
    let text = fs::read_to_string(path).map_err(|e| config(format!("{}: {e}", path.display())))?;
    Ok(Experiment::parse(&text)?)
}

fn emit<S: Serialize>(args: &StudyArgs, csv: &str, summary: &S) -> Result<(), Failure> {
    let line = serde_json::to_string(summary).map_err(other)?;
    match &args.out {
        Some(path) => {
            fs::write(path, csv).map_err(|e| other(format!("{}: {e}", path.display())))?;
            println!("{line}");
        }
        None => {
            std::io::stdout().write_all(csv.as_bytes()).map_err(other)?;
            eprintln!("{line}");
        }
    }
    Ok(())
}

fn calibrate(args: &StudyArgs) -> Result<(), Failure> {
    #[derive(Serialize)]
    struct CurveRow {
        seed: u64,
        k: f64,
        alpha: f64,
        precision: f64,
        recall: f64,
        f1: f64,
        detected: usize,
        intersection: bool,
    }
    let e = experiment(&args.config)?;
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for &seed in &e.study.seeds {
        let data = simulate_proximity(&e.site, &e.study, seed)?;
        for (row, curve) in vcontact_eval::evaluate_proximities(seed, &data, &data.scores(), &e.study)? {
            for p in &curve.points {
                rows.push(CurveRow {
                    seed,
                    k: row.k,
                    alpha: p.alpha,
                    precision: p.precision,
                    recall: p.recall,
                    f1: p.f1,
                    detected: p.detected,
                    intersection: p.alpha == curve.intersection_alpha,
                });
            }
            points.push(row);
        }
    }
    emit(args, &to_csv(&rows), &serde_json::json!({ "command": "calibrate", "intersections": points }))
}

fn proximity(args: &StudyArgs, baselines: bool) -> Result<(), Failure> {
    let e = experiment(&args.config)?;
    if baselines {
        let rows = run_baseline_comparison(&e.site, &e.study)?;
        emit(args, &to_csv(&rows), &serde_json::json!({ "command": "proximity-study", "mean": baseline_means(&rows) }))
    } else {
        let rows = run_proximity_study(&e.site, &e.study)?;
        emit(args, &to_csv(&rows), &serde_json::json!({ "command": "proximity-study", "mean": proximity_means(&rows) }))
    }
}

fn inout(args: &StudyArgs) -> Result<(), Failure> {
    let e = experiment(&args.config)?;
    let rows = run_in_out_simulation(&e.site, &e.study)?;
    let n = rows.len() as f64;
    let mean = |f: fn(&vcontact_eval::InOutRow) -> f64| rows.iter().map(f).sum::<f64>() / n;
    let summary = serde_json::json!({
        "command": "inout-study",
        "alpha": e.study.alpha,
        "precision": mean(|r| r.precision),
        "recall": mean(|r| r.recall),
        "f1": mean(|r| r.f1),
    });
    emit(args, &to_csv(&rows), &summary)
}

fn robustness(args: &StudyArgs) -> Result<(), Failure> {
    let e = experiment(&args.config)?;
    let report = run_robustness_suite(&e.site, &e.study, &e.robustness)?;
    let rows: Vec<_> = report.tables().into_iter().flat_map(|(_, t)| t.iter().cloned()).collect();
    emit(args, &to_csv(&rows), &serde_json::json!({ "command": "robustness", "mean": robustness_means(&rows) }))
}

fn simulate(path: &Path, out: &Path) -> Result<(), Failure> {
    let scenario = ScenarioConfig::load(path).map_err(config)?;
    let generated = scenario.generate().map_err(|e| match e {
        vcontact_sim::SimError::Config(_) => config(e),
        e => other(e),
    })?;
    let files = generated.write_to(out).map_err(other)?;
    println!("{}", serde_json::json!({ "command": "simulate", "files": files }));
    Ok(())
}

fn process(profile: &Path, lifespan: u32, area: Option<&str>, label: &str, out: Option<&Path>) -> Result<(), Failure> {
    let signal = parse_signal_profile(&read(profile)?).map_err(other)?;
    let processed = match area {
        None => build_case_profile(&signal, &LifespanSchedule::uniform(lifespan), label).map_err(other)?,
        Some(range) => {
            let (a, b) = range.split_once("..").ok_or_else(|| config("--area takes START..END"))?;
            let start = a.parse().map_err(|_| config("--area start must be an integer"))?;
            let end = b.parse().map_err(|_| config("--area end must be an integer"))?;
            build_area_profile(&signal, start, end, lifespan, label).map_err(other)?
        }
    };
    let text = serialize_processed_profile(&processed);
    match out {
        Some(p) => fs::write(p, text).map_err(other),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(other),
    }
}

fn run_match(user: &Path, published: &[PathBuf], alpha: f64) -> Result<(), Failure> {
    let cfg = DetectionConfig::new(alpha).map_err(config)?;
    let user = parse_signal_profile(&read(user)?).map_err(other)?;
    let published = published
        .iter()
        .map(|p| parse_processed_profile(&read(p)?).map_err(|e| other(format!("{}: {e}", p.display()))))
        .collect::<Result<Vec<_>, _>>()?;
    let report = match_and_notify(&user, &published, &cfg);
    print!("{}", report.to_text());
    println!("{}", serde_json::to_string(&report.summary()).map_err(other)?);
    Ok(())
}

fn serve(port: u16, data_dir: &Path, bind: &str, retention_days: i64) -> Result<(), Failure> {
    if retention_days <= 0 {
        return Err(config("--retention-days must be positive"));
    }
    let store = Store::open(data_dir, retention_days * 24 * 3600).map_err(other)?;
    let token = std::env::var(TOKEN_ENV).ok().filter(|t| !t.is_empty());
    let runtime = tokio::runtime::Runtime::new().map_err(other)?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind((bind, port)).await.map_err(other)?;
        log::info!("listening on {}", listener.local_addr().map_err(other)?);
        vcontact_exchange::serve(listener, AppState::new(Arc::new(store), token)).await.map_err(other)
    })
}

fn publish(file: &Path, endpoint: &str) -> Result<(), Failure> {
    let bytes = read(file)?;
    let token = std::env::var(TOKEN_ENV).ok().filter(|t| !t.is_empty());
    let id = HttpTransport::new(endpoint).map_err(other)?.with_token(token).publish(&bytes).map_err(other)?;
    println!("{id}");
    Ok(())
}

fn sync(endpoint: &str, profile: &Path, state: &Path, alpha: f64) -> Result<(), Failure> {
    let detection = DetectionConfig::new(alpha).map_err(config)?;
    let user = parse_signal_profile(&read(profile)?).map_err(other)?;
    let transport = HttpTransport::new(endpoint).map_err(other)?;
    let outcome = client_sync(state, &transport, &user, &SyncConfig { detection, retry: RetryPolicy::default() }).map_err(other)?;
    print!("{}", outcome.report.to_text());
    println!(
        "{}",
        serde_json::json!({ "new_records": outcome.new_records, "cursor": outcome.cursor, "summary": outcome.report.summary() })
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate { config, out } => simulate(config, out),
        Command::Process { profile, lifespan, area, label, out } => {
            process(profile, *lifespan, area.as_deref(), label, out.as_deref())
        }
        Command::Match { user, published, alpha } => run_match(user, published, *alpha),
        Command::Calibrate(args) => calibrate(args),
        Command::ProximityStudy { args, baselines } => proximity(args, *baselines),
        Command::InoutStudy(args) => inout(args),
        Command::Robustness(args) => robustness(args),
        Command::Serve { port, data_dir, bind, retention_days } => serve(*port, data_dir, bind, *retention_days),
        Command::Publish { file, endpoint } => publish(file, endpoint),
        Command::Sync { endpoint, profile, state, alpha } => sync(endpoint, profile, state, *alpha),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Other(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
