use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use htester::harness::{
    calibrate, emit_report, run_experiment_detailed, summarize, write_calibration,
    CalibrationConfig, ExperimentConfig, ReportFormat,
};
use htester::verify::{run_suite, SuiteConfig};
use htester::{Error, Result};

#[derive(Parser)]
#[command(
    name = "htester",
    version,
    about = "Halfspace testing over rotation-invariant distributions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Master seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true, env = "HTESTER_THREADS", default_value_t = 1)]
    threads: usize,
    /// Report path (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format: csv or json-lines.
    #[arg(long, global = true)]
    format: Option<ReportFormat>,
    /// Config override, e.g. `constants.k1=4` or `trials=5`. Repeatable.
    #[arg(long = "override", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// One trial per cell; prints each verdict as JSON.
    Test {
        #[arg(long)]
        config: PathBuf,
    },
    /// Every trial of every cell; writes a report.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Runs the verification suite; exits with 2 if a check fails.
    Verify {
        /// Smaller sample sizes for a fast pass.
        #[arg(long)]
        quick: bool,
    },
    /// Runs a constant-calibration sweep.
    Calibrate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load_experiment(path: &Path, common: &Common, extra: &[String]) -> Result<ExperimentConfig> {
    let mut overrides = common.overrides.clone();
    if let Some(s) = common.seed {
        overrides.push(format!("seed={s}"));
    }
    if let Some(f) = common.format {
        overrides.push(format!("output.format=\"{}\"", format_name(f)));
    }
    overrides.extend_from_slice(extra);
    let cfg = ExperimentConfig::load(path, &overrides)?;
    for cell in cfg.cells() {
        let guard = cfg
            .constants
            .tester_config(cell.eps, cell.delta)
            .eps_guard(cell.n);
        if cell.eps < guard {
            eprintln!(
                "warning: eps={} is below (4c²n)^(-1/6) = {guard:.4} at n={}; the completeness guarantee does not cover this cell",
                cell.eps, cell.n
            );
        }
    }
    Ok(cfg)
}

fn format_name(f: ReportFormat) -> &'static str {
    match f {
        ReportFormat::Csv => "csv",
        ReportFormat::JsonLines => "json-lines",
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let common = &cli.common;
    match &cli.command {
        Command::Test { config } => {
            let cfg = load_experiment(config, common, &["trials=1".into()])?;
            let outcomes = run_experiment_detailed(&cfg, common.threads)?;
            for o in &outcomes {
                println!("{}", o.verdict.to_json()?);
            }
            if let Some(p) = common.out.as_deref().or(cfg.output.path.as_deref()) {
                let rows: Vec<_> = outcomes.into_iter().map(|o| o.row).collect();
                emit_report(&rows, cfg.output.format, Some(p))?;
            }
        }
        Command::Sweep { config } => {
            let cfg = load_experiment(config, common, &[])?;
            let rows: Vec<_> = run_experiment_detailed(&cfg, common.threads)?
                .into_iter()
                .map(|o| o.row)
                .collect();
            emit_report(
                &rows,
                cfg.output.format,
                common.out.as_deref().or(cfg.output.path.as_deref()),
            )?;
            for s in summarize(&rows) {
                eprintln!("{}: {s}", cfg.scenario);
            }
        }
        Command::Verify { quick } => {
            let mut sc = SuiteConfig::default();
            if *quick {
                sc = SuiteConfig {
                    gap_profiles: 1000,
                    counterexample_candidates: 20,
                    counterexample_samples: 20_000,
                    tail_samples: 20_000,
                    decomposition_pairs: 100,
                    ..sc
                };
            }
            if let Some(s) = common.seed {
                sc.seed = s;
            }
            let records = run_suite(&sc)?;
            let mut lines = Vec::new();
            for r in &records {
                eprintln!(
                    "{} {:<24} observed {:<12.6} limit {:<10} {}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.check,
                    r.observed,
                    r.limit,
                    r.detail
                );
                lines.push(serde_json::to_string(r).map_err(|e| Error::Config(e.to_string()))?);
            }
            let body = lines.join("\n") + "\n";
            match &common.out {
                Some(p) => std::fs::write(p, body).map_err(|source| Error::Io {
                    path: p.display().to_string(),
                    source,
                })?,
                None => print!("{body}"),
            }
            if records.iter().any(|r| !r.passed) {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Calibrate { config } => {
            let mut cfg = CalibrationConfig::load(config, &common.overrides)?;
            if let Some(s) = common.seed {
                cfg.scenario
                    .iter_mut()
                    .for_each(|sc| sc.experiment.seed = s);
            }
            let rows = calibrate(&cfg, common.threads)?;
            match common.out.as_deref().or(cfg.output.path.as_deref()) {
                Some(p) => {
                    let file = std::fs::File::create(p).map_err(|source| Error::Io {
                        path: p.display().to_string(),
                        source,
                    })?;
                    write_calibration(&rows, file)?
                }
                None => write_calibration(&rows, std::io::stdout().lock())?,
            }
        }
    }
    std::io::stdout().flush().ok();
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            e.print().ok();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
