//! `sparseid` command-line front-end.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 runtime error,
//! 3 unwritable output. Every failure prints one line to stderr starting
//! with `error[<kind>]:`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use sparseid::channels::{synth_sparse_channel, write_impulse_response};
use sparseid::harness::{
    proxy_diagnostic, render_csv, run_ensemble_with, sample_necessary_condition, Execution,
    ExperimentConfig, ProxyOptions, ProxyReport,
};
use sparseid::Error;

#[derive(Debug, Parser)]
#[command(
    name = "sparseid",
    version,
    about = "Sparse impulse response identification experiments"
)]
struct Cli {
    /// Print progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every configured algorithm over the ensemble and write a CSV of
    /// ensemble-mean misalignment curves.
    Run {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// `dotted.key=value`, applied after the file is parsed.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Worker threads for realizations (0 = all cores, 1 = sequential).
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Write a synthetic sparse impulse response file.
    GenChannel {
        #[arg(short = 'L', long)]
        length: usize,
        #[arg(long)]
        active: usize,
        #[arg(long, default_value_t = 0.0)]
        decay: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Sample the monotone-error gain bound and check the
    /// coefficient-difference proxy (NLMS, white input only).
    Diagnose {
        /// Defaults to the built-in 64-tap NLMS setup.
        #[arg(short, long)]
        config: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        /// Checkpoint spacing N in samples (defaults to the filter length).
        #[arg(long)]
        window: Option<usize>,
    },
    /// Parse and validate a config without running anything.
    ValidateConfig {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Runtime(String),
    Output(String),
}

impl Failure {
    fn report(&self) -> ExitCode {
        let (kind, msg, code) = match self {
            Failure::Config(m) => ("config", m, 1),
            Failure::Runtime(m) => ("runtime", m, 2),
            Failure::Output(m) => ("output", m, 3),
        };
        eprintln!("error[{kind}]: {}", msg.replace('\n', " "));
        ExitCode::from(code)
    }
}

fn config_failure(e: Error) -> Failure {
    Failure::Config(e.to_string())
}

fn runtime_failure(e: Error) -> Failure {
    Failure::Runtime(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid invocation");
            eprintln!("error[usage]: {}", first.trim_start_matches("error: "));
            return ExitCode::from(1);
        }
    };
    let verbose = cli.verbose;
    let outcome = match cli.command {
        Command::Run {
            config,
            output,
            overrides,
            threads,
        } => cmd_run(&config, &output, &overrides, threads, verbose),
        Command::GenChannel {
            length,
            active,
            decay,
            seed,
            output,
        } => cmd_gen_channel(length, active, decay, seed, &output),
        Command::Diagnose {
            config,
            output,
            overrides,
            samples,
            window,
        } => cmd_diagnose(
            config.as_deref(),
            &output,
            &overrides,
            samples,
            window,
            verbose,
        ),
        Command::ValidateConfig { config, overrides } => cmd_validate(&config, &overrides),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}

fn load_config(path: &Path, overrides: &[String]) -> Result<ExperimentConfig, Failure> {
    let cfg = ExperimentConfig::load(path, overrides).map_err(config_failure)?;
    // channel files are part of the configuration
    cfg.build_channel().map_err(config_failure)?;
    Ok(cfg)
}

fn write_output(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Output(format!("{}: {e}", path.display())))
}

fn cmd_run(
    config: &Path,
    output: &Path,
    overrides: &[String],
    threads: usize,
    verbose: bool,
) -> Result<(), Failure> {
    let cfg = load_config(config, overrides)?;
    let started = Instant::now();
    let execution = if threads == 1 {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::Runtime(e.to_string()))?;
    if verbose {
        eprintln!(
            "running {} algorithm(s) x {} realization(s) x {} iterations",
            cfg.algorithms.len(),
            cfg.experiment.realizations,
            cfg.experiment.iterations
        );
    }
    let ensemble = pool
        .install(|| run_ensemble_with(&cfg, execution))
        .map_err(runtime_failure)?;
    let csv = render_csv(&ensemble.mean).map_err(runtime_failure)?;
    write_output(output, &csv)?;
    for curve in &ensemble.mean {
        let reach = curve
            .iterations_to_reach(-20.0)
            .map_or_else(|| "none".to_string(), |k| k.to_string());
        println!(
            "summary algorithm={} final_db={:.3} iters_to_-20db={}",
            curve.algorithm,
            curve.final_db(),
            reach
        );
    }
    if verbose {
        eprintln!("wrote {} in {:.2?}", output.display(), started.elapsed());
    }
    Ok(())
}

fn cmd_gen_channel(
    length: usize,
    active: usize,
    decay: f64,
    seed: u64,
    output: &Path,
) -> Result<(), Failure> {
    let h = synth_sparse_channel(length, active, decay, seed).map_err(config_failure)?;
    write_impulse_response(&h, output).map_err(|e| Failure::Output(e.to_string()))?;
    println!(
        "channel taps={} active={} norm={:.6} file={}",
        h.len(),
        active,
        h.norm(),
        output.display()
    );
    Ok(())
}

fn render_proxy_csv(report: &ProxyReport) -> String {
    let mut out = String::from("iteration,misalignment_db,cosine,transient\n");
    for c in &report.checkpoints {
        let cosine = c.cosine.map_or_else(String::new, |v| format!("{v:.15e}"));
        out.push_str(&format!(
            "{},{:.15e},{},{}\n",
            c.iteration, c.misalignment_db, cosine, c.transient
        ));
    }
    out
}

fn cmd_diagnose(
    config: Option<&Path>,
    output: &Path,
    overrides: &[String],
    samples: usize,
    window: Option<usize>,
    verbose: bool,
) -> Result<(), Failure> {
    let cfg = match config {
        Some(path) => load_config(path, overrides)?,
        None => {
            let text = ExperimentConfig::proxy_default().to_toml_string();
            ExperimentConfig::from_toml_str(&text, overrides).map_err(config_failure)?
        }
    };
    let taps = cfg.build_channel().map_err(config_failure)?.len();
    let mut options = ProxyOptions::for_taps(taps);
    if let Some(n) = window {
        options.window = n;
    }
    let report = proxy_diagnostic(&cfg, &options).map_err(runtime_failure)?;

    let cond = sample_necessary_condition(samples, cfg.experiment.seed_base);
    write_output(output, &render_proxy_csv(&report))?;

    println!(
        "necessary-condition: {} violations={} monotone={} samples={}",
        if cond.violations == 0 { "PASS" } else { "FAIL" },
        cond.violations,
        cond.monotone,
        cond.samples
    );
    let fmt = |v: Option<f64>| v.map_or_else(|| "none".to_string(), |v| format!("{v:.4}"));
    let status = if report.median_transient_cosine.is_none() {
        "SKIPPED"
    } else if report.passed() {
        "PASS"
    } else {
        "FAIL"
    };
    println!(
        "proxy: {status} window={} checkpoints={} skipped={} median_transient_cosine={} control_p95={}",
        report.window,
        report.checkpoints.len(),
        report.skipped,
        fmt(report.median_transient_cosine),
        fmt(report.control_p95)
    );
    if report.skipped > 0 && verbose {
        eprintln!(
            "note: {} checkpoint(s) skipped with zero-norm proxy or error",
            report.skipped
        );
    }
    Ok(())
}

fn cmd_validate(config: &Path, overrides: &[String]) -> Result<(), Failure> {
    let cfg = load_config(config, overrides)?;
    println!(
        "config ok: {} algorithm(s), {} realization(s), {} iterations",
        cfg.algorithms.len(),
        cfg.experiment.realizations,
        cfg.experiment.iterations
    );
    Ok(())
}
