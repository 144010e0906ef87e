mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use halfwave::experiments::{
    probe_csv, run_approximation, run_bootstrap_diagnostic, run_instability, run_smoothing,
    smoothing_eps_list, ExperimentConfig, ExperimentReport,
};
use halfwave::verify::{run_verify, VerifyOptions};

use crate::config::FileConfig;

#[derive(Parser)]
#[command(
    name = "halfwave",
    version,
    about = "Half-wave instability experiments and checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the acceptance checks and print a pass/fail table
    Verify(VerifyArgs),
    /// Duhamel smoothing sweep over eps
    Smoothing(RunArgs),
    /// Evolve both branches to the separation time and compare distances
    Instability(RunArgs),
    /// Approximation errors against the shifted Szego profiles, with a fit
    Approximation(RunArgs),
    /// Bootstrap quantity h_eps along each run
    Bootstrap(RunArgs),
}

#[derive(Args, Debug, Default)]
struct RunArgs {
    /// Target regularity, in (1/4, 1/2)
    #[arg(long)]
    s: Option<f64>,
    /// Values of eps, strictly decreasing; repeat the flag or separate by commas
    #[arg(long, value_delimiter = ',')]
    eps: Vec<f64>,
    /// Auxiliary regularity sigma
    #[arg(long)]
    sigma: Option<f64>,
    /// Fourier modes K, overriding the per-eps policy
    #[arg(long)]
    modes: Option<usize>,
    /// Time step, overriding the default policy
    #[arg(long)]
    dt: Option<f64>,
    /// Minimum number of time samples per run
    #[arg(long = "t-samples")]
    t_samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat `key = value` file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// Allow mode counts above the desk-scale limit
    #[arg(long = "force-large")]
    force_large: bool,
}

#[derive(Args, Debug, Default)]
struct VerifyArgs {
    #[arg(long)]
    seed: Option<u64>,
    /// Criteria to run (1-10); all when omitted
    #[arg(long, value_delimiter = ',')]
    criterion: Vec<u8>,
    /// Replace a row threshold, e.g. `--threshold 1=0`
    #[arg(long, value_parser = parse_override)]
    threshold: Vec<(String, f64)>,
    /// Also write the table to this file
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

fn parse_override(s: &str) -> std::result::Result<(String, f64), String> {
    let (id, value) = s.split_once('=').ok_or("expected ID=VALUE")?;
    let value = value
        .trim()
        .parse()
        .map_err(|_| format!("bad threshold `{value}`"))?;
    Ok((id.trim().to_string(), value))
}

/// Marks errors that should exit with status 2.
#[derive(Debug)]
struct InvalidConfig;

impl std::fmt::Display for InvalidConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("invalid configuration")
    }
}

impl std::error::Error for InvalidConfig {}

fn invalid(e: impl Into<anyhow::Error>) -> anyhow::Error {
    e.into().context(InvalidConfig)
}

/// Resolved settings for the sweep subcommands.
struct Settings {
    cfg: ExperimentConfig,
    out: PathBuf,
    eps_given: bool,
}

fn resolve(args: &RunArgs) -> Result<Settings> {
    let file = match &args.config {
        Some(p) => FileConfig::load(p).map_err(invalid)?,
        None => FileConfig::default(),
    };
    let s = match args.s {
        Some(s) => s,
        None => file.get("s").map_err(invalid)?.unwrap_or(0.4),
    };
    let mut cfg = ExperimentConfig::new(s);
    let eps = if args.eps.is_empty() {
        file.list("eps").map_err(invalid)?
    } else {
        args.eps.clone()
    };
    let eps_given = !eps.is_empty();
    if eps_given {
        cfg.eps_list = eps;
    }
    if let Some(sg) = args.sigma.or(file.get("sigma").map_err(invalid)?) {
        cfg.sigma = sg;
    }
    cfg.max_mode = args.modes.or(file.get("modes").map_err(invalid)?);
    cfg.dt = args.dt.or(file.get("dt").map_err(invalid)?);
    if let Some(n) = args.t_samples.or(file.get("t-samples").map_err(invalid)?) {
        cfg.t_samples = n;
    }
    cfg.seed = args
        .seed
        .or(file.get("seed").map_err(invalid)?)
        .unwrap_or(0);
    cfg.force_large = args.force_large || file.flag("force-large").map_err(invalid)?;
    let out = args
        .out
        .clone()
        .or(file.path("out"))
        .unwrap_or_else(|| PathBuf::from("out"));
    Ok(Settings {
        cfg,
        out,
        eps_given,
    })
}

fn checked(cfg: &ExperimentConfig) -> Result<()> {
    cfg.validate().map_err(invalid)?;
    cfg.check_size().map_err(invalid)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn print_rows(report: &ExperimentReport) {
    println!(
        "{:>10} {:>6} {:>10} {:>12} {:>12} {:>12} {:>12} {:>10}",
        "eps", "K", "d0", "d_closed", "d_numeric", "err_1", "err_2", "mass"
    );
    for r in &report.rows {
        println!(
            "{:>10.4e} {:>6} {:>10.4} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>10.2e}{}",
            r.eps,
            r.max_mode,
            r.d0,
            r.d_sep_closed,
            r.d_sep_numeric,
            r.approx_err[0],
            r.approx_err[1],
            r.mass_drift,
            r.failure
                .as_deref()
                .map(|f| format!("  {f}"))
                .unwrap_or_default()
        );
    }
}

fn write_report(report: &ExperimentReport, out: &Path) -> Result<()> {
    report
        .write_outputs(out)
        .with_context(|| format!("writing outputs to {}", out.display()))
}

fn rows_consistent(report: &ExperimentReport) -> bool {
    let mut ok = true;
    for r in &report.rows {
        if let Some(f) = &r.failure {
            eprintln!("eps = {}: {f}", r.eps);
            ok = false;
        } else if !r.triangle_holds() {
            eprintln!("eps = {}: triangle inequality violated", r.eps);
            ok = false;
        }
    }
    ok
}

fn instability(args: &RunArgs) -> Result<bool> {
    let set = resolve(args)?;
    checked(&set.cfg)?;
    let report = run_instability(&set.cfg)?;
    print_rows(&report);
    write_report(&report, &set.out)?;
    Ok(rows_consistent(&report))
}

fn approximation(args: &RunArgs) -> Result<bool> {
    let set = resolve(args)?;
    checked(&set.cfg)?;
    let rep = run_approximation(&set.cfg)?;
    print_rows(&rep.report);
    write_report(&rep.report, &set.out)?;
    write(
        &set.out.join("approximation.csv"),
        &probe_csv(&rep.probe_rows()),
    )?;
    let mut ok = rows_consistent(&rep.report);
    match &rep.fits[0] {
        Some(fit) => {
            println!(
                "fitted slope {:.4} (r2 {:.4}), predicted exponent {:.4}",
                fit.slope, fit.r2, rep.predicted_exponent
            );
            if fit.slope < rep.predicted_exponent - 0.1 {
                eprintln!("fitted slope below predicted exponent - 0.1");
                ok = false;
            }
        }
        None => println!("fewer than two rows with eps < 0.5; no fit"),
    }
    Ok(ok)
}

fn bootstrap(args: &RunArgs) -> Result<bool> {
    let set = resolve(args)?;
    checked(&set.cfg)?;
    let rep = run_bootstrap_diagnostic(&set.cfg)?;
    write_report(&rep.report, &set.out)?;
    write(
        &set.out.join("bootstrap.csv"),
        &probe_csv(&rep.probe_rows()),
    )?;
    println!("{:>10} {:>12} {:>12}", "eps", "sup h", "ratio");
    for r in &rep.report.rows {
        println!("{:>10.4e} {:>12.6} {:>12.6}", r.eps, r.h_sup, r.h_ratio);
    }
    println!(
        "ratio spread {:.4}, interpolation quotient max {:.12}",
        rep.ratio_spread, rep.interp_max
    );
    Ok(rows_consistent(&rep.report) && rep.interpolation_holds() && rep.ratio_stable())
}

fn smoothing(args: &RunArgs) -> Result<bool> {
    let set = resolve(args)?;
    let cfg = &set.cfg;
    let eps = if set.eps_given {
        cfg.eps_list.clone()
    } else {
        smoothing_eps_list()
    };
    let rep = run_smoothing(cfg.s, cfg.sigma, &eps, cfg.t_samples).map_err(invalid)?;
    fs::create_dir_all(&set.out).with_context(|| format!("creating {}", set.out.display()))?;
    write(
        &set.out.join("smoothing.csv"),
        &probe_csv(&rep.probe_rows()),
    )?;
    println!("{:>12} {:>9} {:>14}", "eps", "K", "sup |W|");
    for (e, k, v) in &rep.rows {
        println!("{e:>12.4e} {k:>9} {v:>14.6e}");
    }
    println!(
        "fitted slope {:.4} (r2 {:.4}), predicted exponent {:.4}",
        rep.fit.slope, rep.fit.r2, rep.predicted_exponent
    );
    Ok(rep.fit.slope >= rep.predicted_exponent - 0.1)
}

fn verify(args: &VerifyArgs) -> Result<bool> {
    let file = match &args.config {
        Some(p) => FileConfig::load(p).map_err(invalid)?,
        None => FileConfig::default(),
    };
    let mut opts = VerifyOptions {
        seed: args
            .seed
            .or(file.get("seed").map_err(invalid)?)
            .unwrap_or(0),
        ..Default::default()
    };
    let criteria = if args.criterion.is_empty() {
        file.list("criterion").map_err(invalid)?
    } else {
        args.criterion.clone()
    };
    if let Some(bad) = criteria.iter().find(|c| !(1..=10).contains(*c)) {
        return Err(invalid(anyhow::anyhow!("no criterion {bad}; use 1-10")));
    }
    if !criteria.is_empty() {
        opts.criteria = criteria;
    }
    opts.overrides = args.threshold.clone();
    let summary = run_verify(&opts);
    let text = summary.to_text();
    print!("{text}");
    if let Some(out) = args.out.clone().or(file.path("out")) {
        if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        write(&out, &text)?;
    }
    Ok(summary.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify(a) => verify(a),
        Command::Smoothing(a) => smoothing(a),
        Command::Instability(a) => instability(a),
        Command::Approximation(a) => approximation(a),
        Command::Bootstrap(a) => bootstrap(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let config_error = e.downcast_ref::<InvalidConfig>().is_some()
                || matches!(
                    e.downcast_ref::<halfwave::Error>(),
                    Some(halfwave::Error::InvalidParameter(_) | halfwave::Error::Regime(_))
                );
            ExitCode::from(if config_error { 2 } else { 1 })
        }
    }
}
