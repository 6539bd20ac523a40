use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use uncertainty_lab::connectionist::OverconfidenceWindow;
use uncertainty_lab::harness::{load_scenario, run_corpus, run_scenario, Format, RunOptions};

#[derive(Parser)]
#[command(
    name = "lab",
    about = "Run uncertainty scenarios and ascribe uncertainty to systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct Opts {
    /// Output format: text or lines.
    #[arg(long, default_value = "text")]
    format: Format,
    /// Assertion threshold for symbolic systems that do not set one.
    #[arg(long)]
    assert_threshold: Option<f64>,
    /// Resolution depth limit.
    #[arg(long)]
    depth_limit: Option<usize>,
    /// Open evidence interval for the overconfidence audit, as LO,HI.
    #[arg(long, value_parser = parse_window)]
    overconfidence_window: Option<OverconfidenceWindow>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file.
    Run {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Run every bundled scenario.
    Corpus {
        #[command(flatten)]
        opts: Opts,
    },
    /// Check the engines against independent oracles on random inputs.
    Check {
        /// Random cases per suite.
        #[arg(long, default_value_t = 200)]
        cases: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn parse_window(s: &str) -> Result<OverconfidenceWindow, String> {
    let (lo, hi) = s.split_once(',').ok_or("expected LO,HI")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("{e}"))?;
    OverconfidenceWindow::new(lo, hi).map_err(|e| e.to_string())
}

fn run_options(o: &Opts) -> Result<RunOptions, String> {
    if let Some(r) = o.assert_threshold {
        if !(0.0..=1.0).contains(&r) || r.is_nan() {
            return Err(format!("assert threshold {r} is outside [0, 1]"));
        }
    }
    Ok(RunOptions {
        assert_threshold: o.assert_threshold,
        depth_limit: o.depth_limit,
        window: o.overconfidence_window.unwrap_or_default(),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { file, opts } => {
            let ro = match run_options(&opts) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let scenario = match load_scenario(&file) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            match run_scenario(&scenario, &ro) {
                Ok(report) => {
                    print!("{}", report.emit(opts.format));
                    if report.passed() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Corpus { opts } => {
            let ro = match run_options(&opts) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let mut code = 0u8;
            for (_, res) in run_corpus(&ro) {
                match res {
                    Ok(report) => {
                        print!("{}", report.emit(opts.format));
                        if opts.format == Format::Text {
                            println!();
                        }
                        if !report.passed() {
                            code = code.max(1);
                        }
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        code = if e.is_load_error() { 2 } else { code.max(1) };
                    }
                }
            }
            ExitCode::from(code)
        }
        Command::Check { cases, seed } => {
            let results = uncertainty_lab::oracle::run_checks(cases, seed);
            let mut ok = true;
            for r in &results {
                println!("{r}");
                ok &= r.passed();
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}
