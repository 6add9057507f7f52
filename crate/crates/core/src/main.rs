use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use confmod::cli::{run, Suite, SuiteConfig};
use confmod::error::Error;

/// Runs the conformal-group, modular-calculus and lattice verification suites.
#[derive(Debug, Parser)]
#[command(name = "confmod", version)]
struct Args {
    /// group, flows, modular, bw, duality, pct or all
    #[arg(long, default_value = "all")]
    suite: String,

    /// Spacetime dimensions, comma separated
    #[arg(long = "d", value_delimiter = ',', default_value = "2,3,4")]
    dims: Vec<usize>,

    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Lattice sizes for the chiral suites, comma separated
    #[arg(long, value_delimiter = ',', default_value = "64,128,256")]
    sizes: Vec<usize>,

    /// Tolerance override, repeatable
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,

    /// Report path; the report goes to stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,

    /// Defect-vs-L CSV path
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn config(args: &Args) -> Result<SuiteConfig, Error> {
    let mut cfg = SuiteConfig {
        suite: args.suite.parse::<Suite>()?,
        dims: args.dims.clone(),
        seed: args.seed,
        sizes: args.sizes.clone(),
        out: args.out.clone(),
        csv: args.csv.clone(),
        ..SuiteConfig::default()
    };
    cfg.apply_overrides(&args.tol)?;
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(2);
        }
    };
    let cfg = match config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    let report = match run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if cfg.out.is_none() {
        match report.to_json() {
            Ok(s) => print!("{s}"),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
    }
    let s = report.summary;
    eprintln!("{} passed, {} failed, {} skipped in {:.2} s", s.pass, s.fail, s.skip, report.wall_clock_seconds);
    if report.failed() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
