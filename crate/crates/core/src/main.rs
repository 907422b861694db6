use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kfermion::error::Error;
use kfermion::harness::{
    default_output_path, emit_table, export_matrices, parse_k_list, parse_real_list, parse_suites, render_report,
    run_suites, write_output, OutputFormat, RunConfig, TableKind, OUTPUT_DIR_ENV,
};

const EXIT_FAILED_CHECKS: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "kfermion", version, about = "Verify the k-fermion quon algebra identities")]
#[command(after_help = format!("Without --out, files go to ${OUTPUT_DIR_ENV} (or the working directory)."))]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suites and report every check.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated suites: fockrep, grassmann, coherent, phase, symmetry, all.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Report format: json, csv or text.
        #[arg(long, default_value = "json")]
        format: String,
        /// Output file; printed to stdout when neither this nor the output
        /// directory variable is set.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write one of the CSV tables: coherence, limits or residuals.
    Table {
        kind: String,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump every constructed operator for one k as JSON.
    ExportMatrices {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        theta0: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// k values, e.g. "2,3,4" or "3..8".
    #[arg(long, default_value = "2..8")]
    k: String,
    /// Reference angle of the phase states, in radians.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    theta0: f64,
    /// Tolerance for identity residuals.
    #[arg(long, default_value_t = kfermion::qcore::DEFAULT_TOL)]
    tol: f64,
    /// Strictly decreasing epsilon schedule for the Q -> q limits.
    #[arg(long, default_value = "1e-2,1e-3,1e-4,1e-5")]
    eps: String,
    /// Highest Fock level probed by the supercoherent limit oracle.
    #[arg(long, default_value_t = kfermion::harness::DEFAULT_N_MAX)]
    n_max: usize,
    /// Bosonic truncation of the supercoherent state.
    #[arg(long, default_value_t = kfermion::coherent::DEFAULT_R_MAX)]
    r_max: usize,
    /// Admit k up to 64 with tolerance at least 1e-6.
    #[arg(long)]
    extended: bool,
}

impl RunArgs {
    fn into_config(self) -> Result<RunConfig, Error> {
        let cfg = RunConfig {
            k_list: parse_k_list(&self.k)?,
            theta0: self.theta0,
            tol: self.tol,
            n_max: self.n_max,
            r_max: self.r_max,
            eps_schedule: parse_real_list(&self.eps)?,
            extended: self.extended,
            ..RunConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io { .. } => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Verify { run, suite, format, out } => {
            let mut cfg = run.into_config()?;
            cfg.suites = parse_suites(&suite)?;
            cfg.output_format = format.parse::<OutputFormat>()?;
            let out = out.or_else(|| {
                std::env::var_os(OUTPUT_DIR_ENV)
                    .map(|_| default_output_path(&format!("report.{}", cfg.output_format.extension())))
            });
            cfg.output_path = out.clone();
            let report = run_suites(&cfg)?;
            let text = render_report(&report, &cfg)?;
            match out {
                Some(path) => {
                    write_output(&text, &path)?;
                    let s = report.summary();
                    eprintln!("{} checks, {} passed, {} failed -> {}", s.total, s.passed, s.failed, path.display());
                }
                None => print!("{text}"),
            }
            Ok(if report.all_passed() { 0 } else { EXIT_FAILED_CHECKS })
        }
        Command::Table { kind, run, out } => {
            let kind = kind.parse::<TableKind>()?;
            let mut cfg = run.into_config()?;
            cfg.output_path = out;
            let path = emit_table(kind, &cfg)?;
            eprintln!("wrote {}", path.display());
            Ok(0)
        }
        Command::ExportMatrices { k, theta0, out } => {
            let path = out.unwrap_or_else(|| default_output_path(&format!("matrices_k{k}.json")));
            export_matrices(k, theta0, &path)?;
            eprintln!("wrote {}", path.display());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
