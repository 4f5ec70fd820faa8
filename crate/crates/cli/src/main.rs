//! `qmet`: validate spaces, compute quasi-metrics and run property suites.
//!
//! Exit codes: 0 success, 1 usage, 2 domain failure or counterexample,
//! 3 I/O or parse error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qmet_core::checks::Suite;
use qmet_core::ext::parse_rational;
use qmet_core::Rational;

#[derive(Parser, Debug)]
#[command(name = "qmet", version, about = "Exact quasi-metrics on finite spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the quasi-metric axioms of a space file.
    Validate { space: PathBuf },
    /// Distance between two objects on a space.
    Dist {
        #[arg(long, value_enum)]
        kind: DistKind,
        /// Positive rational bound `a`, e.g. `1/2`.
        #[arg(long, value_parser = parse_bound)]
        bound: Option<Rational>,
        space: PathBuf,
        lhs: PathBuf,
        rhs: PathBuf,
    },
    /// Run a seeded property suite.
    Check {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        /// Use this space for every trial instead of random ones.
        #[arg(long)]
        space: Option<PathBuf>,
        #[arg(long, env = "QMET_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        /// Also write the report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DistKind {
    Dkrh,
    DkrhA,
    Dh,
    Dq,
    Dp,
    Fork,
}

fn parse_bound(s: &str) -> Result<Rational, String> {
    let q = parse_rational(s).map_err(|e| e.to_string())?;
    if q <= Rational::from_integer(0.into()) {
        return Err("bound must be positive".into());
    }
    Ok(q)
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Validate { space } => commands::validate(&space),
        Command::Dist {
            kind,
            bound,
            space,
            lhs,
            rhs,
        } => commands::dist(kind, bound.as_ref(), &space, &lhs, &rhs),
        Command::Check {
            suite,
            space,
            seed,
            trials,
            out,
        } => commands::check(suite, space.as_deref(), seed, trials as usize, out.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("qmet: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
