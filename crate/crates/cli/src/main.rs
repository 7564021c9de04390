//! `hall`: batch front end for the hall-core verification engine.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hall_core::functor::{NTerm, VUnit};
use hall_core::{ClassKey, HallError};

use report::Format;

#[derive(Parser, Debug)]
#[command(name = "hall", version, about = "Hall algebras of quivers over finite fields: enumeration and exact identity checks")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Preset quiver: a2, a3, kronecker, jordan, d4
    #[arg(long, global = true, conflicts_with = "quiver_file")]
    pub quiver: Option<String>,
    /// Quiver as JSON: {"vertices": ["1", "2"], "arrows": [{"src": "1", "tgt": "2"}]}
    #[arg(long, global = true, value_name = "PATH")]
    pub quiver_file: Option<PathBuf>,
    /// Field size (a prime power)
    #[arg(long, global = true, default_value_t = 2)]
    pub q: u64,
    /// Largest representation space enumerated per dimension vector
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: Option<u64>,
    /// Directory for cached isomorphism-class tables
    #[arg(long, global = true, env = "HALL_CACHE_DIR", value_name = "DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Report format; defaults to json for an --out path ending in .json, tsv otherwise
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Run sweeps on one thread
    #[arg(long, global = true)]
    pub sequential: bool,
}

impl Global {
    pub fn output_format(&self) -> Format {
        self.format.unwrap_or_else(|| match &self.out {
            Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) => Format::Json,
            _ => Format::Tsv,
        })
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the isomorphism-class table of one dimension vector
    Enumerate {
        #[arg(long)]
        dim: String,
    },
    /// Product u_x * u_y, or the coproduct of u_x when --y is absent
    Hall {
        #[arg(long)]
        x: ClassArg,
        #[arg(long)]
        y: Option<ClassArg>,
    },
    /// Green's formula on every class quadruple up to a total dimension
    Green {
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        max_dim: u32,
    },
    /// Quantum Serre relations for every ordered pair of loop-free vertices
    Serre,
    /// Restriction of induction against the sum of shifted induced restrictions
    Theorem(TheoremArgs),
    /// Random check of the shift identity M - 2K = N - (a2,b1)
    Shifts {
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Largest dimension-vector entry drawn
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
        max_entry: u32,
        #[arg(long, value_enum, default_value_t = NTermArg::Balanced)]
        n_term: NTermArg,
    },
    /// Multiplicativity of the coproduct under both twist signs
    Bialgebra {
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        max_dim: u32,
        /// Restrict to the single pair (x, y)
        #[arg(long, requires = "y")]
        x: Option<ClassArg>,
        #[arg(long, requires = "x")]
        y: Option<ClassArg>,
    },
}

#[derive(Args, Debug)]
pub struct TheoremArgs {
    /// Dimension of A; with --beta, --alphap and --betap checks every class pair of these dimensions
    #[arg(long, requires_all = ["beta", "alphap", "betap"])]
    pub alpha: Option<String>,
    #[arg(long, requires = "alpha")]
    pub beta: Option<String>,
    #[arg(long, requires = "alpha")]
    pub alphap: Option<String>,
    #[arg(long, requires = "alpha")]
    pub betap: Option<String>,
    /// Without explicit dimensions, sweep every instance with |gamma| up to this bound
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_dim: u32,
    /// Fix the unit instead of using the first surviving candidate
    #[arg(long, value_parser = parse_v_unit)]
    pub v_unit: Option<VUnit>,
}

/// A class key `DIM:ID`, e.g. `1,1:0`.
#[derive(Clone, Debug)]
pub struct ClassArg(pub ClassKey);

impl std::str::FromStr for ClassArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.parse::<ClassKey>().map(ClassArg).map_err(|e| e.to_string())
    }
}

fn parse_v_unit(s: &str) -> Result<VUnit, String> {
    s.parse().map_err(|e: HallError| e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NTermArg {
    Balanced,
    Printed,
}

impl From<NTermArg> for NTerm {
    fn from(n: NTermArg) -> Self {
        match n {
            NTermArg::Balanced => NTerm::Balanced,
            NTermArg::Printed => NTerm::Printed,
        }
    }
}

pub const EXIT_PASS: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS });
        }
    };
    match commands::run(&cli) {
        Ok(report) => {
            if let Err(e) = report.emit(cli.global.output_format(), cli.global.out.as_deref()) {
                eprintln!("error: cannot write report: {e}");
                return ExitCode::from(EXIT_USAGE);
            }
            if report.passed {
                ExitCode::from(EXIT_PASS)
            } else {
                eprintln!("check failed");
                ExitCode::from(EXIT_CHECK_FAILED)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

/// Convention failures are check failures; everything else is bad input.
fn exit_code_for(e: &HallError) -> u8 {
    match e {
        HallError::NoConsistentConvention(_) => EXIT_CHECK_FAILED,
        _ => EXIT_USAGE,
    }
}
