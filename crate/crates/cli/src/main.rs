mod commands;
mod render;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ramify::classify::{GroupKind, SubgroupChoice};
use ramify::field::{FieldSpec, GaloisField};
use ramify::Error;

/// Ramification breaks of nonabelian degree-p^3 extensions of F_q((t)).
///
/// Series are written in t with coefficients in F_q, where g is the
/// generator of F_q over F_p, e.g. "t^-5 + 2*t^-1", "(g + 1)*t^-3 + O(t^4)".
#[derive(Parser, Debug)]
#[command(name = "ramify", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Upper and lower ramification breaks of one extension.
    Classify(ClassifyArgs),
    /// Reduce an Artin-Schreier generator over K, or an element of L = K(y) modulo ℘(L) + K.
    Reduce(ReduceArgs),
    /// Split β₂ over powers of β₁ and report the derived parameters.
    Decompose(DecomposeArgs),
    /// Classify random instances over a grid of (u₁, u₂) and tabulate the results.
    Sweep(SweepArgs),
    /// Compare closed forms against the elimination oracle on random instances.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug, Clone)]
struct FieldArgs {
    /// Characteristic.
    #[arg(short = 'p', long = "prime")]
    p: u32,
    /// Degree of F_q over F_p.
    #[arg(short = 'f', long = "degree", default_value_t = 1)]
    f: u32,
    /// Monic irreducible modulus, comma-separated coefficients from degree 0 up.
    #[arg(long, value_delimiter = ',')]
    modulus: Option<Vec<u32>>,
}

impl FieldArgs {
    fn field(&self) -> Result<GaloisField, Error> {
        let spec = match &self.modulus {
            Some(m) => FieldSpec::new(self.p, self.f, m.clone())?,
            None => FieldSpec::with_default_modulus(self.p, self.f)?,
        };
        Ok(GaloisField::new(spec))
    }
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, value_enum, default_value_t = Output::Json)]
    output: Output,
    /// Absolute precision for series written without an O(t^N) term.
    #[arg(long, env = "RAMIFY_PRECISION", default_value_t = 2, allow_hyphen_values = true)]
    precision: i64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Output {
    Json,
    Csv,
    Table,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    group: GroupKind,
    #[arg(long, allow_hyphen_values = true)]
    beta1: String,
    #[arg(long, allow_hyphen_values = true)]
    beta2: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    kappa3: String,
    /// Subgroup playing G_{l₂} when u₁ < u₂ (D8 and Mod only).
    #[arg(long, default_value = "sigma1p-sigma2")]
    choice: SubgroupChoice,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    #[command(flatten)]
    common: Common,
    /// Element of K to reduce modulo K^℘.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["beta", "ell"])]
    kappa: Option<String>,
    /// Generator of L = K(y), y^p - y = β; enables --ell.
    #[arg(long, allow_hyphen_values = true, requires = "ell")]
    beta: Option<String>,
    /// Coefficient of y^i in the element of L, repeated for i = 0, 1, ...
    #[arg(long, allow_hyphen_values = true, requires = "beta")]
    ell: Vec<String>,
    /// Fixed elimination window; by default it is chosen and widened automatically.
    #[arg(long)]
    window: Option<i64>,
}

#[derive(Args, Debug)]
struct DecomposeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, allow_hyphen_values = true)]
    beta1: String,
    #[arg(long, allow_hyphen_values = true)]
    beta2: String,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Restrict to one group; by default every group valid for p.
    #[arg(long)]
    group: Option<GroupKind>,
    /// Largest u₂ in the grid.
    #[arg(long, default_value_t = 9)]
    max_break: i64,
    /// Random instances per grid cell.
    #[arg(long, default_value_t = 1)]
    samples: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct SelftestArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest u₂ of the random instances.
    #[arg(long, default_value_t = 25)]
    max_break: i64,
}

/// A command failure: usage errors exit 2, mathematical errors exit 1.
pub enum Failure {
    Usage(Error),
    Math(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::InvalidField(_) => Failure::Usage(e),
            other => Failure::Math(other),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, output, outcome) = match &cli.command {
        Command::Classify(a) => ("classify", a.common.output, commands::classify(a)),
        Command::Reduce(a) => ("reduce", a.common.output, commands::reduce(a)),
        Command::Decompose(a) => ("decompose", a.common.output, commands::decompose(a)),
        Command::Sweep(a) => ("sweep", a.common.output, commands::sweep(a)),
        Command::Selftest(a) => ("selftest", a.common.output, commands::selftest(a)),
    };
    match outcome {
        Ok(doc) => {
            // A closed pipe (`ramify sweep | head`) is not an error worth reporting.
            let _ = std::io::stdout().lock().write_all(doc.render(output).as_bytes());
            if doc.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(failure) => {
            let (code, err) = match failure {
                Failure::Usage(e) => (2, e),
                Failure::Math(e) => (1, e),
            };
            let _ = writeln!(std::io::stdout().lock(), "{}", render::error_document(name, &err));
            eprintln!("error: {err}");
            ExitCode::from(code)
        }
    }
}
