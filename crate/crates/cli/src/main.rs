//! `critgap`: gap probabilities, kernels, identity checks and Monte Carlo
//! for the critical product-matrix process.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use critgap::contour::Resolution;
use critgap::fredholm::Route;
use critgap::validate::Group;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "critgap",
    version,
    about = "Gap probability of the critical product-matrix process"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "CRITGAP_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Kernel values on an (x, y) grid.
    Kernel(KernelArgs),
    /// Gap probability P(a) by each route, with u(a) and its asymptotics.
    Gap(GapArgs),
    /// Run the identity suite and emit a JSON report.
    Validate(ValidateArgs),
    /// Monte Carlo of the rightmost log-eigenvalue of Ginibre products.
    Mc(McArgs),
}

/// Discretization preset: `coarse`, `default`, `fine`, or `PANELSxORDER`.
#[derive(Clone, Copy, Debug, Serialize)]
#[serde(transparent)]
pub struct ResolutionArg(pub Resolution);

impl FromStr for ResolutionArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let base = Resolution::default();
        let res = match s {
            "default" => base,
            "coarse" => base.coarse(),
            "fine" => base.refined(),
            _ => {
                let (p, o) = s
                    .split_once('x')
                    .ok_or_else(|| format!("expected coarse, default, fine or PANELSxORDER, got '{s}'"))?;
                let panels: usize = p.parse().map_err(|e| format!("panels '{p}': {e}"))?;
                let order: usize = o.parse().map_err(|e| format!("order '{o}': {e}"))?;
                if !(2..=256).contains(&panels) || !(2..=64).contains(&order) {
                    return Err(format!(
                        "panels in [2, 256] and order in [2, 64] required, got {panels}x{order}"
                    ));
                }
                Resolution {
                    panels,
                    order,
                    halfline_panels: (panels / 2).max(2),
                    halfline_order: order,
                    ..base
                }
            }
        };
        Ok(ResolutionArg(res))
    }
}

/// `lo:hi:n`, `n` equally spaced points.
#[derive(Clone, Debug, Serialize)]
pub struct GridArg(pub Vec<f64>);

impl FromStr for GridArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts[..] else {
            return Err(format!("expected lo:hi:n, got '{s}'"));
        };
        let lo: f64 = lo.parse().map_err(|e| format!("lo '{lo}': {e}"))?;
        let hi: f64 = hi.parse().map_err(|e| format!("hi '{hi}': {e}"))?;
        let n: usize = n.parse().map_err(|e| format!("n '{n}': {e}"))?;
        if n == 0 || !lo.is_finite() || !hi.is_finite() || (n > 1 && hi < lo) {
            return Err(format!("need n >= 1 and finite lo <= hi, got '{s}'"));
        }
        Ok(GridArg(output::linspace(lo, hi, n)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct KernelArgs {
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Comma-separated x values.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub x: Vec<f64>,
    /// Comma-separated y values.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub y: Vec<f64>,
    /// `lo:hi:n`, used for both x and y (overrides --x and --y).
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<GridArg>,
    /// Finite-N kernel for a product of M Ginibre matrices of size N.
    #[arg(long, num_args = 2, value_names = ["N", "M"])]
    pub finite: Option<Vec<usize>>,
    /// Shift x and y by the centering constant a_N (finite kernel only).
    #[arg(long, requires = "finite")]
    pub centered: bool,
    #[arg(long, default_value = "default")]
    #[serde(skip)]
    pub resolution: ResolutionArg,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct GapArgs {
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub a_min: f64,
    #[arg(long, default_value_t = 4.0)]
    pub a_max: f64,
    #[arg(long, default_value_t = 7)]
    pub steps: usize,
    /// Comma-separated routes: halfline, contour-Q, contour-H.
    #[arg(long, value_delimiter = ',', default_value = "halfline,contour-Q,contour-H")]
    pub routes: Vec<Route>,
    #[arg(long, default_value = "default")]
    #[serde(skip)]
    pub resolution: ResolutionArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Fault {
    /// Flip the sign of the contour-Q off-diagonal block.
    QaSign,
}

#[derive(Args, Debug, Serialize)]
pub struct ValidateArgs {
    /// Comma-separated groups (default: all).
    #[arg(long, value_delimiter = ',', value_parser = parse_group)]
    pub groups: Vec<Group>,
    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<Fault>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_group(s: &str) -> Result<Group, String> {
    Group::parse(s).ok_or_else(|| {
        let names: Vec<&str> = Group::ALL.iter().map(|g| g.name()).collect();
        format!("unknown group '{s}' (expected one of {})", names.join(", "))
    })
}

#[derive(Args, Debug, Serialize)]
pub struct McArgs {
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long = "M")]
    pub m: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Compare the empirical P(a) with the theory at alpha = M/N.
    #[arg(long)]
    pub compare: bool,
    /// Comparison points.
    #[arg(long = "a", value_delimiter = ',', default_value = "1,2,3")]
    pub a: Vec<f64>,
    #[arg(long, default_value = "default")]
    #[serde(skip)]
    pub resolution: ResolutionArg,
    /// Samples CSV (the JSON summary goes to stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let threads = rayon::current_num_threads();
    let result = match &cli.command {
        Command::Kernel(a) => commands::kernel(a, threads),
        Command::Gap(a) => commands::gap(a, threads),
        Command::Validate(a) => commands::validate(a, threads),
        Command::Mc(a) => commands::mc(a, threads),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
