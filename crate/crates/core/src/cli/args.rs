use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::ext_real::parse_ext;

pub(super) fn real(s: &str) -> Result<f64, String> {
    match s.trim() {
        "e" => Ok(std::f64::consts::E),
        t => parse_ext(t).filter(|x| !x.is_nan()).ok_or_else(|| format!("not a number: {s}")),
    }
}

pub(super) fn positive_usize(s: &str) -> Result<usize, String> {
    s.trim().parse::<usize>().ok().filter(|n| *n > 0).ok_or_else(|| format!("not a positive integer: {s}"))
}

/// `start,stop,count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(super) struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

pub(super) fn grid_spec(s: &str) -> Result<GridSpec, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let [a, b, c] = parts.as_slice() else {
        return Err(format!("expected start,stop,count, got {s}"));
    };
    let count = c.trim().parse::<usize>().map_err(|_| format!("bad count: {c}"))?;
    if count == 0 {
        return Err("grid count must be positive".into());
    }
    Ok(GridSpec { start: real(a)?, stop: real(b)?, count })
}

impl GridSpec {
    pub fn linear(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let h = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| if i + 1 == self.count { self.stop } else { self.start + h * i as f64 }).collect()
    }

    pub fn geometric(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let (a, b) = (self.start.ln(), self.stop.ln());
        let h = (b - a) / (self.count - 1) as f64;
        (0..self.count).map(|i| if i + 1 == self.count { self.stop } else { (a + h * i as f64).exp() }).collect()
    }
}

#[derive(Debug, Parser)]
#[command(name = "glscov", version, about = "Grand Lebesgue Space functionals and covariance bounds under mixing")]
pub(super) struct Cli {
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub(super) enum Command {
    /// Evaluate, dualize or build a generating function.
    #[command(allow_negative_numbers = true)]
    Psi(PsiArgs),
    /// Fundamental function phi(delta).
    #[command(allow_negative_numbers = true)]
    Fundamental(FundamentalArgs),
    /// Tail bound P(|xi| > y) from a GLS norm.
    #[command(allow_negative_numbers = true)]
    Tail(TailArgs),
    /// Covariance bound from one theorem.
    #[command(allow_negative_numbers = true)]
    Bound(BoundArgs),
    /// Factorization check of Phi(alpha, beta) on a grid.
    #[command(allow_negative_numbers = true)]
    Factorization(FactorizationArgs),
    /// Randomized finite-space verification campaign.
    #[command(allow_negative_numbers = true)]
    Verify(VerifyArgs),
    /// Summability diagnostics and Sigma(n) for a stationary sequence.
    #[command(allow_negative_numbers = true)]
    Clt(CltArgs),
    /// Random search for near-extremal F = G instances.
    #[command(allow_negative_numbers = true)]
    Sharpness(SharpnessArgs),
}

#[derive(Debug, Args)]
pub(super) struct PsiArgs {
    /// Generating function as inline JSON or a path to a JSON file.
    #[arg(long, conflicts_with = "samples")]
    pub psi: Option<String>,
    /// Build the natural function from samples (one float per line).
    #[arg(long)]
    pub samples: Option<PathBuf>,
    /// Bootstrap seed for the sample moment table.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Replace psi by its dual psi(p/(p-1)).
    #[arg(long)]
    pub dual: bool,
    /// Replace psi by the product psi(p) nu(p/(p-1)).
    #[arg(long)]
    pub zeta_with: Option<String>,
    /// Exponents at which to evaluate.
    #[arg(long, value_parser = real, value_delimiter = ',')]
    pub p_grid: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub(super) struct FundamentalArgs {
    #[arg(long)]
    pub psi: String,
    #[arg(long, value_parser = real, required_unless_present = "delta_grid")]
    pub delta: Option<f64>,
    /// Geometric grid `start,stop,count`; output is CSV.
    #[arg(long, value_parser = grid_spec, conflicts_with = "delta")]
    pub delta_grid: Option<GridSpec>,
    #[arg(long, value_parser = real)]
    pub trunc_low: Option<f64>,
}

#[derive(Debug, Args)]
pub(super) struct TailArgs {
    #[arg(long)]
    pub psi: String,
    #[arg(long, value_parser = real, default_value = "1")]
    pub norm: f64,
    /// Linear grid `start,stop,count`; `e` is Euler's number.
    #[arg(long, value_parser = grid_spec)]
    pub y_grid: GridSpec,
    /// Add the empirical tail of these samples.
    #[arg(long)]
    pub samples: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(super) enum TheoremArg {
    Davydov,
    Ibragimov,
    Holder,
    GlsStrong,
    GlsDualPair,
    GlsUniform,
    GlsIdentical,
    #[value(name = "example-5.1")]
    Example51,
    #[value(name = "example-5.2")]
    Example52,
    #[value(name = "example-5.3")]
    Example53,
    #[value(name = "example-5.4")]
    Example54,
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(super) enum KernelArg {
    Davydov,
    Ibragimov,
    Holder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(super) enum DomainArg {
    Triangle,
    Rectangle,
    ConjugateLine,
}

#[derive(Debug, Args)]
pub(super) struct BoundArgs {
    #[arg(long, value_enum)]
    pub theorem: TheoremArg,
    #[arg(long)]
    pub psi: Option<String>,
    #[arg(long)]
    pub nu: Option<String>,
    #[arg(long, value_parser = real)]
    pub alpha: Option<f64>,
    #[arg(long, value_parser = real)]
    pub beta: Option<f64>,
    #[arg(long, value_parser = real)]
    pub p: Option<f64>,
    #[arg(long, value_parser = real)]
    pub q: Option<f64>,
    #[arg(long, value_parser = real, default_value = "1")]
    pub norm_xi: f64,
    #[arg(long, value_parser = real, default_value = "1")]
    pub norm_eta: f64,
    /// Truncation exponent for example-5.4.
    #[arg(long, value_parser = real)]
    pub q0: Option<f64>,
    /// Kernel for the generic bound.
    #[arg(long, value_enum)]
    pub kernel: Option<KernelArg>,
    /// Exponent domain for the generic bound.
    #[arg(long, value_enum, default_value = "triangle")]
    pub domain: DomainArg,
    /// Use only the grid route for gls-uniform.
    #[arg(long)]
    pub fast: bool,
}

#[derive(Debug, Args)]
pub(super) struct FactorizationArgs {
    #[arg(long)]
    pub psi: String,
    #[arg(long)]
    pub nu: String,
    #[arg(long, value_parser = real, value_delimiter = ',')]
    pub alpha_grid: Vec<f64>,
    #[arg(long, value_parser = real, value_delimiter = ',')]
    pub beta_grid: Vec<f64>,
}

#[derive(Debug, Args)]
pub(super) struct VerifyArgs {
    #[arg(long, default_value_t = 1000)]
    pub instances: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub max_atoms: usize,
    #[arg(long, default_value_t = 4)]
    pub max_blocks: usize,
    /// JSON array of generating functions (inline or path).
    #[arg(long)]
    pub psi_set: Option<String>,
    #[arg(long, value_parser = real, value_delimiter = ',')]
    pub p_grid: Option<Vec<f64>>,
    /// Only test (psi, psi) pairs.
    #[arg(long)]
    pub no_cross_pairs: bool,
    /// Per-instance CSV `alpha,beta,cov,tightest_bound,slack`.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub(super) struct CltArgs {
    /// SequenceModel JSON (inline or path).
    #[arg(long)]
    pub model: String,
    /// Generating function of gamma(0); defaults to the model's natural function.
    #[arg(long)]
    pub psi: Option<String>,
    /// Mixing profile JSON; required for user samples.
    #[arg(long)]
    pub profile: Option<String>,
    #[arg(long = "K", visible_alias = "k-max", default_value_t = 10_000)]
    pub k_max: usize,
    #[arg(long, value_parser = positive_usize, value_delimiter = ',', default_value = "100,1000,10000")]
    pub n_grid: Vec<usize>,
    #[arg(long, default_value_t = 2000)]
    pub reps: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Skip the Monte Carlo variance table.
    #[arg(long)]
    pub no_sigma: bool,
}

#[derive(Debug, Args)]
pub(super) struct SharpnessArgs {
    #[arg(long, value_parser = real, default_value = "4")]
    pub p: f64,
    #[arg(long, value_parser = real, default_value = "4")]
    pub q: f64,
    #[arg(long, default_value_t = 10_000)]
    pub budget: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub max_atoms: usize,
    #[arg(long, default_value_t = 4)]
    pub max_blocks: usize,
}
