use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "densekatz", version, about = "Katz and eigenvector centrality of dense graphs through their complements")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Katz centrality by the direct, complement or automatic route.
    Katz(KatzArgs),
    /// Eigenvector centrality by power iteration or a resolvent solve on the complement.
    Eig(EigArgs),
    /// Write the complement adjacency as Matrix Market.
    Complement(ComplementArgs),
    /// Drop the small entries of a weighted complement.
    Threshold(ThresholdArgs),
    /// Evaluate the certificates for exact ranking recovery from a thresholded complement.
    Check(CheckArgs),
    /// Compare the rankings of the direct, complement and thresholded routes.
    Compare(CompareArgs),
    /// Mean and minimum Kendall tau over random dense weighted instances.
    ExperimentRandom(ExperimentRandomArgs),
    /// Sparsity and certificates of one random instance for several thresholds.
    ExperimentSufficiency(ExperimentSufficiencyArgs),
    /// Time the direct route against the complement route.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    /// Matrix Market coordinate file.
    Mtx,
    /// `u<TAB>v[<TAB>weight]` lines with 0-based ids.
    Tsv,
    /// Dense correlation matrix, thresholded with `--eta`.
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Loops {
    With,
    Without,
}

/// Graph class of a complement given on input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ComplementOf {
    #[value(alias = "with")]
    Loops,
    #[value(alias = "without")]
    Loopless,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    Direct,
    Complement,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EigMethod {
    Power,
    Resolvent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormatArg {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Synthetic {
    /// Complement of `floor(5n/2)` random edges.
    Dense,
    /// `floor(5n/2)` random edges.
    Sparse,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,
    /// Defaults to the file extension.
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    #[arg(long, value_enum, default_value = "without")]
    pub loops: Loops,
    #[arg(long)]
    pub weighted: bool,
    /// Treat an edge list as directed.
    #[arg(long)]
    pub directed: bool,
    /// Correlation threshold for CSV input.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub eta: f64,
    /// Threshold `|C_ij|` instead of `C_ij`.
    #[arg(long)]
    pub absolute: bool,
    /// Keep `C_ij >= eta` rather than `C_ij > eta`.
    #[arg(long)]
    pub inclusive: bool,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ParamArgs {
    /// Katz parameter.
    #[arg(long)]
    pub t: Option<f64>,
    /// Katz parameter as a fraction of `1/rho(A)`.
    #[arg(long)]
    pub t_frac: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Defaults to standard output.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub output_format: OutputFormatArg,
}

#[derive(Debug, Args)]
pub struct KatzArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub param: ParamArgs,
    #[arg(long, value_enum, default_value = "auto")]
    pub route: RouteArg,
    /// The input is the complement of an unweighted graph of this class.
    #[arg(long, value_enum)]
    pub complement_of: Option<ComplementOf>,
    /// Report complement-route scores on the scale of the direct route.
    #[arg(long)]
    pub rescale: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EigArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, value_enum, default_value = "power")]
    pub method: EigMethod,
    #[arg(long, value_enum)]
    pub complement_of: Option<ComplementOf>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iter: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ComplementArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub param: ParamArgs,
    #[arg(long)]
    pub epsilon: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub param: ParamArgs,
    /// Thresholds for the weighted sweep; repeat or separate with commas.
    #[arg(long, value_delimiter = ',')]
    pub epsilon: Vec<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ExperimentRandomArgs {
    /// Exponent of the entries; instances have `3n` nodes.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.5)]
    pub t_frac: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ExperimentSufficiencyArgs {
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub seed: u64,
    /// Exponents `k` of the rules `epsilon = (3n)^-k`.
    #[arg(long, value_delimiter = ',', default_values_t = [1u32, 2, 3, 4])]
    pub powers: Vec<u32>,
    /// Extra fixed thresholds checked after the power rules.
    #[arg(long, value_delimiter = ',')]
    pub epsilon: Vec<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub t_frac: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_name = "PATH", conflicts_with = "synthetic")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, requires = "input")]
    pub format: Option<InputFormat>,
    #[arg(long, value_enum, default_value = "without")]
    pub loops: Loops,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub eta: f64,
    #[arg(long, value_enum, default_value = "dense")]
    pub synthetic: Synthetic,
    /// Node count of the synthetic graph.
    #[arg(long, default_value_t = 995)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    /// Skip dense-storage timings above this order.
    #[arg(long, default_value_t = 2000)]
    pub dense_max_n: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}
