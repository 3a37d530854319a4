use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// vMF-SNE: stochastic neighbour embedding of spherical data onto a sphere.
#[derive(Debug, Parser)]
#[command(name = "sphere-sne", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate clustered unit vectors (vMF clusters around sign-flipped centres).
    Gen(GenArgs),
    /// Embed a dataset with vMF-SNE or the t-SNE baseline.
    Embed(EmbedArgs),
    /// Score an embedding against the true labels.
    Eval(EvalArgs),
    /// Draw an embedding as an SVG scatter plot.
    Plot(PlotArgs),
    /// Run the entropy/accuracy grid over cluster counts, concentrations and methods.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Vmf,
    Tsne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeometryArg {
    /// Spherical when every row is unit norm, planar otherwise.
    Auto,
    Spherical,
    Planar,
}

#[derive(Debug, Args)]
pub struct SeedArg {
    /// Random seed; falls back to $SPHERE_SNE_SEED, then 0.
    #[arg(long, env = "SPHERE_SNE_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Ambient dimension.
    #[arg(long, default_value_t = 50)]
    pub dim: usize,
    #[arg(long, default_value_t = 4)]
    pub clusters: usize,
    /// Total number of points.
    #[arg(long, default_value_t = 800)]
    pub n: usize,
    /// Sampling concentration of every cluster.
    #[arg(long, default_value_t = 10.0)]
    pub kappa: f64,
    /// Largest allowed dot product between two centres.
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub min_separation: f64,
    #[command(flatten)]
    pub seed: SeedArg,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Record wall-clock time in the manifest (makes it non-reproducible).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Vmf)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 40.0)]
    pub perplexity: f64,
    /// Shared concentration in the embedding space (vmf only).
    #[arg(long, default_value_t = 2.0)]
    pub embed_kappa: f64,
    /// Embedding dimension [default: 3 for vmf, 2 for tsne].
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub iterations: usize,
    /// Step size [default: 0.5 for vmf, 200 for tsne].
    #[arg(long)]
    pub learning_rate: Option<f64>,
    /// Stop a vmf run once the loss has been flat for 50 iterations.
    #[arg(long)]
    pub early_stop: bool,
    #[command(flatten)]
    pub seed: SeedArg,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub embedding: PathBuf,
    /// Labelled dataset the embedding was computed from.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum, default_value_t = GeometryArg::Auto)]
    pub geometry: GeometryArg,
    /// JSON report path; printed to stdout when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub embedding: PathBuf,
    /// Labelled dataset used for colours; labels in the embedding file are used otherwise.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [4usize, 16])]
    pub clusters: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [10.0f64, 20.0, 30.0, 40.0])]
    pub kappas: Vec<f64>,
    #[arg(long, default_value_t = 5)]
    pub replicates: usize,
    #[arg(long, default_value_t = 50)]
    pub dim: usize,
    #[arg(long, default_value_t = 800)]
    pub n: usize,
    #[arg(long, default_value_t = 40.0)]
    pub perplexity: f64,
    #[arg(long, default_value_t = 2.0)]
    pub embed_kappa: f64,
    /// vmf iterations.
    #[arg(long, default_value_t = 1000)]
    pub iterations: usize,
    #[arg(long, default_value_t = sphere_sne::bench::BENCH_VMF_LEARNING_RATE)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 1000)]
    pub tsne_iterations: usize,
    #[command(flatten)]
    pub seed: SeedArg,
    /// JSON results; the text table goes to stdout and `<output>.txt`.
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long)]
    pub timing: bool,
}
