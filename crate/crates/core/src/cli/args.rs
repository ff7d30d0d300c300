use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use dldl::HyperParams;

#[derive(Debug, Parser)]
#[command(name = "dldl", version, about = "Dictionary learning with dynamic soft labels on a kNN hypergraph")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Learn a model from features and (partial) labels.
    Train(TrainArgs),
    /// Classify samples with a trained model.
    Predict(PredictArgs),
    /// Score a predictions file against ground-truth labels.
    Eval(EvalArgs),
    /// Compare dynamic soft labels with fixed one-hot labels over several seeds.
    Ablate(AblateArgs),
    /// Summarise the kNN hypergraph built over a feature file.
    InspectHypergraph(InspectArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Number of dictionary atoms.
    #[arg(long, default_value_t = 200)]
    pub dict_size: usize,
    /// Neighbours per hyperedge.
    #[arg(long, default_value_t = 10)]
    pub knn: usize,
    /// Sparsity weight.
    #[arg(long, default_value_t = 0.0625)]
    pub alpha: f64,
    /// Label-term weight.
    #[arg(long, default_value_t = 0.0625)]
    pub beta: f64,
    /// Code-smoothness weight.
    #[arg(long, default_value_t = 4.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    /// Relative objective decrease that ends training.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl SolverArgs {
    pub fn hyperparams(&self) -> HyperParams {
        HyperParams {
            alpha: self.alpha,
            beta: self.beta,
            delta_w: self.delta,
            dict_size: self.dict_size,
            knn: self.knn,
            max_iter: self.max_iter,
            rel_tol: self.tol,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Comma-separated features, one sample per row.
    #[arg(long)]
    pub features: PathBuf,
    /// `index,label` lines; samples not listed are unlabeled.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Number of classes (required when no sample is labeled).
    #[arg(long)]
    pub classes: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Where to write the trained model.
    #[arg(long)]
    pub model: PathBuf,
    /// Run log (one loss value per line); defaults to `<model>.log`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Samples to classify (not needed with --transductive).
    #[arg(long)]
    pub features: Option<PathBuf>,
    /// Predictions file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Classify the unlabeled training samples stored in the model.
    #[arg(long)]
    pub transductive: bool,
    /// Append per-class scores to every line.
    #[arg(long)]
    pub scores: bool,
    /// Sparsity weight for test-time encoding (defaults to the training alpha).
    #[arg(long)]
    pub test_alpha: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Predictions file written by `predict`.
    #[arg(long)]
    pub predictions: PathBuf,
    /// Ground truth as `index,label` lines.
    #[arg(long)]
    pub labels: PathBuf,
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Ground truth for every sample, as `index,label` lines.
    #[arg(long)]
    pub truth: PathBuf,
    /// Number of seeds, starting at --seed.
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
    /// Plot data: `seed,dldl_acc,fixed_acc` per line.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub knn: usize,
    /// Also report the extreme Laplacian eigenvalues (cubic in N).
    #[arg(long)]
    pub eigenvalues: bool,
}
