//! `bperc`: train, query and benchmark a single Bayesian neuron.

mod parse;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bayesian_perceptron::experiments::{
    self, metrics, ClassificationConfig, GroundTruthConfig, RegressionConfig,
};
use bayesian_perceptron::{BayesianPerceptron, Error, Perceptron};
use clap::{Args, Parser, Subcommand};

use crate::parse::{finite_f64, parse_activation, parse_vector, read_training_csv};

#[derive(Debug, Parser)]
#[command(
    name = "bperc",
    version,
    about = "Bayesian perceptron with closed-form moment matching"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train on a CSV with columns x1..xd,y and write a model file.
    Train(TrainArgs),
    /// Forward pass for one input.
    Predict(PredictArgs),
    /// Reproduce one of the bundled experiments: ground-truth, classification, regression.
    Experiment(ExperimentArgs),
    /// Print a summary of a model file.
    Inspect(InspectArgs),
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    /// sigmoid | relu | linear | leaky:<slope> | pwl:<alpha>,<beta>
    #[arg(long, default_value = "sigmoid")]
    activation: String,
    #[arg(long, default_value_t = bayesian_perceptron::DEFAULT_EPSILON, value_parser = finite_f64)]
    epsilon: f64,
    /// Scalar (broadcast) or comma-separated vector; includes the bias weight first unless --no-bias.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    prior_mean: String,
    #[arg(long, default_value_t = 1.0, value_parser = finite_f64)]
    prior_var: f64,
    #[arg(long)]
    no_bias: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    /// Comma-separated input values.
    #[arg(long, allow_hyphen_values = true)]
    input: String,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    name: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random trials (ignored by ground-truth, which sweeps a fixed grid).
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Noise variance of the likelihood.
    #[arg(long, default_value_t = 0.01, value_parser = finite_f64)]
    epsilon: f64,
    /// Training points per trial (classification: 25, regression: 20).
    #[arg(long)]
    n: Option<usize>,
    /// Learning rate of the gradient baseline (regression).
    #[arg(long, default_value_t = 0.05, value_parser = finite_f64)]
    learning_rate: f64,
    /// Write zero timings so repeated runs give identical CSVs (regression).
    #[arg(long)]
    no_timing: bool,
    /// Also write predictive bands (regression) or the variance field (classification).
    #[arg(long)]
    extra_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct InspectArgs {
    #[arg(long)]
    model: PathBuf,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Self::new(2, format!("{}: {e}", path.display()))
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Instance { source, .. } | Error::GridPoint { source, .. } => exit_code(source),
        Error::DimensionMismatch { .. } => 3,
        Error::ModelFormat(_) => 2,
        Error::InvalidActivation(_)
        | Error::InvalidConfig(_)
        | Error::NegativeVariance(_)
        | Error::NonFinite(_)
        | Error::NotSymmetric(_)
        | Error::NotPositiveSemiDefinite { .. } => 4,
        _ => 1,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::new(exit_code(&e), e.to_string())
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| fmt17(*x)).collect();
    format!("[{}]", parts.join(", "))
}

fn load_model(path: &Path) -> CliResult<Perceptron> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    BayesianPerceptron::from_model_str(&text)
        .map_err(|e| Failure::new(2, format!("{}: {e}", path.display())))
}

fn train(args: TrainArgs) -> CliResult {
    let activation = parse_activation(&args.activation)?;
    let bias = !args.no_bias;
    let prior_mean = parse_vector(&args.prior_mean)
        .map_err(|m| Failure::new(2, format!("--prior-mean: {m}")))?;
    let data = read_training_csv(&args.data)?;

    let input_dim = match data.input_dim {
        Some(d) => d,
        None if prior_mean.len() > usize::from(bias) => prior_mean.len() - usize::from(bias),
        None => {
            return Err(Failure::new(
                2,
                format!(
                    "{}: no header; pass a vector --prior-mean to fix the dimension",
                    args.data.display()
                ),
            ))
        }
    };
    let dim = input_dim + usize::from(bias);
    let prior_mean = match prior_mean.as_slice() {
        [m] => vec![*m; dim],
        v if v.len() == dim => v.to_vec(),
        v => {
            return Err(Failure::new(
                3,
                format!(
                    "--prior-mean has {} entries, model has {dim} weights",
                    v.len()
                ),
            ))
        }
    };

    let model =
        Perceptron::with_isotropic_prior(input_dim, bias, activation, prior_mean, args.prior_var)?
            .with_epsilon(args.epsilon)?;
    let model = model.fit(&data.instances)?;
    fs::write(&args.out, model.to_model_string() + "\n").map_err(|e| Failure::io(&args.out, e))?;

    let w = model.weights();
    println!("instances: {}", data.instances.len());
    println!("mean: {}", fmt_vec(w.mean()));
    println!("cov_trace: {}", fmt17(w.cov().trace()));
    Ok(())
}

fn predict(args: PredictArgs) -> CliResult {
    let model = load_model(&args.model)?;
    let x = parse_vector(&args.input).map_err(|m| Failure::new(2, format!("--input: {m}")))?;
    let p = model.predict(&x)?;
    println!("mu_y: {}", fmt17(p.mu_y));
    println!("sigma_y2: {}", fmt17(p.sigma_y2));
    println!("mu_a: {}", fmt17(p.mu_a));
    println!("sigma_a2: {}", fmt17(p.sigma_a2));
    Ok(())
}

fn inspect(args: InspectArgs) -> CliResult {
    let model = load_model(&args.model)?;
    let w = model.weights();
    let eig = w.cov().symmetric_eigenvalues();
    let min_eig = eig.iter().copied().fold(f64::INFINITY, f64::min);
    println!("input_dim: {}", model.input_dim());
    println!("bias: {}", model.bias());
    println!("activation: {}", model.activation());
    println!("epsilon: {}", fmt17(model.epsilon()));
    println!("mean: {}", fmt_vec(w.mean()));
    println!("cov_trace: {}", fmt17(w.cov().trace()));
    println!("cov_min_eigenvalue: {}", fmt17(min_eig));
    Ok(())
}

fn write_records<R: serde::Serialize>(records: &[R], path: Option<&Path>) -> CliResult {
    match path {
        Some(p) => {
            let file = fs::File::create(p).map_err(|e| Failure::io(p, e))?;
            experiments::write_csv(records, io::BufWriter::new(file)).map_err(|e| Failure::io(p, e))
        }
        None => Ok(()),
    }
}

fn pm(values: &[f64]) -> CliResult<String> {
    let (m, s) = metrics::mean_std(values)?;
    Ok(format!("{m:.4} ± {s:.4}"))
}

fn experiment(args: ExperimentArgs) -> CliResult {
    let out = args.out.as_deref();
    let extra = args.extra_out.as_deref();
    let mut stdout = io::stdout().lock();
    match args.name.as_str() {
        "ground-truth" => {
            let cfg = GroundTruthConfig {
                epsilon: args.epsilon,
                ..GroundTruthConfig::default()
            };
            let run = experiments::run_ground_truth_comparison(&cfg)?;
            write_records(&run.records, out)?;
            let s = &run.summary;
            let _ = writeln!(
                stdout,
                "ground-truth: points={} mean-mae={:.4} ± {:.4} variance-mae={:.4} ± {:.4} mean-err<=0.2: {:.1}%",
                run.records.len(),
                s.mean_mae,
                s.mean_err_std,
                s.var_mae,
                s.var_err_std,
                100.0 * s.mean_err_within_0_2
            );
        }
        "classification" => {
            let defaults = ClassificationConfig::default();
            let cfg = ClassificationConfig {
                seed: args.seed,
                trials: args.trials,
                n: args.n.unwrap_or(defaults.n),
                epsilon: args.epsilon,
                ..defaults
            };
            let run = experiments::run_linear_classification(&cfg)?;
            let records = run.records();
            write_records(&records, out)?;
            if extra.is_some() {
                let field: Vec<_> = run.trials.iter().flat_map(|t| t.field.iter().copied()).collect();
                write_records(&field, extra)?;
            }
            let acc: Vec<f64> = records.iter().map(|r| r.accuracy).collect();
            let cos: Vec<f64> = records.iter().map(|r| r.cosine).collect();
            let s = &run.summary;
            let _ = writeln!(
                stdout,
                "classification: trials={} accuracy={} cosine={} median-accuracy={:.4} median-cosine={:.4}",
                records.len(),
                pm(&acc)?,
                pm(&cos)?,
                s.median_accuracy,
                s.median_cosine
            );
        }
        "regression" => {
            let defaults = RegressionConfig::default();
            let n_train = args.n.unwrap_or(defaults.n_train);
            let cfg = RegressionConfig {
                seed: args.seed,
                trials: args.trials,
                n_train,
                epsilon: args.epsilon,
                learning_rate: args.learning_rate,
                checkpoints: defaults.checkpoints.iter().copied().filter(|&c| c <= n_train).collect(),
                measure_timing: !args.no_timing,
                ..defaults
            };
            let run = experiments::run_softplus_regression(&cfg)?;
            write_records(&run.records(), out)?;
            if extra.is_some() {
                write_records(&run.bands(), extra)?;
            }
            let _ = writeln!(stdout, "regression: trials={}", run.trials.len());
            for c in &run.checkpoints {
                let _ = writeln!(
                    stdout,
                    "  n={:<3} bp-rmse={:.4} ± {:.4} grad-rmse={:.4} ± {:.4}",
                    c.checkpoint_n, c.bp_mean, c.bp_std, c.grad_mean, c.grad_std
                );
            }
        }
        other => {
            return Err(Failure::new(
                5,
                format!("unknown experiment '{other}' (expected ground-truth, classification or regression)"),
            ))
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(a) => train(a),
        Command::Predict(a) => predict(a),
        Command::Experiment(a) => experiment(a),
        Command::Inspect(a) => inspect(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("bperc: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
