use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use dldl::data::{self, Labels};
use dldl::hypergraph::{build_knn_hypergraph, compute_laplacian, HypergraphSummary};
use dldl::inference::{evaluate, predict_inductive, predict_transductive};
use dldl::model_io::{load_model, save_model};
use dldl::solver::{fit_fixed_label, fit_observed};
use dldl::{DldlError, FeatureMatrix, LabelPrior, Problem};

use super::args::{AblateArgs, DataArgs, EvalArgs, InspectArgs, PredictArgs, TrainArgs};

/// Exit code 2 for usage problems, 1 for everything else.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Runtime(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Runtime(m) => m,
        }
    }
}

impl From<DldlError> for Failure {
    fn from(e: DldlError) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn require_file(path: &Path, what: &str) -> CmdResult {
    if path.is_file() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("{what} file `{}` does not exist", path.display())))
    }
}

fn with_context<T>(r: dldl::Result<T>, path: &Path) -> Result<T, Failure> {
    r.map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

struct LoadedData {
    features: FeatureMatrix,
    prior: LabelPrior,
}

fn load_data(args: &DataArgs) -> Result<LoadedData, Failure> {
    require_file(&args.features, "features")?;
    if let Some(labels) = &args.labels {
        require_file(labels, "labels")?;
    } else if args.classes.is_none() {
        return Err(Failure::Usage("either --labels or --classes is required".into()));
    }
    let features = with_context(data::load_features(&args.features), &args.features)?;
    let n = features.n_samples();
    let labels = match &args.labels {
        Some(path) => with_context(data::load_labels(path, n, args.classes), path)?,
        None => data::parse_labels("", n, args.classes)?,
    };
    let prior = data::build_prior(&labels.labels, labels.n_classes)?;
    Ok(LoadedData { features, prior })
}

fn write_output(path: Option<&Path>, text: &str) -> CmdResult {
    match path {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn train(args: &TrainArgs) -> CmdResult {
    let data = load_data(&args.data)?;
    let hp = args.solver.hyperparams();
    hp.validate()?;
    let graph = build_knn_hypergraph(&data.features, hp.knn)?;
    let lap = compute_laplacian(&graph)?;
    let problem = Problem::new(&data.features, &data.prior, &lap, &hp)?;

    let log_path = args.out.clone().unwrap_or_else(|| {
        let mut p = args.model.clone().into_os_string();
        p.push(".log");
        PathBuf::from(p)
    });
    let mut log = BufWriter::new(File::create(&log_path)?);
    let mut log_error = None;
    let fitted = fit_observed(&problem, |_, loss| {
        if let Err(e) = writeln!(log, "{loss:.16e}").and_then(|_| log.flush()) {
            log_error.get_or_insert(e);
        }
    });
    log.flush()?;
    if let Some(e) = log_error {
        return Err(e.into());
    }
    let state = fitted?;
    for w in &state.warnings {
        log::warn!("{w}");
    }
    save_model(&state, &hp, &args.model)?;
    eprintln!(
        "trained {} atoms on {} samples in {} iterations; final objective {:.6e}",
        hp.dict_size,
        data.features.n_samples(),
        state.loss_history.len(),
        state.loss_history.last().copied().unwrap_or(f64::NAN)
    );
    Ok(())
}

pub fn predict(args: &PredictArgs) -> CmdResult {
    require_file(&args.model, "model")?;
    let (model, hp) = with_context(load_model(&args.model), &args.model)?;
    let report = if args.transductive {
        predict_transductive(&model, true)?
    } else {
        let path = args
            .features
            .as_ref()
            .ok_or_else(|| Failure::Usage("--features is required unless --transductive is given".into()))?;
        require_file(path, "features")?;
        let features = with_context(data::load_features(path), path)?;
        predict_inductive(&model, &features, args.test_alpha.unwrap_or(hp.alpha))?
    };
    write_output(args.out.as_deref(), &data::format_predictions(&report, args.scores))
}

/// Ground truth keyed by sample index.
fn load_truth(path: &Path) -> Result<BTreeMap<usize, usize>, Failure> {
    let text = fs::read_to_string(path)?;
    let pairs = with_context(data::parse_predictions(&text), path)?;
    let mut truth = BTreeMap::new();
    for (idx, label) in pairs {
        if truth.insert(idx, label).is_some() {
            return Err(Failure::Runtime(format!("{}: duplicate index {idx}", path.display())));
        }
    }
    if truth.is_empty() {
        return Err(Failure::Runtime(format!("{}: no ground-truth labels", path.display())));
    }
    Ok(truth)
}

pub fn eval(args: &EvalArgs) -> CmdResult {
    require_file(&args.predictions, "predictions")?;
    require_file(&args.labels, "labels")?;
    let text = fs::read_to_string(&args.predictions)?;
    let predictions = with_context(data::parse_predictions(&text), &args.predictions)?;
    let truth = load_truth(&args.labels)?;
    let mut decisions = Vec::with_capacity(predictions.len());
    let mut expected = Vec::with_capacity(predictions.len());
    for (idx, class) in predictions {
        let Some(&t) = truth.get(&idx) else {
            return Err(Failure::Runtime(format!("length mismatch: no ground truth for sample {idx}")));
        };
        decisions.push(class);
        expected.push(t);
    }
    let acc = evaluate(&decisions, &expected)?;
    println!("{:.1}%", 100.0 * acc);
    Ok(())
}

fn unlabeled_accuracy(report: &dldl::inference::PredictionReport, truth: &Labels) -> Result<f64, Failure> {
    let expected: Vec<usize> = report
        .indices
        .iter()
        .map(|&i| truth.labels[i].ok_or_else(|| Failure::Runtime(format!("no ground truth for sample {i}"))))
        .collect::<Result<_, _>>()?;
    Ok(evaluate(&report.decisions, &expected)?)
}

pub fn ablate(args: &AblateArgs) -> CmdResult {
    require_file(&args.truth, "truth")?;
    if args.repeats < 1 {
        return Err(Failure::Usage("--repeats must be at least 1".into()));
    }
    let data = load_data(&args.data)?;
    let base = args.solver.hyperparams();
    base.validate()?;
    let n = data.features.n_samples();
    let truth = with_context(data::load_labels(&args.truth, n, Some(data.prior.n_classes())), &args.truth)?;
    let graph = build_knn_hypergraph(&data.features, base.knn)?;
    let lap = compute_laplacian(&graph)?;

    let mut rows = String::from("seed,dldl_acc,fixed_acc\n");
    let (mut sum_dyn, mut sum_fixed) = (0.0, 0.0);
    for r in 0..args.repeats {
        let hp = dldl::HyperParams { seed: base.seed + r as u64, ..base.clone() };
        let problem = Problem::new(&data.features, &data.prior, &lap, &hp)?;
        let dynamic = fit_observed(&problem, |_, _| {})?;
        let fixed = fit_fixed_label(&problem)?;
        let acc_dyn = unlabeled_accuracy(&predict_transductive(&dynamic, true)?, &truth)?;
        let acc_fixed = unlabeled_accuracy(&predict_transductive(&fixed, true)?, &truth)?;
        rows.push_str(&format!("{},{acc_dyn:.6},{acc_fixed:.6}\n", hp.seed));
        sum_dyn += acc_dyn;
        sum_fixed += acc_fixed;
    }
    fs::write(&args.out, rows)?;

    let k = args.repeats as f64;
    let (mean_dyn, mean_fixed) = (100.0 * sum_dyn / k, 100.0 * sum_fixed / k);
    println!(
        "dynamic labels: {mean_dyn:.1}%  fixed labels: {mean_fixed:.1}%  (mean transductive accuracy over {} seeds)",
        args.repeats
    );
    let note = if base.beta == 0.0 {
        "  [degenerate comparison: beta = 0 removes the label terms from both variants]"
    } else {
        ""
    };
    println!("difference: {:+.1} points{note}", mean_dyn - mean_fixed);
    Ok(())
}

pub fn inspect_hypergraph(args: &InspectArgs) -> CmdResult {
    require_file(&args.features, "features")?;
    let features = with_context(data::load_features(&args.features), &args.features)?;
    let graph = build_knn_hypergraph(&features, args.knn)?;
    let lap = if args.eigenvalues { Some(compute_laplacian(&graph)?) } else { None };
    println!("{}", HypergraphSummary::new(&graph, lap.as_ref()));
    Ok(())
}
