//! Text formats: feature and label files, the label prior, and prediction
//! files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{invalid, DldlError, Result};
use crate::inference::PredictionReport;
use crate::matrix::FeatureMatrix;
use crate::solver::LabelPrior;

/// Per-sample labels (`None` = unlabeled) and the class count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labels {
    pub labels: Vec<Option<usize>>,
    pub n_classes: usize,
}

/// Features plus labels, validated against each other.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: FeatureMatrix,
    pub labels: Labels,
}

impl Dataset {
    pub fn new(features: FeatureMatrix, labels: Labels) -> Result<Self> {
        if labels.labels.len() != features.n_samples() {
            return Err(invalid(format!(
                "{} labels for {} samples",
                labels.labels.len(),
                features.n_samples()
            )));
        }
        if labels.n_classes < 1 {
            return Err(invalid("need at least one class"));
        }
        if let Some(c) = labels.labels.iter().flatten().find(|&&c| c >= labels.n_classes) {
            return Err(invalid(format!("label {c} out of range for {} classes", labels.n_classes)));
        }
        Ok(Self { features, labels })
    }

    pub fn prior(&self) -> Result<LabelPrior> {
        build_prior(&self.labels.labels, self.labels.n_classes)
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> DldlError {
    DldlError::Parse { line, message: message.into() }
}

/// Parses comma-separated features, one sample per row, into a `dim x N`
/// matrix.
pub fn parse_features(text: &str) -> Result<FeatureMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .enumerate()
            .map(|(col, tok)| {
                let tok = tok.trim();
                let v: f64 = tok
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("column {}: `{tok}` is not a number", col + 1)))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(parse_err(lineno, format!("column {}: non-finite value `{tok}`", col + 1)))
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(parse_err(
                    lineno,
                    format!("expected {} values, found {}", first.len(), row.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err(1, "feature file is empty"));
    }
    FeatureMatrix::from_samples(&rows)
}

pub fn load_features(path: impl AsRef<Path>) -> Result<FeatureMatrix> {
    parse_features(&fs::read_to_string(path)?)
}

/// Parses `index,label` lines. Samples not listed are unlabeled. The class
/// count is `explicit_classes` when given, else one more than the largest
/// label; a file without labels therefore needs an explicit count.
pub fn parse_labels(text: &str, n_samples: usize, explicit_classes: Option<usize>) -> Result<Labels> {
    let mut labels = vec![None; n_samples];
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',').map(str::trim);
        let (Some(idx), Some(lab), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(parse_err(lineno, "expected `index,label`"));
        };
        let idx: usize = idx
            .parse()
            .map_err(|_| parse_err(lineno, format!("`{idx}` is not a sample index")))?;
        let lab: i64 = lab
            .parse()
            .map_err(|_| parse_err(lineno, format!("`{lab}` is not an integer label")))?;
        if idx >= n_samples {
            return Err(parse_err(lineno, format!("index {idx} out of range for {n_samples} samples")));
        }
        if lab < 0 {
            return Err(parse_err(lineno, format!("negative label {lab}; omit the line to leave a sample unlabeled")));
        }
        if labels[idx].is_some() {
            return Err(parse_err(lineno, format!("duplicate index {idx}")));
        }
        labels[idx] = Some(lab as usize);
    }
    let max_label = labels.iter().flatten().copied().max();
    let n_classes = match (explicit_classes, max_label) {
        (Some(c), Some(m)) if m >= c => {
            return Err(invalid(format!("label {m} out of range for {c} classes")));
        }
        (Some(0), _) => return Err(invalid("class count must be >= 1")),
        (Some(c), _) => c,
        (None, Some(m)) => m + 1,
        (None, None) => {
            return Err(invalid("no labeled samples; the class count must be given explicitly"));
        }
    };
    Ok(Labels { labels, n_classes })
}

pub fn load_labels(path: impl AsRef<Path>, n_samples: usize, explicit_classes: Option<usize>) -> Result<Labels> {
    parse_labels(&fs::read_to_string(path)?, n_samples, explicit_classes)
}

/// Label prior: one-hot columns for labeled samples, `0.5` for unlabeled.
pub fn build_prior(labels: &[Option<usize>], n_classes: usize) -> Result<LabelPrior> {
    LabelPrior::from_labels(labels, n_classes)
}

/// `index,predicted_class[,score_c0,...]` per line.
pub fn format_predictions(report: &PredictionReport, with_scores: bool) -> String {
    let mut out = String::new();
    for (m, (&idx, &class)) in report.indices.iter().zip(&report.decisions).enumerate() {
        write!(out, "{idx},{class}").unwrap();
        if with_scores {
            for c in 0..report.scores.nrows() {
                write!(out, ",{:.17e}", report.scores[(c, m)]).unwrap();
            }
        }
        out.push('\n');
    }
    out
}

/// Reads `(index, class)` pairs back from a predictions file; trailing
/// score columns are ignored.
pub fn parse_predictions(text: &str) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',').map(str::trim);
        let idx = parts.next().and_then(|t| t.parse().ok());
        let class = parts.next().and_then(|t| t.parse().ok());
        match (idx, class) {
            (Some(i), Some(c)) => out.push((i, c)),
            _ => return Err(parse_err(lineno, "expected `index,predicted_class[,scores...]`")),
        }
    }
    Ok(out)
}
