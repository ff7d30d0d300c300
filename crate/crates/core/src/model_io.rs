//! `DLDL/1` model files.
//!
//! ```text
//! DLDL/1
//! mode dynamic
//! [hyperparams]
//! alpha 6.25000000000000000e-2
//! ...
//! [D] <rows> <cols>
//! <row-major values, one matrix row per line>
//! [S] ... [B] ... [F] ...
//! [O-mask] <n>
//! <comma-separated labels, -1 = unlabeled>
//! [loss] <n>
//! initial <value|none>
//! <comma-separated history, empty line if none>
//! ```
//!
//! Reals are written with 17 significant digits so that loading reproduces
//! every value bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{DldlError, Result};
use crate::matrix::Matrix;
use crate::solver::{HyperParams, LabelMode, ModelState};

pub const MAGIC: &str = "DLDL/1";

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn format_err(section: &str, message: impl Into<String>) -> DldlError {
    DldlError::Format { section: section.to_string(), message: message.into() }
}

fn write_matrix(out: &mut String, name: &str, m: &Matrix) {
    let (rows, cols) = m.shape();
    writeln!(out, "[{name}] {rows} {cols}").unwrap();
    for r in 0..rows {
        let line: Vec<String> = (0..cols).map(|c| real(m.get(r, c))).collect();
        writeln!(out, "{}", line.join(",")).unwrap();
    }
}

/// Serialises a model and its hyperparameters.
pub fn model_to_string(state: &ModelState, hp: &HyperParams) -> String {
    let mut out = String::new();
    writeln!(out, "{MAGIC}").unwrap();
    writeln!(out, "mode {}", state.mode.as_str()).unwrap();
    writeln!(out, "[hyperparams]").unwrap();
    writeln!(out, "alpha {}", real(hp.alpha)).unwrap();
    writeln!(out, "beta {}", real(hp.beta)).unwrap();
    writeln!(out, "delta {}", real(hp.delta_w)).unwrap();
    writeln!(out, "dict_size {}", hp.dict_size).unwrap();
    writeln!(out, "knn {}", hp.knn).unwrap();
    writeln!(out, "max_iter {}", hp.max_iter).unwrap();
    writeln!(out, "rel_tol {}", real(hp.rel_tol)).unwrap();
    writeln!(out, "seed {}", hp.seed).unwrap();
    write_matrix(&mut out, "D", &state.d);
    write_matrix(&mut out, "S", &state.s);
    write_matrix(&mut out, "B", &state.b);
    write_matrix(&mut out, "F", &state.f);
    writeln!(out, "[O-mask] {}", state.labels.len()).unwrap();
    let mask: Vec<String> = state
        .labels
        .iter()
        .map(|l| l.map_or_else(|| "-1".to_string(), |c| c.to_string()))
        .collect();
    writeln!(out, "{}", mask.join(",")).unwrap();
    writeln!(out, "[loss] {}", state.loss_history.len()).unwrap();
    match state.initial_loss {
        Some(v) => writeln!(out, "initial {}", real(v)).unwrap(),
        None => writeln!(out, "initial none").unwrap(),
    }
    let hist: Vec<String> = state.loss_history.iter().map(|&v| real(v)).collect();
    writeln!(out, "{}", hist.join(",")).unwrap();
    out
}

pub fn save_model(state: &ModelState, hp: &HyperParams, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, model_to_string(state, hp))?;
    Ok(())
}

struct Cursor<'a> {
    lines: std::str::Lines<'a>,
}

impl<'a> Cursor<'a> {
    fn next(&mut self, section: &str) -> Result<&'a str> {
        self.lines
            .next()
            .map(|l| l.trim_end_matches('\r'))
            .ok_or_else(|| format_err(section, "unexpected end of file"))
    }

    fn keyed(&mut self, section: &str, key: &str) -> Result<&'a str> {
        let line = self.next(section)?;
        line.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' '))
            .ok_or_else(|| format_err(section, format!("expected `{key} <value>`, found `{line}`")))
    }

    fn header(&mut self, name: &str) -> Result<Vec<usize>> {
        let line = self.next(name)?;
        let tag = format!("[{name}]");
        let rest = line
            .strip_prefix(&tag)
            .ok_or_else(|| format_err(name, format!("expected section header `{tag}`, found `{line}`")))?;
        rest.split_whitespace()
            .map(|t| t.parse().map_err(|_| format_err(name, format!("bad size `{t}`"))))
            .collect()
    }
}

fn parse_real(section: &str, tok: &str) -> Result<f64> {
    let v: f64 = tok
        .trim()
        .parse()
        .map_err(|_| format_err(section, format!("`{tok}` is not a number")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format_err(section, format!("non-finite value `{tok}`")))
    }
}

fn parse_count(section: &str, tok: &str) -> Result<usize> {
    tok.trim()
        .parse()
        .map_err(|_| format_err(section, format!("`{tok}` is not a count")))
}

fn read_matrix(cur: &mut Cursor<'_>, name: &str) -> Result<Matrix> {
    let dims = cur.header(name)?;
    let [rows, cols] = dims[..] else {
        return Err(format_err(name, "header must give `<rows> <cols>`"));
    };
    let mut values = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let line = cur.next(name).map_err(|_| format_err(name, format!("truncated: only {r} of {rows} rows")))?;
        let row: Vec<f64> = line.split(',').map(|t| parse_real(name, t)).collect::<Result<_>>()?;
        if row.len() != cols {
            return Err(format_err(name, format!("row {r} has {} values, expected {cols}", row.len())));
        }
        values.extend(row);
    }
    Matrix::from_dmatrix(DMatrix::from_row_slice(rows, cols, &values)).map_err(|e| format_err(name, e.to_string()))
}

/// Parses a `DLDL/1` model.
pub fn model_from_str(text: &str) -> Result<(ModelState, HyperParams)> {
    let mut cur = Cursor { lines: text.lines() };
    let magic = cur.next("magic")?;
    if magic != MAGIC {
        return if magic.starts_with("DLDL/") {
            Err(DldlError::UnsupportedVersion(magic.to_string()))
        } else {
            Err(format_err("magic", format!("not a model file (first line `{magic}`)")))
        };
    }
    let mode = match cur.keyed("mode", "mode")? {
        "dynamic" => LabelMode::Dynamic,
        "fixed" => LabelMode::Fixed,
        other => return Err(format_err("mode", format!("unknown mode `{other}`"))),
    };

    let hp_sec = "hyperparams";
    if cur.next(hp_sec)? != "[hyperparams]" {
        return Err(format_err(hp_sec, "missing section header"));
    }
    let hp = HyperParams {
        alpha: parse_real(hp_sec, cur.keyed(hp_sec, "alpha")?)?,
        beta: parse_real(hp_sec, cur.keyed(hp_sec, "beta")?)?,
        delta_w: parse_real(hp_sec, cur.keyed(hp_sec, "delta")?)?,
        dict_size: parse_count(hp_sec, cur.keyed(hp_sec, "dict_size")?)?,
        knn: parse_count(hp_sec, cur.keyed(hp_sec, "knn")?)?,
        max_iter: parse_count(hp_sec, cur.keyed(hp_sec, "max_iter")?)?,
        rel_tol: parse_real(hp_sec, cur.keyed(hp_sec, "rel_tol")?)?,
        seed: cur
            .keyed(hp_sec, "seed")?
            .parse()
            .map_err(|_| format_err(hp_sec, "bad seed"))?,
    };

    let d = read_matrix(&mut cur, "D")?;
    let s = read_matrix(&mut cur, "S")?;
    let b = read_matrix(&mut cur, "B")?;
    let f = read_matrix(&mut cur, "F")?;
    let (k, n, c) = (d.cols(), s.cols(), b.rows());
    if s.rows() != k || b.cols() != k || f.shape() != (c, n) || hp.dict_size != k {
        return Err(format_err(
            "shapes",
            format!(
                "inconsistent shapes D {:?}, S {:?}, B {:?}, F {:?}, dict_size {}",
                d.shape(),
                s.shape(),
                b.shape(),
                f.shape(),
                hp.dict_size
            ),
        ));
    }

    let dims = cur.header("O-mask")?;
    if dims != [n] {
        return Err(format_err("O-mask", format!("expected {n} entries, header says {dims:?}")));
    }
    let labels: Vec<Option<usize>> = cur
        .next("O-mask")?
        .split(',')
        .map(|t| match t.trim().parse::<i64>() {
            Ok(-1) => Ok(None),
            Ok(v) if v >= 0 && (v as usize) < c => Ok(Some(v as usize)),
            _ => Err(format_err("O-mask", format!("bad label `{t}`"))),
        })
        .collect::<Result<_>>()?;
    if labels.len() != n {
        return Err(format_err("O-mask", format!("expected {n} entries, found {}", labels.len())));
    }

    let dims = cur.header("loss")?;
    let [len] = dims[..] else {
        return Err(format_err("loss", "header must give the history length"));
    };
    let initial = match cur.keyed("loss", "initial")? {
        "none" => None,
        v => Some(parse_real("loss", v)?),
    };
    let line = cur.next("loss")?;
    let loss_history: Vec<f64> = if line.is_empty() {
        Vec::new()
    } else {
        line.split(',').map(|t| parse_real("loss", t)).collect::<Result<_>>()?
    };
    if loss_history.len() != len {
        return Err(format_err("loss", format!("expected {len} values, found {}", loss_history.len())));
    }

    let state = ModelState {
        d,
        s,
        b,
        f,
        labels,
        mode,
        initial_loss: initial,
        loss_history,
        warnings: Vec::new(),
    };
    Ok((state, hp))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<(ModelState, HyperParams)> {
    model_from_str(&fs::read_to_string(path)?)
}
