//! Data ingestion, empirical statistics, synthetic GMRF signals, splitting,
//! the `(kappa x layers)` sweep and the commands behind the CLI.

pub mod commands;
mod sweep;
mod synth;

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gcn_lab::SupervisedSet;
use crate::spectral_core::{format_f64, SymMatrix, Vector};

pub use sweep::{
    learn_for_kappa, run_cell, run_sweep, CellKey, ExperimentRecord, ExperimentResult,
    GlassoSection, LearnedGraph, PreparedSweep, ProjectionSection, Series, SweepConfig,
    TrainSection,
};
pub use synth::{
    add_observation_noise, random_laplacian, synth_gmrf, synth_gmrf_ar, LaplacianSpec,
};

pub const DEFAULT_FEATURE_WINDOW: usize = 10;

/// `T x N` signals: rows are time steps, columns are nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalDataset {
    pub x: DMatrix<f64>,
    /// Number of past steps fed to the GCN as input channels.
    pub feature_window: usize,
    /// Steps between the last input row and the target row.
    pub target_offset: usize,
}

impl SignalDataset {
    pub fn new(x: DMatrix<f64>) -> Result<Self> {
        if x.nrows() < 2 {
            return Err(Error::invalid(
                "signals",
                format!("need at least 2 observations, got {}", x.nrows()),
            ));
        }
        if x.ncols() == 0 {
            return Err(Error::Empty("signals"));
        }
        if let Some(k) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: k % x.nrows(),
                col: k / x.nrows(),
            });
        }
        Ok(SignalDataset {
            x,
            feature_window: DEFAULT_FEATURE_WINDOW,
            target_offset: 0,
        })
    }

    pub fn with_window(mut self, feature_window: usize, target_offset: usize) -> Result<Self> {
        if feature_window == 0 {
            return Err(Error::invalid("feature_window", "must be >= 1"));
        }
        self.feature_window = feature_window;
        self.target_offset = target_offset;
        Ok(self)
    }

    pub fn t(&self) -> usize {
        self.x.nrows()
    }

    pub fn n(&self) -> usize {
        self.x.ncols()
    }

    /// The given rows, in the given order, with the same windowing.
    pub fn select_rows(&self, rows: &[usize]) -> Result<SignalDataset> {
        let x = self.x.select_rows(rows);
        Ok(SignalDataset {
            feature_window: self.feature_window,
            target_offset: self.target_offset,
            ..SignalDataset::new(x)?
        })
    }

    /// Sliding-window samples whose target row is one of `targets`. The input
    /// for target row `r` is rows `r - offset - window .. r - offset`, one
    /// column per past step, oldest first. Targets without a full window are
    /// skipped.
    pub fn supervised(&self, targets: &[usize]) -> SupervisedSet {
        let lag = self.feature_window + self.target_offset;
        let mut set = SupervisedSet::default();
        for &r in targets.iter().filter(|&&r| r >= lag && r < self.t()) {
            let start = r - lag;
            set.inputs
                .push(self.x.rows(start, self.feature_window).transpose());
            set.targets.push(self.x.row(r).transpose());
        }
        set
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        for row in self.x.row_iter() {
            let fields: Vec<String> = row.iter().map(|v| format_f64(*v)).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        fs::write(path, out)?;
        Ok(())
    }
}

/// Reads a rectangular numeric CSV of signals.
pub fn load_signals_csv(path: &Path, has_header: bool) -> Result<SignalDataset> {
    let parse_error = |line: u64, message: String| Error::Parse {
        path: path.to_path_buf(),
        line: line as usize,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => parse_error(0, format!("{other:?}")),
        })?;
    let mut values = Vec::new();
    let mut width = None;
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(parse_error(
                    line,
                    format!("expected {w} fields, found {}", record.len()),
                ));
            }
            _ => {}
        }
        for field in record.iter() {
            let v: f64 = field
                .parse()
                .map_err(|e| parse_error(line, format!("`{field}`: {e}")))?;
            values.push(v);
        }
        rows += 1;
    }
    let n = width.ok_or(Error::Empty("signals file"))?;
    SignalDataset::new(DMatrix::from_row_slice(rows, n, &values))
}

/// Second-moment (or centered) covariance and the unit mean direction.
pub fn empirical_stats(data: &SignalDataset, centered: bool) -> Result<(SymMatrix, Vector)> {
    let t = data.t() as f64;
    let mean: DVector<f64> = data.x.row_sum().transpose() / t;
    let norm = mean.norm();
    if !(norm > 0.0) {
        return Err(Error::invalid(
            "signals",
            "mean signal is zero, u undefined",
        ));
    }
    let cov = if centered {
        let mut xc = data.x.clone();
        for mut row in xc.row_iter_mut() {
            row -= mean.transpose();
        }
        xc.transpose() * xc / t
    } else {
        data.x.transpose() * &data.x / t
    };
    Ok((SymMatrix::symmetrize(cov)?, mean / norm))
}

/// Row indices of a train/validation/test split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

pub const DEFAULT_SPLIT: [f64; 3] = [0.7, 0.2, 0.1];

pub(crate) fn validate_ratios(ratios: &[f64; 3]) -> Result<()> {
    if ratios.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::invalid("split", "ratios must be positive"));
    }
    let sum: f64 = ratios.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(
            "split",
            format!("ratios must sum to 1, got {sum}"),
        ));
    }
    Ok(())
}

/// Seeded random permutation of `0..T`, cut into `floor(r0 T)`,
/// `floor(r1 T)` and the remainder.
pub fn split(t: usize, ratios: &[f64; 3], seed: u64) -> Result<Split> {
    validate_ratios(ratios)?;
    if t < 3 {
        return Err(Error::invalid(
            "signals",
            format!("need at least 3 observations to split, got {t}"),
        ));
    }
    let mut idx: Vec<usize> = (0..t).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = (ratios[0] * t as f64 + 1e-9).floor() as usize;
    let n_val = (ratios[1] * t as f64 + 1e-9).floor() as usize;
    let test = idx.split_off(n_train + n_val);
    let val = idx.split_off(n_train);
    Ok(Split {
        train: idx,
        val,
        test,
    })
}
