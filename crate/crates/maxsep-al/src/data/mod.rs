//! Dataset ingestion, splits and normalization.
//!
//! Three loaders cover the desk-scale pools: the binary IDX format for
//! MNIST, a CSV schema for precomputed embeddings (standing in for the
//! image datasets that would need a convolutional backbone), and synthetic
//! Gaussian pools centered on the class prototypes. Long-tailed training
//! sets come from exponential subsampling.

mod csv_embed;
mod idx;
mod longtail;
mod synthetic;

pub use csv_embed::load_csv_embeddings;
pub use idx::load_mnist_idx;
pub use longtail::{make_longtail, ImbalanceSpec};
pub use synthetic::gen_gaussian;

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::seeding::{sample_without_replacement, stream_rng, Stream};

/// Per-feature train statistics applied to both splits.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardization {
    pub mean: Array1<f64>,
    /// Floored at 1e-8 so constant features stay harmless.
    pub std: Array1<f64>,
}

/// An in-memory classification dataset with disjoint train/test splits.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub train_inputs: Array2<f64>,
    pub train_labels: Vec<usize>,
    pub test_inputs: Array2<f64>,
    pub test_labels: Vec<usize>,
    pub num_classes: usize,
    /// Present when the loader standardized features with train statistics.
    pub normalization: Option<Standardization>,
}

impl Dataset {
    pub fn train_len(&self) -> usize {
        self.train_labels.len()
    }

    pub fn test_len(&self) -> usize {
        self.test_labels.len()
    }

    pub fn input_dim(&self) -> usize {
        self.train_inputs.ncols()
    }

    /// Sanity checks shared by every loader: labels in range, values finite.
    pub(crate) fn validate(&self) -> Result<()> {
        if self.num_classes < 2 {
            return Err(Error::invalid_argument(format!(
                "dataset {} has {} classes, need at least 2",
                self.name, self.num_classes
            )));
        }
        for (split, labels) in [("train", &self.train_labels), ("test", &self.test_labels)] {
            if let Some(&bad) = labels.iter().find(|&&y| y >= self.num_classes) {
                return Err(Error::invalid_argument(format!(
                    "{split} label {bad} out of range for {} classes",
                    self.num_classes
                )));
            }
        }
        if self.train_inputs.iter().any(|v| !v.is_finite())
            || self.test_inputs.iter().any(|v| !v.is_finite())
        {
            return Err(Error::invalid_argument(format!(
                "dataset {} contains non-finite values",
                self.name
            )));
        }
        Ok(())
    }

    /// Deterministically subsample the train split to at most `limit`
    /// samples (uniform, without replacement); the test split can be capped
    /// the same way. Used by the desk-scale presets.
    pub fn limit(mut self, train_limit: Option<usize>, test_limit: Option<usize>, seed: u64) -> Self {
        if let Some(limit) = train_limit {
            if limit < self.train_len() {
                let mut rng = stream_rng(seed, Stream::Data, 0);
                let mut keep = sample_without_replacement(&mut rng, self.train_len(), limit);
                keep.sort_unstable();
                self.train_inputs = self.train_inputs.select(ndarray::Axis(0), &keep);
                self.train_labels = keep.iter().map(|&i| self.train_labels[i]).collect();
            }
        }
        if let Some(limit) = test_limit {
            if limit < self.test_len() {
                let mut rng = stream_rng(seed, Stream::Data, 1);
                let mut keep = sample_without_replacement(&mut rng, self.test_len(), limit);
                keep.sort_unstable();
                self.test_inputs = self.test_inputs.select(ndarray::Axis(0), &keep);
                self.test_labels = keep.iter().map(|&i| self.test_labels[i]).collect();
            }
        }
        self
    }
}

/// Compute per-feature mean/std on the train split and standardize both
/// splits in place with those statistics (no test leakage).
pub(crate) fn standardize(train: &mut Array2<f64>, test: &mut Array2<f64>) -> Standardization {
    let n = train.nrows() as f64;
    let dim = train.ncols();
    let mut mean: Array1<f64> = Array1::zeros(dim);
    for row in train.rows() {
        for (j, &v) in row.iter().enumerate() {
            mean[j] += v;
        }
    }
    mean.mapv_inplace(|v| v / n);

    let mut var: Array1<f64> = Array1::zeros(dim);
    for row in train.rows() {
        for (j, &v) in row.iter().enumerate() {
            let d = v - mean[j];
            var[j] += d * d;
        }
    }
    let std = var.mapv(|v| (v / n).sqrt().max(1e-8));

    for mut row in train.rows_mut() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (*v - mean[j]) / std[j];
        }
    }
    for mut row in test.rows_mut() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (*v - mean[j]) / std[j];
        }
    }
    Standardization { mean, std }
}

/// Uniform random initial split: `num_initial` labeled indices, the rest
/// unlabeled, both ascending. Together they cover the whole train split.
pub fn split_initial(ds: &Dataset, num_initial: usize, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = ds.train_len();
    if num_initial >= n {
        return Err(Error::invalid_argument(format!(
            "initial labeled size {num_initial} must be below the pool size {n}"
        )));
    }
    if num_initial == 0 {
        return Err(Error::invalid_argument("need at least one initial label"));
    }
    let mut rng = stream_rng(seed, Stream::Split, 0);
    let mut labeled = sample_without_replacement(&mut rng, n, num_initial);
    labeled.sort_unstable();
    let mut mark = vec![false; n];
    for &i in &labeled {
        mark[i] = true;
    }
    let unlabeled: Vec<usize> = (0..n).filter(|&i| !mark[i]).collect();
    Ok((labeled, unlabeled))
}
