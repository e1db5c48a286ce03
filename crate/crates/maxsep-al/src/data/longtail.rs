//! Exponential long-tail subsampling of the training split.

use ndarray::Axis;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeding::{sample_without_replacement, stream_rng, Stream};

use super::Dataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImbalanceProfile {
    Exponential,
}

/// Imbalance factor mu in (0, 1]: the target ratio between the least and
/// most frequent class sizes. mu = 1 keeps the dataset unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImbalanceSpec {
    pub factor: f64,
    pub profile: ImbalanceProfile,
}

impl ImbalanceSpec {
    pub fn exponential(factor: f64) -> Self {
        ImbalanceSpec {
            factor,
            profile: ImbalanceProfile::Exponential,
        }
    }
}

/// Keep `round(n_max * mu^(c / (C-1)))` training samples of class `c`
/// (class 0 is the head), chosen uniformly under `seed`; the test split is
/// untouched. Kept samples stay in their original order, so mu = 1
/// reproduces the input exactly.
pub fn make_longtail(ds: &Dataset, spec: &ImbalanceSpec, seed: u64) -> Result<Dataset> {
    let mu = spec.factor;
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::invalid_argument(format!(
            "imbalance factor {mu} must lie in (0, 1]"
        )));
    }
    let c_total = ds.num_classes;

    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); c_total];
    for (i, &y) in ds.train_labels.iter().enumerate() {
        by_class[y].push(i);
    }
    let n_max = by_class.iter().map(Vec::len).max().unwrap_or(0);
    if n_max == 0 {
        return Err(Error::invalid_state("empty training split"));
    }

    let mut keep: Vec<usize> = Vec::new();
    let mut rng = stream_rng(seed, Stream::Data, 2);
    for (c, members) in by_class.iter().enumerate() {
        let target = (n_max as f64 * mu.powf(c as f64 / (c_total as f64 - 1.0))).round() as usize;
        if target == 0 {
            return Err(Error::invalid_argument(format!(
                "imbalance factor {mu} rounds class {c} to zero samples; use a larger factor"
            )));
        }
        let n_c = target.min(members.len());
        if n_c == members.len() {
            keep.extend_from_slice(members);
        } else {
            let picks = sample_without_replacement(&mut rng, members.len(), n_c);
            keep.extend(picks.into_iter().map(|p| members[p]));
        }
    }
    keep.sort_unstable();

    let out = Dataset {
        name: format!("{}-lt{mu}", ds.name),
        train_inputs: ds.train_inputs.select(Axis(0), &keep),
        train_labels: keep.iter().map(|&i| ds.train_labels[i]).collect(),
        test_inputs: ds.test_inputs.clone(),
        test_labels: ds.test_labels.clone(),
        num_classes: ds.num_classes,
        normalization: ds.normalization.clone(),
    };
    out.validate()?;
    Ok(out)
}
