//! Cost-effective pseudo-labeling: high-confidence pool samples join the
//! next round's training set with their predicted labels, at zero budget
//! cost. Pseudo-labels are recomputed every round — nothing sticks.

use ndarray::Array2;

use crate::error::{Error, Result};

use super::entropy;

/// Effective threshold at `round`: `max(delta0 - decay * round, 0)`.
pub fn ceal_threshold(delta0: f64, decay: f64, round: usize) -> f64 {
    (delta0 - decay * round as f64).max(0.0)
}

/// Entropy variant: rows with prediction entropy strictly below `delta_t`
/// are pseudo-labeled with their argmax class.
pub fn ceal_pseudo_label_entropy(
    probs: &Array2<f64>,
    pool_indices: &[usize],
    delta_t: f64,
) -> Result<Vec<(usize, usize)>> {
    if probs.nrows() != pool_indices.len() {
        return Err(Error::invalid_argument(format!(
            "{} probability rows for {} pool indices",
            probs.nrows(),
            pool_indices.len()
        )));
    }
    let mut out = Vec::new();
    for (row, &index) in probs.rows().into_iter().zip(pool_indices) {
        if entropy(row.iter().copied()) < delta_t {
            let mut best = 0usize;
            for (j, &p) in row.iter().enumerate() {
                if p > row[best] {
                    best = j;
                }
            }
            out.push((index, best));
        }
    }
    Ok(out)
}

/// Max-cosine variant: samples with `alpha > 1 - delta_t` are pseudo-labeled
/// with their predicted class. At `delta_t = 0` the condition `alpha > 1`
/// is impossible on the closed ball, so no sample qualifies.
pub fn ceal_pseudo_label_msal(
    alphas: &[f64],
    predictions: &[usize],
    pool_indices: &[usize],
    delta_t: f64,
) -> Result<Vec<(usize, usize)>> {
    if alphas.len() != pool_indices.len() || predictions.len() != pool_indices.len() {
        return Err(Error::invalid_argument(
            "alphas, predictions and pool indices must align".to_string(),
        ));
    }
    Ok(alphas
        .iter()
        .zip(predictions)
        .zip(pool_indices)
        .filter(|((&alpha, _), _)| alpha > 1.0 - delta_t)
        .map(|((_, &label), &index)| (index, label))
        .collect())
}
