//! Learning-curve metrics: accuracy, area under the budget curve, and
//! multi-seed aggregation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One evaluated round of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundPoint {
    pub round: usize,
    pub labeled_count: usize,
    pub test_accuracy: f64,
    /// Fraction of the remaining unlabeled pool the current model gets
    /// wrong (oracle labels used for measurement only). NaN when the pool
    /// is exhausted.
    pub unlabeled_error: f64,
    pub seconds: f64,
}

/// Full learning curve of one run plus its summary metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub curve: Vec<RoundPoint>,
    /// Trapezoidal area under accuracy vs labels spent, normalized by the
    /// budget span.
    pub aubc: f64,
    /// Test accuracy at the last curve point (budget exhausted).
    pub final_accuracy: f64,
    pub seed: u64,
    pub config_digest: String,
}

/// Means and sample standard deviations over runs sharing a budget grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub runs: usize,
    pub aubc_mean: f64,
    pub aubc_std: f64,
    pub facc_mean: f64,
    pub facc_std: f64,
    /// Per-round mean test accuracy over the shared labeled-count grid.
    pub mean_curve: Vec<(usize, f64)>,
}

/// Fraction of exact matches.
pub fn accuracy(predictions: &[usize], labels: &[usize]) -> Result<f64> {
    if predictions.len() != labels.len() {
        return Err(Error::invalid_argument(format!(
            "{} predictions for {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    if predictions.is_empty() {
        return Err(Error::invalid_argument("accuracy of an empty set"));
    }
    let hits = predictions.iter().zip(labels).filter(|(p, l)| p == l).count();
    Ok(hits as f64 / predictions.len() as f64)
}

/// `1 - accuracy` of the current model on the unlabeled pool.
pub fn unlabeled_error_rate(predictions: &[usize], hidden_labels: &[usize]) -> Result<f64> {
    if predictions.is_empty() {
        return Err(Error::invalid_state("unlabeled pool is empty"));
    }
    Ok(1.0 - accuracy(predictions, hidden_labels)?)
}

/// Trapezoidal integral of accuracy over labels spent, normalized by the
/// span `x_last - x_first`. Needs at least two points with strictly
/// increasing x.
pub fn aubc(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::invalid_argument(format!(
            "AUBC needs at least 2 curve points, got {}",
            points.len()
        )));
    }
    for pair in points.windows(2) {
        if pair[1].0 <= pair[0].0 {
            return Err(Error::invalid_argument(format!(
                "curve x values must strictly increase: {} then {}",
                pair[0].0, pair[1].0
            )));
        }
    }
    let mut area = 0.0;
    for pair in points.windows(2) {
        let (x0, y0) = pair[0];
        let (x1, y1) = pair[1];
        area += (x1 - x0) * (y0 + y1) / 2.0;
    }
    Ok(area / (points.last().unwrap().0 - points[0].0))
}

/// Mean and sample standard deviation (n - 1 denominator; 0 for a single
/// value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Aggregate runs that share the same labeled-count grid.
pub fn aggregate(results: &[RunResult]) -> Result<Aggregate> {
    if results.is_empty() {
        return Err(Error::invalid_argument("no runs to aggregate"));
    }
    let grid: Vec<usize> = results[0].curve.iter().map(|p| p.labeled_count).collect();
    for (i, run) in results.iter().enumerate().skip(1) {
        let other: Vec<usize> = run.curve.iter().map(|p| p.labeled_count).collect();
        if other != grid {
            return Err(Error::invalid_argument(format!(
                "run {i} has a different labeled-count grid"
            )));
        }
    }

    let aubcs: Vec<f64> = results.iter().map(|r| r.aubc).collect();
    let faccs: Vec<f64> = results.iter().map(|r| r.final_accuracy).collect();
    let (aubc_mean, aubc_std) = mean_std(&aubcs);
    let (facc_mean, facc_std) = mean_std(&faccs);

    let mean_curve = grid
        .iter()
        .enumerate()
        .map(|(i, &labeled)| {
            let mean = results.iter().map(|r| r.curve[i].test_accuracy).sum::<f64>()
                / results.len() as f64;
            (labeled, mean)
        })
        .collect();

    Ok(Aggregate {
        runs: results.len(),
        aubc_mean,
        aubc_std,
        facc_mean,
        facc_std,
        mean_curve,
    })
}
