#![allow(clippy::needless_range_loop)]

//! Lloyd's k-means with k-means++ seeding, used by the clustering
//! baselines.
//!
//! The procedure is pinned so runs replay exactly:
//! - the first center is a uniform pick, each further center is drawn
//!   weighted by squared distance to the nearest chosen center;
//! - assignment ties go to the lower center index;
//! - centroid updates average members in pool order; empty clusters keep
//!   their previous centroid;
//! - iteration stops after 100 rounds or when the relative inertia change
//!   drops below 1e-4;
//! - each centroid then claims its nearest still-unclaimed pool sample,
//!   in centroid order.

use ndarray::Array2;
use rand::Rng;

use crate::error::{Error, Result};
use crate::seeding::{pick_index, pick_weighted};

const MAX_ITERS: usize = 100;
const REL_TOL: f64 = 1e-4;

/// Cluster the pool into `k` groups and return the pool index nearest each
/// centroid.
pub fn select_kmeans<R: Rng>(
    features: &Array2<f64>,
    pool_indices: &[usize],
    k: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let n = pool_indices.len();
    if k > n {
        return Err(Error::invalid_argument(format!(
            "k = {k} exceeds pool size {n}"
        )));
    }
    if k == 0 {
        return Err(Error::invalid_argument("k must be at least 1"));
    }
    if features.nrows() != n {
        return Err(Error::invalid_argument(
            "features do not match pool size".to_string(),
        ));
    }
    let dim = features.ncols();

    // k-means++ seeding
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    let first = pick_index(rng, n);
    centers.push(features.row(first).to_vec());
    let mut dist2: Vec<f64> = (0..n)
        .map(|i| squared_distance(features, i, &centers[0]))
        .collect();
    while centers.len() < k {
        let total: f64 = dist2.iter().sum();
        let next = if total > 0.0 {
            pick_weighted(rng, &dist2)
        } else {
            pick_index(rng, n)
        };
        let center = features.row(next).to_vec();
        for i in 0..n {
            let d = squared_distance(features, i, &center);
            if d < dist2[i] {
                dist2[i] = d;
            }
        }
        centers.push(center);
    }

    // Lloyd iterations
    let mut assignment = vec![0usize; n];
    let mut prev_inertia: Option<f64> = None;
    for _ in 0..MAX_ITERS {
        let mut inertia = 0.0;
        for i in 0..n {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (j, center) in centers.iter().enumerate() {
                let d = squared_distance(features, i, center);
                if d < best_d {
                    best_d = d;
                    best = j;
                }
            }
            assignment[i] = best;
            inertia += best_d;
        }
        if let Some(prev) = prev_inertia {
            if prev == 0.0 || (prev - inertia).abs() / prev < REL_TOL {
                break;
            }
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for i in 0..n {
            counts[assignment[i]] += 1;
            for d in 0..dim {
                sums[assignment[i]][d] += features[[i, d]];
            }
        }
        for j in 0..k {
            if counts[j] > 0 {
                for d in 0..dim {
                    centers[j][d] = sums[j][d] / counts[j] as f64;
                }
            }
        }
        prev_inertia = Some(inertia);
    }

    // map centroids to distinct pool samples, nearest-first per centroid
    let mut claimed = vec![false; n];
    let mut out = Vec::with_capacity(k);
    for center in &centers {
        let mut best = None;
        let mut best_d = f64::INFINITY;
        for i in 0..n {
            if claimed[i] {
                continue;
            }
            let d = squared_distance(features, i, center);
            if d < best_d {
                best_d = d;
                best = Some(i);
            }
        }
        let pick = best.expect("k <= n leaves an unclaimed sample per centroid");
        claimed[pick] = true;
        out.push(pool_indices[pick]);
    }
    Ok(out)
}

fn squared_distance(features: &Array2<f64>, row: usize, center: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (d, &c) in center.iter().enumerate() {
        let diff = features[[row, d]] - c;
        acc += diff * diff;
    }
    acc
}
