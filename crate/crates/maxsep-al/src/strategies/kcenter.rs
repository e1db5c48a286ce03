#![allow(clippy::needless_range_loop)]

//! Greedy max-min facility selection (k-center) over the pool, seeded by
//! the labeled set.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Repeatedly query the pool point farthest (Euclidean) from everything
/// already covered — the labeled set plus earlier picks. Ties break to the
/// lower pool position.
pub fn select_kcenter(
    pool_features: &Array2<f64>,
    pool_indices: &[usize],
    labeled_features: &Array2<f64>,
    b: usize,
) -> Result<Vec<usize>> {
    let n = pool_indices.len();
    if labeled_features.nrows() == 0 {
        return Err(Error::invalid_state(
            "k-center needs a nonempty labeled set for coverage",
        ));
    }
    if b > n {
        return Err(Error::invalid_argument(format!(
            "batch {b} exceeds pool size {n}"
        )));
    }
    if pool_features.nrows() != n {
        return Err(Error::invalid_argument(
            "features do not match pool size".to_string(),
        ));
    }
    let dim = pool_features.ncols();
    if labeled_features.ncols() != dim {
        return Err(Error::invalid_argument(
            "labeled feature width differs from pool feature width".to_string(),
        ));
    }

    // squared distances preserve the max-min ordering
    let mut min_d2: Vec<f64> = (0..n)
        .map(|i| {
            let mut best = f64::INFINITY;
            for l in 0..labeled_features.nrows() {
                let mut acc = 0.0;
                for d in 0..dim {
                    let diff = pool_features[[i, d]] - labeled_features[[l, d]];
                    acc += diff * diff;
                }
                if acc < best {
                    best = acc;
                }
            }
            best
        })
        .collect();

    let mut claimed = vec![false; n];
    let mut out = Vec::with_capacity(b);
    for _ in 0..b {
        let mut far = None;
        let mut far_d = f64::NEG_INFINITY;
        for i in 0..n {
            if !claimed[i] && min_d2[i] > far_d {
                far_d = min_d2[i];
                far = Some(i);
            }
        }
        let pick = far.expect("b <= n leaves an unclaimed sample");
        claimed[pick] = true;
        out.push(pool_indices[pick]);
        for i in 0..n {
            if claimed[i] {
                continue;
            }
            let mut acc = 0.0;
            for d in 0..dim {
                let diff = pool_features[[i, d]] - pool_features[[pick, d]];
                acc += diff * diff;
            }
            if acc < min_d2[i] {
                min_d2[i] = acc;
            }
        }
    }
    Ok(out)
}
