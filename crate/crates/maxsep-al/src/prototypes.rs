//! Fixed maximally separated class prototypes.
//!
//! `C` classes are placed on the unit hypersphere in `C - 1` dimensions as
//! the vertices of a regular simplex: every prototype has unit norm and
//! every pair meets at the same cosine of `-1/(C-1)`, the largest possible
//! equal separation. The matrix is built by the closed-form recursion
//!
//! ```text
//! P_1 = (1  -1)
//! P_k = | 1   -(1/k) 1^T          |
//!       | 0   sqrt(1 - 1/k^2) P_{k-1} |
//! ```
//!
//! unrolled bottom-up so large `C` never recurses. Construction is pure
//! `f64` arithmetic and bit-deterministic.

use ndarray::Array2;

use crate::error::{Error, Result};

/// The fixed `(C-1) x C` prototype matrix; column `c` is the unit direction
/// vector of class `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrototypeMatrix {
    num_classes: usize,
    values: Array2<f64>,
}

/// Outcome of [`verify_separation`]: worst-case norm and angle deviations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationReport {
    /// max over columns of | ||p_c||_2 - 1 |
    pub max_norm_error: f64,
    /// max over pairs i != j of | p_i . p_j + 1/(C-1) |
    pub max_angle_error: f64,
    pub pass: bool,
}

impl PrototypeMatrix {
    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    /// Embedding dimension, `C - 1`.
    pub fn dim(&self) -> usize {
        self.num_classes - 1
    }

    /// The raw `(C-1) x C` matrix.
    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    /// Prototype of class `c` as a column view.
    pub fn prototype(&self, c: usize) -> ndarray::ArrayView1<'_, f64> {
        self.values.column(c)
    }
}

/// One growth step of the recursion: `P_{k-1}` (k x (k+1) from k-1 x k).
fn grow(cur: &Array2<f64>, k: usize) -> Array2<f64> {
    let kf = k as f64;
    let scale = (1.0 - 1.0 / (kf * kf)).sqrt();
    let mut next = Array2::zeros((k, k + 1));
    next[[0, 0]] = 1.0;
    for j in 1..=k {
        next[[0, j]] = -1.0 / kf;
    }
    for i in 0..k - 1 {
        for j in 0..k {
            next[[i + 1, j + 1]] = scale * cur[[i, j]];
        }
    }
    next
}

/// Build the maximally separated prototype matrix for `num_classes`
/// classes by unrolling the recursion bottom-up, `P_1` through `P_{C-1}`.
pub fn build_prototypes(num_classes: usize) -> Result<PrototypeMatrix> {
    if num_classes < 2 {
        return Err(Error::invalid_argument(format!(
            "need at least 2 classes to separate, got {num_classes}"
        )));
    }
    let mut cur = Array2::from_shape_vec((1, 2), vec![1.0, -1.0]).expect("static shape");
    for k in 2..num_classes {
        cur = grow(&cur, k);
    }
    Ok(PrototypeMatrix {
        num_classes,
        values: cur,
    })
}

/// Every prototype matrix for `C` in `2..=max_classes`, from one recursion
/// sweep. Each entry is bit-identical to `build_prototypes(C)`, which
/// re-derives the same intermediates; a scan over many `C` avoids the
/// repeated rebuilds this way.
pub fn build_prototype_family(max_classes: usize) -> Result<Vec<PrototypeMatrix>> {
    if max_classes < 2 {
        return Err(Error::invalid_argument(format!(
            "need at least 2 classes to separate, got {max_classes}"
        )));
    }
    let mut out = Vec::with_capacity(max_classes - 1);
    let mut cur = Array2::from_shape_vec((1, 2), vec![1.0, -1.0]).expect("static shape");
    for k in 2..max_classes {
        out.push(PrototypeMatrix {
            num_classes: k,
            values: cur.clone(),
        });
        cur = grow(&cur, k);
    }
    out.push(PrototypeMatrix {
        num_classes: max_classes,
        values: cur,
    });
    Ok(out)
}

/// Cosine similarity between every pair of prototypes, as a `C x C` matrix.
pub fn pairwise_cosine(prototypes: &PrototypeMatrix) -> Array2<f64> {
    let c = prototypes.num_classes;
    let p = &prototypes.values;
    let norms: Vec<f64> = (0..c).map(|j| p.column(j).dot(&p.column(j)).sqrt()).collect();
    let gram = p.t().dot(p);
    let mut out = Array2::zeros((c, c));
    for i in 0..c {
        for j in 0..c {
            out[[i, j]] = gram[[i, j]] / (norms[i] * norms[j]);
        }
    }
    out
}

/// Check unit norms and the common pairwise angle against `tol`.
///
/// Scanning every pair for every C up to 256 is around a billion
/// multiply-adds, so the dots use unrolled accumulators over contiguous
/// prototype rows and the row loop fans out over threads; max-reductions
/// are order-independent, so the report stays deterministic.
pub fn verify_separation(prototypes: &PrototypeMatrix, tol: f64) -> SeparationReport {
    use rayon::prelude::*;

    let c = prototypes.num_classes;
    let dim = c - 1;
    let target = -1.0 / (c as f64 - 1.0);
    // row-major copy of the transpose so each prototype is one contiguous slice
    let transposed =
        Array2::from_shape_fn((c, dim), |(i, j)| prototypes.values[[j, i]]);
    let rows: Vec<&[f64]> = (0..c)
        .map(|i| transposed.row(i).to_slice().expect("standard layout"))
        .collect();

    let (max_norm_error, max_angle_error) = (0..c)
        .into_par_iter()
        .map(|i| {
            // NaN would slip through f64::max, so treat it as infinite error
            let guard = |e: f64| if e.is_nan() { f64::INFINITY } else { e };
            let norm_err = guard((dot_unrolled(rows[i], rows[i]).sqrt() - 1.0).abs());
            let mut angle_err = 0.0f64;
            for j in i + 1..c {
                angle_err = angle_err.max(guard((dot_unrolled(rows[i], rows[j]) - target).abs()));
            }
            (norm_err, angle_err)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));

    SeparationReport {
        max_norm_error,
        max_angle_error,
        pass: max_norm_error <= tol && max_angle_error <= tol,
    }
}

/// Dot product with four independent accumulators so the FP add chains
/// pipeline.
fn dot_unrolled(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let chunks = n / 4;
    for k in 0..chunks {
        let base = 4 * k;
        acc[0] += a[base] * b[base];
        acc[1] += a[base + 1] * b[base + 1];
        acc[2] += a[base + 2] * b[base + 2];
        acc[3] += a[base + 3] * b[base + 3];
    }
    let mut tail = 0.0;
    for k in 4 * chunks..n {
        tail += a[k] * b[k];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}
