//! Acquisition scoring and batch selection.
//!
//! Uncertainty scores all follow one convention: **higher = more
//! uncertain**. Classical scores (least confidence, margin, entropy) are
//! stored as-is; the max-cosine-to-prototype score alpha is stored negated
//! so the most uncertain sample still ranks first.
//!
//! Selection is deterministic given its inputs and the run RNG: every
//! ranking sort is serial with ties broken by the lower pool index, and all
//! random draws go through the documented helpers in [`crate::seeding`].

mod ceal;
mod kcenter;
mod kmeans;

pub use ceal::{ceal_pseudo_label_entropy, ceal_pseudo_label_msal, ceal_threshold};
pub use kcenter::select_kcenter;
pub use kmeans::select_kmeans;

use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prototypes::PrototypeMatrix;
use crate::seeding::sample_without_replacement;

/// Feature rows with an L2 norm below this are treated as direction-free
/// and score as maximally uncertain.
pub const ZERO_NORM_EPS: f64 = 1e-12;

/// Per-sample uncertainty, aligned with `pool_indices`.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintyScores {
    pub pool_indices: Vec<usize>,
    pub scores: Vec<f64>,
}

impl UncertaintyScores {
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Positions into `pool_indices` ranked most-uncertain first; ties go
    /// to the lower pool index.
    fn ranked_positions(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.scores.len()).collect();
        order.sort_by(|&a, &b| {
            self.scores[b]
                .total_cmp(&self.scores[a])
                .then(self.pool_indices[a].cmp(&self.pool_indices[b]))
        });
        order
    }
}

/// Which uncertainty score feeds a composed strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UncertaintySource {
    Msal,
    LeastConf,
    Margin,
    Entropy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    Random,
    LeastConf,
    Margin,
    Entropy,
    Kmeans,
    Kcenter,
    Dbal,
    Msal,
    MsalD,
}

impl StrategyKind {
    pub fn name(&self) -> &'static str {
        match self {
            StrategyKind::Random => "random",
            StrategyKind::LeastConf => "least_conf",
            StrategyKind::Margin => "margin",
            StrategyKind::Entropy => "entropy",
            StrategyKind::Kmeans => "kmeans",
            StrategyKind::Kcenter => "kcenter",
            StrategyKind::Dbal => "dbal",
            StrategyKind::Msal => "msal",
            StrategyKind::MsalD => "msal_d",
        }
    }
}

/// Pseudo-labeling settings for the CEAL wrapper.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CealSettings {
    /// Initial high-confidence threshold, in (0, 1].
    pub delta0: f64,
    /// Per-round threshold decay, >= 0.
    pub decay_rate: f64,
}

/// Which acquisition rule runs, with its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategySpec {
    pub kind: StrategyKind,
    /// Score used by `msal`, `msal_d` and `dbal`; ignored by the rest.
    pub uncertainty_source: UncertaintySource,
    /// Pre-filter factor: the diversity stage sees the `beta * b` most
    /// uncertain samples (clamped to the pool size at call time).
    pub beta: usize,
    pub ceal: Option<CealSettings>,
}

impl StrategySpec {
    pub fn new(kind: StrategyKind) -> Self {
        let uncertainty_source = match kind {
            StrategyKind::Dbal => UncertaintySource::LeastConf,
            _ => UncertaintySource::Msal,
        };
        StrategySpec {
            kind,
            uncertainty_source,
            beta: 1,
            ceal: None,
        }
    }

    pub fn with_source(mut self, source: UncertaintySource) -> Self {
        self.uncertainty_source = source;
        self
    }

    pub fn with_beta(mut self, beta: usize) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_ceal(mut self, settings: CealSettings) -> Self {
        self.ceal = Some(settings);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.beta < 1 {
            return Err(Error::invalid_argument("beta must be at least 1"));
        }
        if let Some(ceal) = &self.ceal {
            if !(ceal.delta0 > 0.0 && ceal.delta0 <= 1.0) {
                return Err(Error::invalid_argument(format!(
                    "ceal delta0 must lie in (0, 1], got {}",
                    ceal.delta0
                )));
            }
            if ceal.decay_rate < 0.0 {
                return Err(Error::invalid_argument(format!(
                    "ceal decay_rate must be nonnegative, got {}",
                    ceal.decay_rate
                )));
            }
        }
        Ok(())
    }
}

/// Max cosine similarity of each feature row to its nearest prototype,
/// stored negated so higher = more uncertain. Zero-norm rows get
/// alpha = -1, the most uncertain value on the closed ball.
pub fn score_msal(
    features: &Array2<f64>,
    pool_indices: &[usize],
    prototypes: &PrototypeMatrix,
) -> Result<UncertaintyScores> {
    let dim = prototypes.dim();
    if features.ncols() != dim {
        return Err(Error::invalid_argument(format!(
            "feature width {} does not match prototype dimension {}",
            features.ncols(),
            dim
        )));
    }
    check_alignment(features.nrows(), pool_indices)?;

    let alphas = max_cosines(features, prototypes);
    Ok(UncertaintyScores {
        pool_indices: pool_indices.to_vec(),
        scores: alphas.into_iter().map(|a| -a).collect(),
    })
}

/// `1 - max_c p_c` per row.
pub fn score_least_conf(probs: &Array2<f64>, pool_indices: &[usize]) -> Result<UncertaintyScores> {
    check_probability_rows(probs)?;
    check_alignment(probs.nrows(), pool_indices)?;
    let scores = probs
        .rows()
        .into_iter()
        .map(|row| 1.0 - row.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)))
        .collect();
    Ok(UncertaintyScores {
        pool_indices: pool_indices.to_vec(),
        scores,
    })
}

/// Negated top-two probability gap per row; 0 is the most uncertain value.
pub fn score_margin(probs: &Array2<f64>, pool_indices: &[usize]) -> Result<UncertaintyScores> {
    check_probability_rows(probs)?;
    check_alignment(probs.nrows(), pool_indices)?;
    let scores = probs
        .rows()
        .into_iter()
        .map(|row| {
            let (mut top, mut second) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            for &p in row.iter() {
                if p > top {
                    second = top;
                    top = p;
                } else if p > second {
                    second = p;
                }
            }
            -(top - second)
        })
        .collect();
    Ok(UncertaintyScores {
        pool_indices: pool_indices.to_vec(),
        scores,
    })
}

/// Shannon entropy per row, in nats.
pub fn score_entropy(probs: &Array2<f64>, pool_indices: &[usize]) -> Result<UncertaintyScores> {
    check_probability_rows(probs)?;
    check_alignment(probs.nrows(), pool_indices)?;
    let scores = probs.rows().into_iter().map(|row| entropy(row.iter().copied())).collect();
    Ok(UncertaintyScores {
        pool_indices: pool_indices.to_vec(),
        scores,
    })
}

pub(crate) fn entropy(probs: impl Iterator<Item = f64>) -> f64 {
    probs.filter(|&p| p > 0.0).map(|p| -p * p.ln()).sum()
}

/// The `n` most uncertain pool indices; ties break to the lower pool
/// index, and asking for more than the pool holds returns the whole pool.
pub fn select_top_uncertain(scores: &UncertaintyScores, n: usize) -> Result<Vec<usize>> {
    if scores.is_empty() {
        return Err(Error::invalid_state("selection from an empty pool"));
    }
    if n == 0 {
        return Err(Error::invalid_argument("must select at least 1 sample"));
    }
    Ok(scores
        .ranked_positions()
        .into_iter()
        .take(n.min(scores.len()))
        .map(|pos| scores.pool_indices[pos])
        .collect())
}

/// Uniform sample of `b` pool indices without replacement.
pub fn select_random<R: Rng>(pool_indices: &[usize], b: usize, rng: &mut R) -> Result<Vec<usize>> {
    if b > pool_indices.len() {
        return Err(Error::invalid_argument(format!(
            "batch {b} exceeds pool size {}",
            pool_indices.len()
        )));
    }
    Ok(sample_without_replacement(rng, pool_indices.len(), b)
        .into_iter()
        .map(|pos| pool_indices[pos])
        .collect())
}

/// Prototype-quota diversity selection.
///
/// 1. pre-filter the `min(beta * b, n)` most uncertain samples;
/// 2. assign each to its nearest prototype by cosine;
/// 3. give every class a quota of `b / C`, the `b mod C` remainder going
///    one each to the lowest class indices;
/// 4. fill each class quota with the members closest to that prototype;
/// 5. any deficit (a class group smaller than its quota) is topped up from
///    the remaining pre-filtered samples in descending uncertainty order.
pub fn select_msal_d(
    features: &Array2<f64>,
    prototypes: &PrototypeMatrix,
    batch: usize,
    beta: usize,
    scores: &UncertaintyScores,
) -> Result<Vec<usize>> {
    let n = scores.len();
    if batch > n {
        return Err(Error::invalid_argument(format!(
            "batch {batch} exceeds pool size {n}"
        )));
    }
    if batch == 0 {
        return Err(Error::invalid_argument("must select at least 1 sample"));
    }
    if beta < 1 {
        return Err(Error::invalid_argument("beta must be at least 1"));
    }
    if features.nrows() != n || features.ncols() != prototypes.dim() {
        return Err(Error::invalid_argument(format!(
            "features {}x{} do not match pool size {n} and prototype dimension {}",
            features.nrows(),
            features.ncols(),
            prototypes.dim()
        )));
    }

    let num_classes = prototypes.num_classes();
    let filtered: Vec<usize> = scores
        .ranked_positions()
        .into_iter()
        .take(beta.saturating_mul(batch).min(n))
        .collect();

    let assignment = assign_to_prototypes(features, prototypes, &filtered);

    let mut picked = vec![false; filtered.len()];
    let mut selection: Vec<usize> = Vec::with_capacity(batch);
    for class in 0..num_classes {
        let quota = batch / num_classes + usize::from(class < batch % num_classes);
        let mut members: Vec<usize> = (0..filtered.len())
            .filter(|&f| assignment[f].class == class)
            .collect();
        members.sort_by(|&a, &b| {
            assignment[b]
                .cosine
                .total_cmp(&assignment[a].cosine)
                .then(scores.pool_indices[filtered[a]].cmp(&scores.pool_indices[filtered[b]]))
        });
        for &f in members.iter().take(quota) {
            picked[f] = true;
            selection.push(scores.pool_indices[filtered[f]]);
        }
    }

    // deficit fill: remaining pre-filtered samples by uncertainty rank
    for (f, _) in filtered.iter().enumerate() {
        if selection.len() == batch {
            break;
        }
        if !picked[f] {
            picked[f] = true;
            selection.push(scores.pool_indices[filtered[f]]);
        }
    }
    debug_assert_eq!(selection.len(), batch);
    Ok(selection)
}

/// Uncertainty pre-filter followed by k-means representative picking:
/// the `min(beta * b, n)` most uncertain samples are clustered with
/// `k = b` and the sample nearest each centroid is queried.
pub fn select_dbal<R: Rng>(
    features: &Array2<f64>,
    batch: usize,
    beta: usize,
    scores: &UncertaintyScores,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let n = scores.len();
    if batch > n {
        return Err(Error::invalid_argument(format!(
            "batch {batch} exceeds pool size {n}"
        )));
    }
    if beta < 1 {
        return Err(Error::invalid_argument("beta must be at least 1"));
    }
    if features.nrows() != n {
        return Err(Error::invalid_argument(
            "features do not match pool size".to_string(),
        ));
    }

    let filtered: Vec<usize> = scores
        .ranked_positions()
        .into_iter()
        .take(beta.saturating_mul(batch).min(n))
        .collect();
    let sub_features = ndarray::Array2::from_shape_fn(
        (filtered.len(), features.ncols()),
        |(i, j)| features[[filtered[i], j]],
    );
    let sub_indices: Vec<usize> = filtered.iter().map(|&f| scores.pool_indices[f]).collect();
    select_kmeans(&sub_features, &sub_indices, batch, rng)
}

struct PrototypeAssignment {
    class: usize,
    cosine: f64,
}

/// Nearest prototype (argmax dot, ties to the lower class) and the cosine
/// to it, for the given positions. Zero-norm rows go to class 0 with
/// cosine 0.
fn assign_to_prototypes(
    features: &Array2<f64>,
    prototypes: &PrototypeMatrix,
    positions: &[usize],
) -> Vec<PrototypeAssignment> {
    let p = prototypes.values();
    let dim = prototypes.dim();
    positions
        .iter()
        .map(|&row| {
            let mut best_class = 0usize;
            let mut best_dot = f64::NEG_INFINITY;
            let mut norm2 = 0.0;
            for d in 0..dim {
                norm2 += features[[row, d]] * features[[row, d]];
            }
            for c in 0..prototypes.num_classes() {
                let mut dot = 0.0;
                for d in 0..dim {
                    dot += features[[row, d]] * p[[d, c]];
                }
                if dot > best_dot {
                    best_dot = dot;
                    best_class = c;
                }
            }
            let norm = norm2.sqrt();
            let cosine = if norm < ZERO_NORM_EPS { 0.0 } else { best_dot / norm };
            PrototypeAssignment {
                class: best_class,
                cosine,
            }
        })
        .collect()
}

/// Max cosine to any prototype per feature row (alpha); zero-norm rows
/// get -1.
pub(crate) fn max_cosines(features: &Array2<f64>, prototypes: &PrototypeMatrix) -> Vec<f64> {
    let p = prototypes.values();
    let dim = prototypes.dim();
    (0..features.nrows())
        .map(|row| {
            let mut norm2 = 0.0;
            for d in 0..dim {
                norm2 += features[[row, d]] * features[[row, d]];
            }
            let norm = norm2.sqrt();
            if norm < ZERO_NORM_EPS {
                return -1.0;
            }
            let mut best = f64::NEG_INFINITY;
            for c in 0..prototypes.num_classes() {
                let mut dot = 0.0;
                for d in 0..dim {
                    dot += features[[row, d]] * p[[d, c]];
                }
                best = best.max(dot / norm);
            }
            best
        })
        .collect()
}

fn check_alignment(rows: usize, pool_indices: &[usize]) -> Result<()> {
    if rows != pool_indices.len() {
        return Err(Error::invalid_argument(format!(
            "{rows} score rows for {} pool indices",
            pool_indices.len()
        )));
    }
    Ok(())
}

fn check_probability_rows(probs: &Array2<f64>) -> Result<()> {
    for (i, row) in probs.rows().into_iter().enumerate() {
        let sum: f64 = row.sum();
        if (sum - 1.0).abs() > 1e-4 {
            return Err(Error::invalid_argument(format!(
                "row {i} sums to {sum}, not a probability vector"
            )));
        }
    }
    Ok(())
}

/// Everything a strategy can look at when picking a batch.
pub struct SelectionContext<'a> {
    pub pool_indices: &'a [usize],
    /// Pool features, `n x (C-1)`, aligned with `pool_indices`.
    pub features: &'a Array2<f64>,
    /// Pool softmax probabilities, `n x C`, aligned with `pool_indices`.
    pub probs: &'a Array2<f64>,
    /// Features of the currently labeled samples (k-center coverage).
    pub labeled_features: &'a Array2<f64>,
    pub prototypes: &'a PrototypeMatrix,
}

/// Compute the uncertainty scores named by `source`.
pub fn score_with(source: UncertaintySource, ctx: &SelectionContext<'_>) -> Result<UncertaintyScores> {
    match source {
        UncertaintySource::Msal => score_msal(ctx.features, ctx.pool_indices, ctx.prototypes),
        UncertaintySource::LeastConf => score_least_conf(ctx.probs, ctx.pool_indices),
        UncertaintySource::Margin => score_margin(ctx.probs, ctx.pool_indices),
        UncertaintySource::Entropy => score_entropy(ctx.probs, ctx.pool_indices),
    }
}

/// Run the acquisition rule described by `spec` and return exactly `b`
/// distinct pool indices.
pub fn select_batch<R: Rng>(
    spec: &StrategySpec,
    ctx: &SelectionContext<'_>,
    b: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    spec.validate()?;
    match spec.kind {
        StrategyKind::Random => select_random(ctx.pool_indices, b, rng),
        StrategyKind::LeastConf => {
            select_top_uncertain(&score_least_conf(ctx.probs, ctx.pool_indices)?, b)
        }
        StrategyKind::Margin => select_top_uncertain(&score_margin(ctx.probs, ctx.pool_indices)?, b),
        StrategyKind::Entropy => {
            select_top_uncertain(&score_entropy(ctx.probs, ctx.pool_indices)?, b)
        }
        StrategyKind::Kmeans => select_kmeans(ctx.features, ctx.pool_indices, b, rng),
        StrategyKind::Kcenter => {
            select_kcenter(ctx.features, ctx.pool_indices, ctx.labeled_features, b)
        }
        StrategyKind::Msal => select_top_uncertain(&score_with(spec.uncertainty_source, ctx)?, b),
        StrategyKind::MsalD => {
            let scores = score_with(spec.uncertainty_source, ctx)?;
            select_msal_d(ctx.features, ctx.prototypes, b, spec.beta, &scores)
        }
        StrategyKind::Dbal => {
            let scores = score_with(spec.uncertainty_source, ctx)?;
            select_dbal(ctx.features, b, spec.beta, &scores, rng)
        }
    }
}

#[cfg(test)]
mod tests;
