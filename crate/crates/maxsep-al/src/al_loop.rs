//! The outer acquisition loop: train, evaluate, score, select, reveal,
//! repeat until the budget is exhausted.
//!
//! A run executes `T = budget / batch` acquisition rounds. Every round
//! retrains from a round-derived seed (cold start unless `warm_start`),
//! evaluates on the held-out test split, scores the unlabeled pool,
//! queries exactly `batch` samples and reveals their oracle labels. Round
//! 0 is evaluated before any query so the learning curve starts at the
//! initial pool, and a final evaluation follows the last query, giving
//! `T + 1` curve points.
//!
//! Budget accounting is strict: pseudo-labeled samples train the next
//! round's model but never join the labeled set and never touch the
//! budget. A persisted query log can replay a run with selection bypassed
//! and reproduce the learning curve bit-exactly.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use ndarray::{Array2, Axis};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::{split_initial, Dataset};
use crate::error::{Error, Result};
use crate::metrics::{accuracy, aubc, unlabeled_error_rate, RoundPoint, RunResult};
use crate::model::{
    argmax_rows, init_classifier, softmax_rows, Architecture, Classifier, Elem, TrainConfig,
};
use crate::seeding::{derive_seed, stream_rng, Stream};
use crate::strategies::{
    ceal_pseudo_label_entropy, ceal_pseudo_label_msal, ceal_threshold, max_cosines, score_with,
    select_batch, SelectionContext, StrategyKind, StrategySpec, UncertaintySource,
};

/// Numeric precision of the model arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    F32,
    F64,
}

/// Everything one run needs besides the dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub initial_labeled: usize,
    pub batch: usize,
    pub budget: usize,
    pub strategy: StrategySpec,
    pub hidden_dims: Vec<usize>,
    pub rho: f64,
    pub epochs: usize,
    pub minibatch_size: usize,
    pub learning_rate: f64,
    pub warm_start: bool,
    pub precision: Precision,
    pub seed: u64,
    pub eval_every: usize,
}

impl ExperimentConfig {
    /// Number of acquisition rounds, `budget / batch`.
    pub fn rounds(&self) -> usize {
        self.budget / self.batch
    }

    pub fn validate(&self, ds: &Dataset) -> Result<()> {
        self.strategy.validate()?;
        if self.batch == 0 {
            return Err(Error::invalid_argument("batch must be at least 1"));
        }
        if self.budget == 0 || !self.budget.is_multiple_of(self.batch) {
            return Err(Error::invalid_argument(format!(
                "budget {} must be a positive multiple of batch {}; trailing partial rounds are not run",
                self.budget, self.batch
            )));
        }
        if self.initial_labeled == 0 {
            return Err(Error::invalid_argument("need at least one initial label"));
        }
        if self.initial_labeled + self.budget > ds.train_len() {
            return Err(Error::invalid_argument(format!(
                "initial {} + budget {} exceeds the {}-sample pool",
                self.initial_labeled,
                self.budget,
                ds.train_len()
            )));
        }
        if self.initial_labeled < ds.num_classes {
            eprintln!(
                "warning: initial pool of {} is below the class count {}; early rounds may miss classes",
                self.initial_labeled, ds.num_classes
            );
        }
        if self.eval_every == 0 {
            return Err(Error::invalid_argument("eval_every must be at least 1"));
        }
        if self.epochs == 0 {
            return Err(Error::invalid_argument("epochs must be at least 1"));
        }
        Ok(())
    }

    /// Digest of the resolved run configuration plus the dataset name;
    /// identical configs produce identical digests.
    pub fn digest(&self, dataset_name: &str) -> String {
        let mut hasher = Sha256::new();
        hasher.update(serde_json::to_string(self).expect("config serializes").as_bytes());
        hasher.update(dataset_name.as_bytes());
        hex_digest(&hasher.finalize()[..16])
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// One selected sample in the query log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub round: usize,
    pub strategy: String,
    pub pool_index: usize,
    /// Uncertainty score of the sample under the strategy's scoring rule;
    /// 0 for strategies that do not score (random, kmeans, kcenter).
    pub score: f64,
    /// Class predicted for the sample when it was selected.
    pub assigned_class: usize,
}

/// Labeled/unlabeled partition plus the budget ledger of a running
/// experiment. `labeled` and `unlabeled` always partition the pool;
/// pseudo-labels are a transient view and never move indices.
#[derive(Debug, Clone)]
pub struct ALState {
    pub round: usize,
    pub labeled: Vec<usize>,
    pub unlabeled: Vec<usize>,
    pub pseudo_labeled: Vec<(usize, usize)>,
    pub budget_used: usize,
    pub query_log: Vec<QueryRecord>,
}

impl ALState {
    pub fn new(labeled: Vec<usize>, unlabeled: Vec<usize>) -> Self {
        ALState {
            round: 0,
            labeled,
            unlabeled,
            pseudo_labeled: Vec::new(),
            budget_used: 0,
            query_log: Vec::new(),
        }
    }
}

/// Optional knobs for [`run_experiment_with`].
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Bypass selection and replay these per-round query sets.
    pub replay: Option<Vec<Vec<usize>>>,
    /// Dump per-round pool embeddings as CSV under this directory.
    pub embeddings_dir: Option<PathBuf>,
}

/// Run the experiment and return its learning curve and summary metrics.
pub fn run_experiment(cfg: &ExperimentConfig, ds: &Dataset) -> Result<(RunResult, ALState)> {
    run_experiment_with(cfg, ds, &RunOptions::default())
}

/// Re-run from a persisted query log, bypassing selection.
pub fn run_experiment_replay(
    cfg: &ExperimentConfig,
    ds: &Dataset,
    rounds: Vec<Vec<usize>>,
) -> Result<(RunResult, ALState)> {
    run_experiment_with(
        cfg,
        ds,
        &RunOptions {
            replay: Some(rounds),
            embeddings_dir: None,
        },
    )
}

pub fn run_experiment_with(
    cfg: &ExperimentConfig,
    ds: &Dataset,
    options: &RunOptions,
) -> Result<(RunResult, ALState)> {
    match cfg.precision {
        Precision::F64 => run_impl::<f64>(cfg, ds, options),
        Precision::F32 => run_impl::<f32>(cfg, ds, options),
    }
}

/// Score the pool with the trained model, select `batch` samples (or take
/// the replayed set), reveal their labels and update the ledger. CEAL
/// pseudo-labels for the next round are computed here, after the queried
/// samples leave the pool.
pub fn one_round<E: Elem>(
    state: &mut ALState,
    clf: &Classifier<E>,
    spec: &StrategySpec,
    batch: usize,
    train_inputs: &Array2<E>,
    rng: &mut ChaCha8Rng,
    replay: Option<&[usize]>,
) -> Result<()> {
    if state.unlabeled.len() < batch {
        return Err(Error::invalid_state(format!(
            "pool exhausted: {} unlabeled samples cannot fill a batch of {batch}",
            state.unlabeled.len()
        )));
    }

    let pool_inputs = train_inputs.select(Axis(0), &state.unlabeled);
    let fwd = clf.forward(&pool_inputs.view())?;
    let features = fwd.features.mapv(Elem::to_f64);
    let probs = softmax_rows(&fwd.logits).mapv(Elem::to_f64);
    let predictions = argmax_rows(&fwd.logits);

    let labeled_inputs = train_inputs.select(Axis(0), &state.labeled);
    let labeled_features = clf.embed_pool(&labeled_inputs.view())?.mapv(Elem::to_f64);

    let ctx = SelectionContext {
        pool_indices: &state.unlabeled,
        features: &features,
        probs: &probs,
        labeled_features: &labeled_features,
        prototypes: clf.prototypes(),
    };

    let picked: Vec<usize> = match replay {
        Some(indices) => {
            if indices.len() != batch {
                return Err(Error::invalid_argument(format!(
                    "replayed round {} has {} indices, expected {batch}",
                    state.round,
                    indices.len()
                )));
            }
            for &i in indices {
                if state.unlabeled.binary_search(&i).is_err() {
                    return Err(Error::invalid_argument(format!(
                        "replayed index {i} is not in the unlabeled pool at round {}",
                        state.round
                    )));
                }
            }
            indices.to_vec()
        }
        None => select_batch(spec, &ctx, batch, rng)?,
    };

    // scores for the log, under the strategy's own scoring rule
    let log_source = match spec.kind {
        StrategyKind::LeastConf => Some(UncertaintySource::LeastConf),
        StrategyKind::Margin => Some(UncertaintySource::Margin),
        StrategyKind::Entropy => Some(UncertaintySource::Entropy),
        StrategyKind::Msal | StrategyKind::MsalD | StrategyKind::Dbal => {
            Some(spec.uncertainty_source)
        }
        StrategyKind::Random | StrategyKind::Kmeans | StrategyKind::Kcenter => None,
    };
    let log_scores = match log_source {
        Some(source) => Some(score_with(source, &ctx)?),
        None => None,
    };
    for &index in &picked {
        let pos = state
            .unlabeled
            .binary_search(&index)
            .map_err(|_| Error::invalid_state(format!("selected index {index} not in pool")))?;
        state.query_log.push(QueryRecord {
            round: state.round,
            strategy: spec.kind.name().to_string(),
            pool_index: index,
            score: log_scores.as_ref().map_or(0.0, |s| s.scores[pos]),
            assigned_class: predictions[pos],
        });
    }

    // move queried indices from U to L, preserving U's ascending order
    let mut take = vec![false; state.unlabeled.len()];
    for &index in &picked {
        let pos = state.unlabeled.binary_search(&index).expect("validated above");
        take[pos] = true;
    }
    let mut keep = Vec::with_capacity(state.unlabeled.len() - batch);
    let mut kept_positions = Vec::with_capacity(state.unlabeled.len() - batch);
    for (pos, &index) in state.unlabeled.iter().enumerate() {
        if take[pos] {
            state.labeled.push(index);
        } else {
            keep.push(index);
            kept_positions.push(pos);
        }
    }
    state.unlabeled = keep;
    state.budget_used += batch;

    // pseudo-labels for the next round, recomputed from scratch
    state.pseudo_labeled.clear();
    if let Some(ceal) = &spec.ceal {
        let delta_t = ceal_threshold(ceal.delta0, ceal.decay_rate, state.round);
        match spec.uncertainty_source {
            UncertaintySource::Msal => {
                let alphas: Vec<f64> = {
                    let all = max_cosines(&features, clf.prototypes());
                    kept_positions.iter().map(|&p| all[p]).collect()
                };
                let preds: Vec<usize> = kept_positions.iter().map(|&p| predictions[p]).collect();
                state.pseudo_labeled =
                    ceal_pseudo_label_msal(&alphas, &preds, &state.unlabeled, delta_t)?;
            }
            _ => {
                let next_probs = probs.select(Axis(0), &kept_positions);
                state.pseudo_labeled =
                    ceal_pseudo_label_entropy(&next_probs, &state.unlabeled, delta_t)?;
            }
        }
    }

    state.round += 1;
    Ok(())
}

fn run_impl<E: Elem>(
    cfg: &ExperimentConfig,
    ds: &Dataset,
    options: &RunOptions,
) -> Result<(RunResult, ALState)> {
    cfg.validate(ds)?;
    if ds.test_len() == 0 {
        return Err(Error::invalid_argument("dataset has no test split to evaluate on"));
    }
    let total_rounds = cfg.rounds();
    if let Some(replay) = &options.replay {
        if replay.len() != total_rounds {
            return Err(Error::invalid_argument(format!(
                "replay log has {} rounds, config runs {total_rounds}",
                replay.len()
            )));
        }
    }

    let train_inputs = ds.train_inputs.mapv(E::from_f64);
    let test_inputs = ds.test_inputs.mapv(E::from_f64);
    let arch = Architecture::new(ds.input_dim(), cfg.hidden_dims.clone(), ds.num_classes);

    let (labeled, unlabeled) = split_initial(ds, cfg.initial_labeled, cfg.seed)?;
    let mut state = ALState::new(labeled, unlabeled);
    let mut select_rng = stream_rng(cfg.seed, Stream::Select, 0);
    let mut curve: Vec<RoundPoint> = Vec::with_capacity(total_rounds + 1);
    let mut classifier: Option<Classifier<E>> = None;

    for round in 0..=total_rounds {
        let started = Instant::now();

        if classifier.is_none() || !cfg.warm_start {
            classifier = Some(init_classifier(
                arch.clone(),
                ds.num_classes,
                cfg.rho,
                derive_seed(cfg.seed, Stream::ModelInit, round as u64),
            )?);
        }
        let clf = classifier.as_mut().expect("just initialized");

        let (batch_inputs, batch_labels) =
            gather_training(&train_inputs, &ds.train_labels, &state.labeled, &state.pseudo_labeled);
        clf.train(
            &batch_inputs.view(),
            &batch_labels,
            &TrainConfig {
                epochs: cfg.epochs,
                minibatch_size: cfg.minibatch_size,
                learning_rate: cfg.learning_rate,
                seed: derive_seed(cfg.seed, Stream::Shuffle, round as u64),
            },
        )?;

        let evaluated = round % cfg.eval_every == 0 || round == total_rounds;
        if evaluated {
            let test_preds = clf.predict(&test_inputs.view())?;
            let test_accuracy = accuracy(&test_preds, &ds.test_labels)?;
            let unlabeled_error = if state.unlabeled.is_empty() {
                f64::NAN
            } else {
                let pool_inputs = train_inputs.select(Axis(0), &state.unlabeled);
                let pool_preds = clf.predict(&pool_inputs.view())?;
                let hidden: Vec<usize> =
                    state.unlabeled.iter().map(|&i| ds.train_labels[i]).collect();
                unlabeled_error_rate(&pool_preds, &hidden)?
            };
            curve.push(RoundPoint {
                round,
                labeled_count: state.labeled.len(),
                test_accuracy,
                unlabeled_error,
                seconds: 0.0,
            });
        }

        if round < total_rounds {
            let replay_round = options
                .replay
                .as_ref()
                .map(|rounds| rounds[round].as_slice());
            let before_selection = state.unlabeled.clone();
            one_round(
                &mut state,
                clf,
                &cfg.strategy,
                cfg.batch,
                &train_inputs,
                &mut select_rng,
                replay_round,
            )?;
            if let Some(dir) = &options.embeddings_dir {
                dump_embeddings(dir, round, clf, &train_inputs, ds, &before_selection, &state)?;
            }
        }

        if evaluated {
            curve.last_mut().expect("pushed above").seconds = started.elapsed().as_secs_f64();
        }
    }

    let points: Vec<(f64, f64)> = curve
        .iter()
        .map(|p| (p.labeled_count as f64, p.test_accuracy))
        .collect();
    let aubc = aubc(&points)?;
    let final_accuracy = curve.last().expect("curve nonempty").test_accuracy;
    let result = RunResult {
        curve,
        aubc,
        final_accuracy,
        seed: cfg.seed,
        config_digest: cfg.digest(&ds.name),
    };
    Ok((result, state))
}

/// Rows and labels for training: the labeled set with oracle labels plus
/// any pseudo-labeled samples with their predicted labels.
fn gather_training<E: Elem>(
    inputs: &Array2<E>,
    oracle_labels: &[usize],
    labeled: &[usize],
    pseudo: &[(usize, usize)],
) -> (Array2<E>, Vec<usize>) {
    let mut rows = Vec::with_capacity(labeled.len() + pseudo.len());
    let mut labels = Vec::with_capacity(labeled.len() + pseudo.len());
    for &i in labeled {
        rows.push(i);
        labels.push(oracle_labels[i]);
    }
    for &(i, y) in pseudo {
        rows.push(i);
        labels.push(y);
    }
    (inputs.select(Axis(0), &rows), labels)
}

/// Per-round pool embedding dump: `index,label,selected,f0..f{C-2}`.
fn dump_embeddings<E: Elem>(
    dir: &Path,
    round: usize,
    clf: &Classifier<E>,
    train_inputs: &Array2<E>,
    ds: &Dataset,
    pool: &[usize],
    state: &ALState,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let pool_inputs = train_inputs.select(Axis(0), pool);
    let features = clf.embed_pool(&pool_inputs.view())?;
    let selected: std::collections::BTreeSet<usize> = state
        .query_log
        .iter()
        .filter(|r| r.round == round)
        .map(|r| r.pool_index)
        .collect();

    let mut file = std::io::BufWriter::new(std::fs::File::create(
        dir.join(format!("round_{round:03}.csv")),
    )?);
    write!(file, "index,label,selected")?;
    for j in 0..features.ncols() {
        write!(file, ",f{j}")?;
    }
    writeln!(file)?;
    for (pos, &index) in pool.iter().enumerate() {
        write!(
            file,
            "{index},{},{}",
            ds.train_labels[index],
            u8::from(selected.contains(&index))
        )?;
        for j in 0..features.ncols() {
            write!(file, ",{}", features[[pos, j]].to_f64())?;
        }
        writeln!(file)?;
    }
    Ok(())
}

/// Write `round,strategy,pool_index,score,assigned_class` rows.
pub fn write_query_log(path: &Path, log: &[QueryRecord]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["round", "strategy", "pool_index", "score", "assigned_class"])?;
    for record in log {
        writer.write_record([
            record.round.to_string(),
            record.strategy.clone(),
            record.pool_index.to_string(),
            format!("{:.17e}", record.score),
            record.assigned_class.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// Read a query log back, grouped into per-round index sets for replay.
pub fn read_query_log(path: &Path) -> Result<Vec<Vec<usize>>> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut rounds: Vec<Vec<usize>> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let round: usize = record
            .get(0)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::invalid_argument("query log: bad round column"))?;
        let index: usize = record
            .get(2)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::invalid_argument("query log: bad pool_index column"))?;
        if round >= rounds.len() {
            rounds.resize(round + 1, Vec::new());
        }
        rounds[round].push(index);
    }
    Ok(rounds)
}

/// Write `round,labeled,accuracy,unlabeled_error,seconds` rows.
pub fn write_round_metrics(path: &Path, curve: &[RoundPoint]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["round", "labeled", "accuracy", "unlabeled_error", "seconds"])?;
    for point in curve {
        writer.write_record([
            point.round.to_string(),
            point.labeled_count.to_string(),
            format!("{:.17e}", point.test_accuracy),
            format!("{:.17e}", point.unlabeled_error),
            format!("{:.6}", point.seconds),
        ])?;
    }
    writer.flush()?;
    Ok(())
}
