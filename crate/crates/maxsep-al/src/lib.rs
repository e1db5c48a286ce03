//! Pool-based active learning with fixed maximally separated class
//! prototypes.
//!
//! `C` classes are pinned to the vertices of a regular simplex on the unit
//! hypersphere in `C - 1` dimensions (pairwise cosine `-1/(C-1)`), and a
//! small feed-forward network learns features under that frozen head. The
//! geometry then drives acquisition twice over: cosine to the nearest
//! prototype scores uncertainty, and the prototypes double as cluster
//! centers for diversity-aware batch selection, replacing the clustering
//! step of classical combined strategies. Classical baselines (random,
//! least confidence, margin, entropy, k-means, k-center greedy, an
//! uncertainty-then-cluster combination) and cost-effective pseudo-labeling
//! run in the same harness for comparison.
//!
//! Everything is deterministic under a seed: runs with the same config and
//! seed reproduce query logs and learning curves bit-for-bit, and a
//! persisted query log can replay a run with selection bypassed.
//!
//! ## Library tour
//!
//! - [`prototypes`] — the separation matrix and its verification
//! - [`model`] — the classifier, manual backprop, Adam
//! - [`strategies`] — uncertainty scores and batch selectors
//! - [`al_loop`] — the acquisition loop and budget ledger
//! - [`data`] — MNIST IDX, CSV embeddings, synthetic pools, long tails
//! - [`metrics`] — accuracy, area under the budget curve, aggregation
//! - [`config`] / [`cli`] — experiment files, presets, subcommands
//!
//! ## Runnable examples
//!
//! One per capability, under `examples/`:
//!
//! ```text
//! cargo run --release --example build_prototypes
//! cargo run --release --example train_classifier
//! cargo run --release --example score_pool
//! cargo run --release --example compare_strategies
//! cargo run --release --example longtail_pool
//! cargo run --release --example ceal_pseudo_labels
//! cargo run --release --example beta_ablation
//! cargo run --release --example export_embeddings
//! cargo run --release --example mnist_experiment   # needs the MNIST files
//! ```
//!
//! The `maxsep-al` binary wraps the same machinery behind `run`, `sweep`,
//! `report` and `prototypes` subcommands; see the crate README.

pub mod al_loop;
pub mod cli;
pub mod config;
pub mod data;
pub mod error;
pub mod metrics;
pub mod model;
pub mod prototypes;
pub mod seeding;
pub mod strategies;

pub use al_loop::{run_experiment, run_experiment_replay, ALState, ExperimentConfig, Precision};
pub use data::Dataset;
pub use error::{Error, Result};
pub use metrics::{Aggregate, RunResult};
pub use model::{Architecture, Classifier, TrainConfig};
pub use prototypes::{build_prototype_family, build_prototypes, pairwise_cosine, verify_separation, PrototypeMatrix};
pub use strategies::{StrategyKind, StrategySpec, UncertaintySource};
