//! Experiment configuration: a small sectioned key/value format, named
//! presets, and resolution into runnable experiment configs.
//!
//! ```text
//! preset = mnist-desk            # optional, before any section
//!
//! [dataset]
//! kind = mnist                   # mnist | csv | gaussian
//! dir = data/mnist
//!
//! [al]
//! initial = 100
//! batch = 100
//! budget = 1000
//! strategy = msal_d
//!
//! [model]
//! hidden_dims = 64,32
//! rho = 0.1
//!
//! [run]
//! seeds = 0,1,2
//! out_dir = runs/demo
//! ```
//!
//! Unknown keys and sections are hard errors, so typos never silently fall
//! back to defaults. Every default that fills a missing key is echoed into
//! `summary.json` with the rest of the resolved config.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::al_loop::{ExperimentConfig, Precision};
use crate::data::{gen_gaussian, load_csv_embeddings, load_mnist_idx, make_longtail, Dataset, ImbalanceSpec};
use crate::error::{Error, Result};
use crate::strategies::{CealSettings, StrategyKind, StrategySpec, UncertaintySource};

/// Environment variable naming the default data directory.
pub const DATA_DIR_ENV: &str = "MAXSEP_AL_DATA_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetKind {
    Mnist,
    Csv,
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub kind: DatasetKind,
    /// Directory holding the four canonical MNIST IDX files (optionally
    /// under an `mnist/` subdirectory, optionally gzipped).
    pub dir: Option<String>,
    /// Embeddings CSV path for `kind = csv`.
    pub path: Option<String>,
    pub classes: usize,
    pub dim: usize,
    pub per_class: usize,
    pub separation: f64,
    pub test_fraction: f64,
    pub data_seed: u64,
    /// Long-tail imbalance factor; 1 disables subsampling.
    pub imbalance: f64,
    pub imbalance_seed: u64,
    pub train_limit: Option<usize>,
    pub test_limit: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlConfig {
    pub initial: usize,
    pub batch: usize,
    pub budget: usize,
    pub strategy: StrategyKind,
    pub uncertainty_source: UncertaintySource,
    pub beta: usize,
    pub ceal_delta0: Option<f64>,
    /// Defaults to `ceal_delta0 / T` when CEAL is enabled.
    pub ceal_decay: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub hidden_dims: Vec<usize>,
    pub rho: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub minibatch: usize,
    pub warm_start: bool,
    pub precision: Precision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSection {
    pub seeds: Vec<u64>,
    pub eval_every: usize,
    pub out_dir: String,
    pub name: Option<String>,
    pub threads: Option<usize>,
}

/// A fully resolved configuration: preset applied, file keys folded in,
/// defaults filled. This is what `summary.json` echoes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub preset: Option<String>,
    pub dataset: DatasetConfig,
    pub al: AlConfig,
    pub model: ModelConfig,
    pub run: RunSection,
}

impl ResolvedConfig {
    /// Display name for run directories: explicit name, or dataset-strategy.
    pub fn run_name(&self) -> String {
        self.run.name.clone().unwrap_or_else(|| {
            format!("{}-{}", self.dataset_label(), self.al.strategy.name())
        })
    }

    pub fn dataset_label(&self) -> String {
        match self.dataset.kind {
            DatasetKind::Mnist => "mnist".to_string(),
            DatasetKind::Csv => self
                .dataset
                .path
                .as_deref()
                .and_then(|p| Path::new(p).file_stem().map(|s| s.to_string_lossy().into_owned()))
                .unwrap_or_else(|| "csv".to_string()),
            DatasetKind::Gaussian => format!("gaussian-c{}", self.dataset.classes),
        }
    }

    /// Acquisition rounds, `budget / batch`.
    pub fn rounds(&self) -> usize {
        self.al.budget.checked_div(self.al.batch).unwrap_or(0)
    }

    /// The strategy spec with CEAL defaults applied.
    pub fn strategy_spec(&self) -> StrategySpec {
        let mut spec = StrategySpec::new(self.al.strategy)
            .with_source(self.al.uncertainty_source)
            .with_beta(self.al.beta);
        if let Some(delta0) = self.al.ceal_delta0 {
            let decay = self
                .al
                .ceal_decay
                .unwrap_or_else(|| delta0 / self.rounds().max(1) as f64);
            spec = spec.with_ceal(CealSettings {
                delta0,
                decay_rate: decay,
            });
        }
        spec
    }

    /// Per-seed experiment config.
    pub fn experiment(&self, seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            initial_labeled: self.al.initial,
            batch: self.al.batch,
            budget: self.al.budget,
            strategy: self.strategy_spec(),
            hidden_dims: self.model.hidden_dims.clone(),
            rho: self.model.rho,
            epochs: self.model.epochs,
            minibatch_size: self.model.minibatch,
            learning_rate: self.model.learning_rate,
            warm_start: self.model.warm_start,
            precision: self.model.precision,
            seed,
            eval_every: self.run.eval_every,
        }
    }

    /// Load (and possibly subsample) the dataset this config names.
    pub fn load_dataset(&self, data_dir_override: Option<&Path>) -> Result<Dataset> {
        let ds = match self.dataset.kind {
            DatasetKind::Mnist => {
                let root = data_dir_override
                    .map(PathBuf::from)
                    .or_else(|| self.dataset.dir.clone().map(PathBuf::from))
                    .or_else(|| std::env::var(DATA_DIR_ENV).ok().map(PathBuf::from))
                    .unwrap_or_else(|| PathBuf::from("data"));
                let find = |base: &str| -> Result<PathBuf> {
                    let candidates = [
                        root.join(base),
                        root.join(format!("{base}.gz")),
                        root.join("mnist").join(base),
                        root.join("mnist").join(format!("{base}.gz")),
                    ];
                    candidates
                        .iter()
                        .find(|p| p.exists())
                        .cloned()
                        .ok_or_else(|| {
                            Error::config(format!(
                                "MNIST file `{base}` not found under {} (set [dataset] dir, --data-dir or ${DATA_DIR_ENV})",
                                root.display()
                            ))
                        })
                };
                load_mnist_idx(
                    &find("train-images-idx3-ubyte")?,
                    &find("train-labels-idx1-ubyte")?,
                    &find("t10k-images-idx3-ubyte")?,
                    &find("t10k-labels-idx1-ubyte")?,
                )?
            }
            DatasetKind::Csv => {
                let path = self.dataset.path.as_deref().ok_or_else(|| {
                    Error::config("dataset.path is required for kind = csv".to_string())
                })?;
                load_csv_embeddings(Path::new(path))?
            }
            DatasetKind::Gaussian => gen_gaussian(
                self.dataset.classes,
                self.dataset.dim,
                self.dataset.per_class,
                self.dataset.separation,
                self.dataset.test_fraction,
                self.dataset.data_seed,
            )?,
        };

        let ds = if self.dataset.imbalance < 1.0 {
            make_longtail(
                &ds,
                &ImbalanceSpec::exponential(self.dataset.imbalance),
                self.dataset.imbalance_seed,
            )?
        } else {
            ds
        };
        Ok(ds.limit(self.dataset.train_limit, self.dataset.test_limit, self.dataset.data_seed))
    }
}

/// Parse and resolve a config file.
pub fn load_config(path: &Path) -> Result<ResolvedConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
    resolve_config(&text)
}

/// Resolve config text: preset base, file overrides, defaults.
pub fn resolve_config(text: &str) -> Result<ResolvedConfig> {
    let mut raw = parse_sections(text)?;
    let preset_name = raw.remove(&("".to_string(), "preset".to_string()));
    let mut cfg = match preset_name.as_deref() {
        Some(name) => preset(name)?,
        None => bare_defaults(),
    };
    cfg.preset = preset_name;

    // fold file keys over the base; every remove() consumes the key, so
    // whatever is left at the end is unknown
    let mut take = |section: &str, key: &str| raw.remove(&(section.to_string(), key.to_string()));

    if let Some(v) = take("dataset", "kind") {
        cfg.dataset.kind = match v.as_str() {
            "mnist" => DatasetKind::Mnist,
            "csv" => DatasetKind::Csv,
            "gaussian" => DatasetKind::Gaussian,
            other => return Err(Error::config(format!("dataset.kind: unknown kind `{other}`"))),
        };
    }
    if let Some(v) = take("dataset", "dir") {
        cfg.dataset.dir = Some(v);
    }
    if let Some(v) = take("dataset", "path") {
        cfg.dataset.path = Some(v);
    }
    if let Some(v) = take("dataset", "classes") {
        cfg.dataset.classes = parse_num(&v, "dataset.classes")?;
    }
    if let Some(v) = take("dataset", "dim") {
        cfg.dataset.dim = parse_num(&v, "dataset.dim")?;
    }
    if let Some(v) = take("dataset", "per_class") {
        cfg.dataset.per_class = parse_num(&v, "dataset.per_class")?;
    }
    if let Some(v) = take("dataset", "separation") {
        cfg.dataset.separation = parse_num(&v, "dataset.separation")?;
    }
    if let Some(v) = take("dataset", "test_fraction") {
        cfg.dataset.test_fraction = parse_num(&v, "dataset.test_fraction")?;
    }
    if let Some(v) = take("dataset", "data_seed") {
        cfg.dataset.data_seed = parse_num(&v, "dataset.data_seed")?;
    }
    if let Some(v) = take("dataset", "imbalance") {
        cfg.dataset.imbalance = parse_num(&v, "dataset.imbalance")?;
    }
    if let Some(v) = take("dataset", "imbalance_seed") {
        cfg.dataset.imbalance_seed = parse_num(&v, "dataset.imbalance_seed")?;
    }
    if let Some(v) = take("dataset", "train_limit") {
        cfg.dataset.train_limit = Some(parse_num(&v, "dataset.train_limit")?);
    }
    if let Some(v) = take("dataset", "test_limit") {
        cfg.dataset.test_limit = Some(parse_num(&v, "dataset.test_limit")?);
    }

    if let Some(v) = take("al", "initial") {
        cfg.al.initial = parse_num(&v, "al.initial")?;
    }
    if let Some(v) = take("al", "batch") {
        cfg.al.batch = parse_num(&v, "al.batch")?;
    }
    if let Some(v) = take("al", "budget") {
        cfg.al.budget = parse_num(&v, "al.budget")?;
    }
    if let Some(v) = take("al", "strategy") {
        cfg.al.strategy = parse_strategy(&v)?;
        // keep the per-kind default source unless the file names one
        cfg.al.uncertainty_source = StrategySpec::new(cfg.al.strategy).uncertainty_source;
    }
    if let Some(v) = take("al", "uncertainty_source") {
        cfg.al.uncertainty_source = match v.as_str() {
            "msal" => UncertaintySource::Msal,
            "least_conf" => UncertaintySource::LeastConf,
            "margin" => UncertaintySource::Margin,
            "entropy" => UncertaintySource::Entropy,
            other => {
                return Err(Error::config(format!(
                    "al.uncertainty_source: unknown source `{other}`"
                )))
            }
        };
    }
    if let Some(v) = take("al", "beta") {
        cfg.al.beta = parse_num(&v, "al.beta")?;
    }
    if let Some(v) = take("al", "ceal_delta0") {
        cfg.al.ceal_delta0 = Some(parse_num(&v, "al.ceal_delta0")?);
    }
    if let Some(v) = take("al", "ceal_decay") {
        cfg.al.ceal_decay = Some(parse_num(&v, "al.ceal_decay")?);
    }

    if let Some(v) = take("model", "hidden_dims") {
        cfg.model.hidden_dims = parse_list(&v, "model.hidden_dims")?;
    }
    if let Some(v) = take("model", "rho") {
        cfg.model.rho = parse_num(&v, "model.rho")?;
    }
    if let Some(v) = take("model", "epochs") {
        cfg.model.epochs = parse_num(&v, "model.epochs")?;
    }
    if let Some(v) = take("model", "learning_rate") {
        cfg.model.learning_rate = parse_num(&v, "model.learning_rate")?;
    }
    if let Some(v) = take("model", "minibatch") {
        cfg.model.minibatch = parse_num(&v, "model.minibatch")?;
    }
    if let Some(v) = take("model", "warm_start") {
        cfg.model.warm_start = parse_bool(&v, "model.warm_start")?;
    }
    if let Some(v) = take("model", "precision") {
        cfg.model.precision = match v.as_str() {
            "f32" => Precision::F32,
            "f64" => Precision::F64,
            other => return Err(Error::config(format!("model.precision: `{other}` is not f32 or f64"))),
        };
    }

    if let Some(v) = take("run", "seeds") {
        cfg.run.seeds = parse_list(&v, "run.seeds")?;
        if cfg.run.seeds.is_empty() {
            return Err(Error::config("run.seeds: need at least one seed".to_string()));
        }
    }
    if let Some(v) = take("run", "eval_every") {
        cfg.run.eval_every = parse_num(&v, "run.eval_every")?;
    }
    if let Some(v) = take("run", "out_dir") {
        cfg.run.out_dir = v;
    }
    if let Some(v) = take("run", "name") {
        cfg.run.name = Some(v);
    }
    if let Some(v) = take("run", "threads") {
        cfg.run.threads = Some(parse_num(&v, "run.threads")?);
    }

    if let Some(((section, key), _)) = raw.iter().next() {
        return Err(Error::config(format!(
            "unknown key `{key}` in section [{section}]"
        )));
    }

    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &ResolvedConfig) -> Result<()> {
    if cfg.al.batch == 0 || cfg.al.budget == 0 || cfg.al.initial == 0 {
        return Err(Error::config(
            "al.initial, al.batch and al.budget must all be positive".to_string(),
        ));
    }
    if !cfg.al.budget.is_multiple_of(cfg.al.batch) {
        return Err(Error::config(format!(
            "al.budget {} is not a multiple of al.batch {}",
            cfg.al.budget, cfg.al.batch
        )));
    }
    if matches!(cfg.dataset.kind, DatasetKind::Csv) && cfg.dataset.path.is_none() {
        return Err(Error::config("dataset.path is required for kind = csv".to_string()));
    }
    cfg.strategy_spec().validate().map_err(|e| Error::config(e.to_string()))?;
    Ok(())
}

fn parse_sections(text: &str) -> Result<BTreeMap<(String, String), String>> {
    const SECTIONS: [&str; 4] = ["dataset", "al", "model", "run"];
    let mut out = BTreeMap::new();
    let mut section = String::new();
    for (lineno, raw_line) in text.lines().enumerate() {
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            if !SECTIONS.contains(&name) {
                return Err(Error::config(format!(
                    "line {}: unknown section [{name}]",
                    lineno + 1
                )));
            }
            section = name.to_string();
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::config(format!(
                "line {}: expected `key = value`, got `{line}`",
                lineno + 1
            )));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() {
            return Err(Error::config(format!("line {}: empty key", lineno + 1)));
        }
        if section.is_empty() && key != "preset" {
            return Err(Error::config(format!(
                "line {}: key `{key}` appears before any section",
                lineno + 1
            )));
        }
        if out.insert((section.clone(), key.clone()), value).is_some() {
            let place = if section.is_empty() { key.clone() } else { format!("{section}.{key}") };
            return Err(Error::config(format!("line {}: duplicate key `{place}`", lineno + 1)));
        }
    }
    Ok(out)
}

fn parse_num<T: std::str::FromStr>(value: &str, key: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::config(format!("{key}: cannot parse `{value}`")))
}

fn parse_bool(value: &str, key: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(Error::config(format!("{key}: `{other}` is not a boolean"))),
    }
}

fn parse_list<T: std::str::FromStr>(value: &str, key: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| Error::config(format!("{key}: cannot parse `{s}`"))))
        .collect()
}

fn parse_strategy(value: &str) -> Result<StrategyKind> {
    Ok(match value {
        "random" => StrategyKind::Random,
        "least_conf" => StrategyKind::LeastConf,
        "margin" => StrategyKind::Margin,
        "entropy" => StrategyKind::Entropy,
        "kmeans" => StrategyKind::Kmeans,
        "kcenter" => StrategyKind::Kcenter,
        "dbal" => StrategyKind::Dbal,
        "msal" => StrategyKind::Msal,
        "msal_d" => StrategyKind::MsalD,
        other => return Err(Error::config(format!("al.strategy: unknown strategy `{other}`"))),
    })
}

/// Defaults for a preset-less config. Dataset kind and the AL sizes have
/// no sane universal defaults, so they must come from the file; the zeros
/// here fail validation with a pointed message if left unset.
fn bare_defaults() -> ResolvedConfig {
    ResolvedConfig {
        preset: None,
        dataset: DatasetConfig {
            kind: DatasetKind::Gaussian,
            dir: None,
            path: None,
            classes: 4,
            dim: 3,
            per_class: 200,
            separation: 2.5,
            test_fraction: 0.2,
            data_seed: 0,
            imbalance: 1.0,
            imbalance_seed: 0,
            train_limit: None,
            test_limit: None,
        },
        al: AlConfig {
            initial: 0,
            batch: 0,
            budget: 0,
            strategy: StrategyKind::Random,
            uncertainty_source: UncertaintySource::Msal,
            beta: 10,
            ceal_delta0: None,
            ceal_decay: None,
        },
        model: ModelConfig {
            hidden_dims: vec![128, 64],
            rho: 1.0,
            epochs: 20,
            learning_rate: 0.001,
            minibatch: 64,
            warm_start: false,
            precision: Precision::F64,
        },
        run: RunSection {
            seeds: vec![0, 1, 2],
            eval_every: 1,
            out_dir: "runs/experiment".to_string(),
            name: None,
            threads: None,
        },
    }
}

/// Named presets. The `*-paper` presets mirror published experiment sizes
/// but run on this crate's MLP learner, so absolute published numbers are
/// not expected to reproduce; they warn on use.
pub fn preset(name: &str) -> Result<ResolvedConfig> {
    let mut cfg = bare_defaults();
    cfg.run.name = Some(name.to_string());
    cfg.run.out_dir = format!("runs/{name}");
    match name {
        "mnist-paper" => {
            cfg.dataset.kind = DatasetKind::Mnist;
            cfg.al = AlConfig {
                initial: 500,
                batch: 250,
                budget: 10_000,
                strategy: StrategyKind::MsalD,
                uncertainty_source: UncertaintySource::Msal,
                beta: 5,
                ceal_delta0: None,
                ceal_decay: None,
            };
            cfg.model.hidden_dims = vec![256, 128];
            cfg.model.rho = 0.1;
            cfg.model.epochs = 20;
            warn_full_scale(name);
        }
        "mnist-desk" => {
            cfg.dataset.kind = DatasetKind::Mnist;
            cfg.dataset.train_limit = Some(5_000);
            cfg.dataset.test_limit = Some(5_000);
            cfg.al = AlConfig {
                initial: 100,
                batch: 100,
                budget: 1_000,
                strategy: StrategyKind::MsalD,
                uncertainty_source: UncertaintySource::Msal,
                beta: 5,
                ceal_delta0: None,
                ceal_decay: None,
            };
            cfg.model.hidden_dims = vec![64, 32];
            cfg.model.rho = 0.1;
            cfg.model.epochs = 20;
            cfg.model.learning_rate = 0.003;
            cfg.model.minibatch = 32;
        }
        "gaussian-desk" => {
            cfg.al = AlConfig {
                initial: 20,
                batch: 20,
                budget: 200,
                strategy: StrategyKind::MsalD,
                uncertainty_source: UncertaintySource::Msal,
                beta: 5,
                ceal_delta0: None,
                ceal_decay: None,
            };
            cfg.model.hidden_dims = vec![16];
            cfg.model.epochs = 15;
        }
        "svhn-paper" | "cifar10-paper" | "cifar100-paper" | "tinyimagenet-paper" => {
            cfg.dataset.kind = DatasetKind::Csv;
            let (budget, epochs, beta) = match name {
                "svhn-paper" => (20_000, 20, 5),
                "cifar10-paper" => (40_000, 30, 10),
                "cifar100-paper" => (40_000, 40, 10),
                _ => (40_000, 40, 10),
            };
            let initial = if name == "svhn-paper" { 500 } else { 1_000 };
            let batch = if name == "svhn-paper" { 250 } else { 500 };
            cfg.al = AlConfig {
                initial,
                batch,
                budget,
                strategy: StrategyKind::MsalD,
                uncertainty_source: UncertaintySource::Msal,
                beta,
                ceal_delta0: None,
                ceal_decay: None,
            };
            cfg.model.hidden_dims = vec![256, 128];
            cfg.model.epochs = epochs;
            warn_full_scale(name);
        }
        other => {
            return Err(Error::config(format!(
                "unknown preset `{other}`; available: mnist-paper, mnist-desk, gaussian-desk, svhn-paper, cifar10-paper, cifar100-paper, tinyimagenet-paper"
            )))
        }
    }
    Ok(cfg)
}

fn warn_full_scale(name: &str) {
    eprintln!(
        "warning: preset `{name}` mirrors a published experiment that used a convolutional \
         backbone; this crate's MLP learner will not reproduce published absolute numbers"
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_resolves_with_defaults_echoed() {
        let cfg = resolve_config(
            "[dataset]\nkind = gaussian\n[al]\ninitial = 20\nbatch = 10\nbudget = 50\nstrategy = msal\n",
        )
        .unwrap();
        assert_eq!(cfg.al.beta, 10);
        assert_eq!(cfg.model.minibatch, 64);
        assert_eq!(cfg.run.seeds, vec![0, 1, 2]);
        assert_eq!(cfg.model.precision, Precision::F64);
        assert_eq!(cfg.run_name(), "gaussian-c4-msal");
    }

    #[test]
    fn unknown_keys_and_sections_are_rejected() {
        let err = resolve_config("[al]\nbatch_size = 5\n").unwrap_err();
        assert!(err.to_string().contains("batch_size"), "{err}");

        let err = resolve_config("[alx]\nbatch = 5\n").unwrap_err();
        assert!(err.to_string().contains("[alx]"), "{err}");

        let err = resolve_config("[al]\nbatch = 5\nbatch = 6\n").unwrap_err();
        assert!(err.to_string().contains("duplicate"), "{err}");
    }

    #[test]
    fn missing_required_keys_fail_validation() {
        let err = resolve_config("[dataset]\nkind = gaussian\n").unwrap_err();
        assert!(err.to_string().contains("positive"), "{err}");

        let err = resolve_config(
            "[dataset]\nkind = csv\n[al]\ninitial = 5\nbatch = 5\nbudget = 10\nstrategy = random\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("dataset.path"), "{err}");
    }

    #[test]
    fn ragged_budget_is_rejected() {
        let err = resolve_config(
            "[dataset]\nkind = gaussian\n[al]\ninitial = 5\nbatch = 7\nbudget = 50\nstrategy = random\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("multiple"), "{err}");
    }

    #[test]
    fn presets_apply_and_files_override_them() {
        let cfg = resolve_config("preset = mnist-desk\n[al]\nstrategy = random\n[run]\nseeds = 7\n").unwrap();
        assert_eq!(cfg.preset.as_deref(), Some("mnist-desk"));
        assert_eq!(cfg.al.initial, 100);
        assert_eq!(cfg.al.budget, 1_000);
        assert_eq!(cfg.al.beta, 5);
        assert_eq!(cfg.model.rho, 0.1);
        assert_eq!(cfg.al.strategy, StrategyKind::Random);
        assert_eq!(cfg.run.seeds, [7]);
        assert_eq!(cfg.dataset.train_limit, Some(5_000));

        assert!(resolve_config("preset = nonsense\n").is_err());
    }

    #[test]
    fn paper_presets_mirror_the_published_sizes() {
        let mnist = preset("mnist-paper").unwrap();
        assert_eq!(
            (mnist.al.initial, mnist.al.batch, mnist.al.budget, mnist.model.epochs),
            (500, 250, 10_000, 20)
        );
        assert_eq!(mnist.rounds(), 40);
        assert_eq!(mnist.model.rho, 0.1);
        assert_eq!(mnist.al.beta, 5);

        let c100 = preset("cifar100-paper").unwrap();
        assert_eq!(
            (c100.al.initial, c100.al.batch, c100.al.budget, c100.model.epochs),
            (1_000, 500, 40_000, 40)
        );
        assert_eq!(c100.model.rho, 1.0);
        assert_eq!(c100.al.beta, 10);
    }

    #[test]
    fn ceal_decay_defaults_to_delta_over_rounds() {
        let cfg = resolve_config(
            "[dataset]\nkind = gaussian\n[al]\ninitial = 20\nbatch = 10\nbudget = 50\nstrategy = msal\nceal_delta0 = 0.1\n",
        )
        .unwrap();
        let spec = cfg.strategy_spec();
        let ceal = spec.ceal.unwrap();
        assert_eq!(ceal.delta0, 0.1);
        assert!((ceal.decay_rate - 0.1 / 5.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_configs_load_and_respect_imbalance() {
        let cfg = resolve_config(
            "[dataset]\nkind = gaussian\nclasses = 3\ndim = 2\nper_class = 60\ntest_fraction = 0.2\nimbalance = 0.5\n[al]\ninitial = 10\nbatch = 5\nbudget = 20\nstrategy = random\n",
        )
        .unwrap();
        let ds = cfg.load_dataset(None).unwrap();
        let mut counts = [0usize; 3];
        for &y in &ds.train_labels {
            counts[y] += 1;
        }
        assert_eq!(counts[0], 48);
        assert_eq!(counts[2], 24); // 48 * 0.5
        assert!(counts[0] > counts[1] && counts[1] > counts[2]);
    }

    #[test]
    fn per_seed_experiments_differ_only_in_seed() {
        let cfg = resolve_config(
            "[dataset]\nkind = gaussian\n[al]\ninitial = 20\nbatch = 10\nbudget = 50\nstrategy = msal_d\n",
        )
        .unwrap();
        let a = cfg.experiment(0);
        let b = cfg.experiment(1);
        assert_eq!(a.seed, 0);
        assert_eq!(b.seed, 1);
        let mut b_with_a_seed = b.clone();
        b_with_a_seed.seed = 0;
        assert_eq!(a, b_with_a_seed);
    }
}
