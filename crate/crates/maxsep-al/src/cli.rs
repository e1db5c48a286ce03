//! Command-line entry points: `run`, `sweep`, `report`, `prototypes`.
//!
//! `run` executes one configured experiment per seed (seeds in parallel),
//! writing `round_metrics.csv`, `query_log.csv` and `summary.json` per run
//! plus an `aggregate.json`. `sweep` repeats that over a hyperparameter
//! grid, `report` folds summary files into a comparison table, and
//! `prototypes` exports the separation matrix for inspection.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::al_loop::{
    run_experiment_with, write_query_log, write_round_metrics, ExperimentConfig, RunOptions,
};
use crate::config::{load_config, ResolvedConfig};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::metrics::{aggregate, mean_std, Aggregate, RunResult};
use crate::prototypes::{build_prototypes, pairwise_cosine, verify_separation};

#[derive(Debug, Parser)]
#[command(name = "maxsep-al", version, about = "Pool-based active learning with maximally separated class prototypes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment described by a config file, once per seed.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overwrite an existing non-empty output directory.
        #[arg(long)]
        force: bool,
        /// Directory holding dataset files (overrides config and env).
        #[arg(long)]
        data_dir: Option<PathBuf>,
        /// Dump per-round pool embeddings as CSV under this directory.
        #[arg(long)]
        dump_embeddings: Option<PathBuf>,
        /// Worker threads for parallel seeds (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Clone the base config across a hyperparameter grid and run each.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        param: SweepParam,
        /// Comma-separated values to sweep.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        force: bool,
        #[arg(long)]
        data_dir: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Summarize every summary.json under a directory as CSV.
    Report {
        #[arg(long)]
        dir: PathBuf,
        /// Write the table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the prototype matrix for C classes as CSV.
    Prototypes {
        #[arg(long)]
        classes: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    Beta,
    Batch,
}

/// One run's summary.json payload.
#[derive(Debug, Serialize, Deserialize)]
pub struct Summary {
    pub run_name: String,
    pub dataset: String,
    pub strategy: String,
    pub seed: u64,
    pub aubc: f64,
    pub final_accuracy: f64,
    pub code_version: String,
    pub config_digest: String,
    /// Fully resolved config, defaults included.
    pub config: ResolvedConfig,
    pub experiment: ExperimentConfig,
    pub total_seconds: f64,
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            out,
            force,
            data_dir,
            dump_embeddings,
            threads,
        } => cmd_run(&config, out, force, data_dir, dump_embeddings, threads),
        Command::Sweep {
            config,
            param,
            values,
            out,
            force,
            data_dir,
            threads,
        } => cmd_sweep(&config, param, &values, out, force, data_dir, threads),
        Command::Report { dir, out } => cmd_report(&dir, out),
        Command::Prototypes { classes, out } => cmd_prototypes(classes, &out),
    }
}

pub fn cmd_run(
    config_path: &Path,
    out: Option<PathBuf>,
    force: bool,
    data_dir: Option<PathBuf>,
    dump_embeddings: Option<PathBuf>,
    threads: Option<usize>,
) -> Result<()> {
    let mut cfg = load_config(config_path)?;
    if let Some(out) = out {
        cfg.run.out_dir = out.display().to_string();
    }
    let out_root = PathBuf::from(&cfg.run.out_dir);
    prepare_out_dir(&out_root, force)?;

    let dataset = cfg.load_dataset(data_dir.as_deref())?;
    let results = execute_seeds(&cfg, &dataset, &out_root, dump_embeddings.as_deref(), threads)?;

    let agg = aggregate(&results)?;
    write_aggregate(&out_root.join("aggregate.json"), &cfg, &agg)?;
    println!(
        "{}: {} seeds, aubc {:.4} +- {:.4}, final accuracy {:.4} +- {:.4}",
        cfg.run_name(),
        agg.runs,
        agg.aubc_mean,
        agg.aubc_std,
        agg.facc_mean,
        agg.facc_std
    );
    Ok(())
}

/// Run every seed of `cfg` against `dataset`, writing per-run artifacts
/// under `out_root`. Seeds execute in parallel; results come back in seed
/// order.
fn execute_seeds(
    cfg: &ResolvedConfig,
    dataset: &Dataset,
    out_root: &Path,
    dump_embeddings: Option<&Path>,
    threads: Option<usize>,
) -> Result<Vec<RunResult>> {
    std::fs::create_dir_all(out_root)?;
    let threads = threads.or(cfg.run.threads).unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::invalid_state(format!("cannot build thread pool: {e}")))?;

    let seeds = cfg.run.seeds.clone();
    pool.install(|| {
        seeds
            .par_iter()
            .map(|&seed| run_one_seed(cfg, dataset, seed, out_root, dump_embeddings))
            .collect::<Result<Vec<RunResult>>>()
    })
}

fn run_one_seed(
    cfg: &ResolvedConfig,
    dataset: &Dataset,
    seed: u64,
    out_root: &Path,
    dump_embeddings: Option<&Path>,
) -> Result<RunResult> {
    let run_name = format!("{}-seed{seed}", cfg.run_name());
    let run_dir = out_root.join(&run_name);
    std::fs::create_dir_all(&run_dir)?;

    let experiment = cfg.experiment(seed);
    let options = RunOptions {
        replay: None,
        embeddings_dir: dump_embeddings.map(|base| base.join(&run_name)),
    };

    let started = Instant::now();
    let (result, state) = run_experiment_with(&experiment, dataset, &options)?;
    let total_seconds = started.elapsed().as_secs_f64();

    write_round_metrics(&run_dir.join("round_metrics.csv"), &result.curve)?;
    write_query_log(&run_dir.join("query_log.csv"), &state.query_log)?;

    let summary = Summary {
        run_name: run_name.clone(),
        dataset: cfg.dataset_label(),
        strategy: cfg.al.strategy.name().to_string(),
        seed,
        aubc: result.aubc,
        final_accuracy: result.final_accuracy,
        code_version: format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
        config_digest: result.config_digest.clone(),
        config: cfg.clone(),
        experiment,
        total_seconds,
    };
    let mut file = std::fs::File::create(run_dir.join("summary.json"))?;
    file.write_all(serde_json::to_string_pretty(&summary)?.as_bytes())?;
    file.write_all(b"\n")?;

    println!(
        "{run_name}: aubc {:.4}, final accuracy {:.4} ({total_seconds:.1}s)",
        result.aubc, result.final_accuracy
    );
    Ok(result)
}

fn prepare_out_dir(out_root: &Path, force: bool) -> Result<()> {
    if out_root.exists() {
        let occupied = std::fs::read_dir(out_root)?.next().is_some();
        if occupied && !force {
            return Err(Error::invalid_state(format!(
                "output directory {} already has contents; pass --force to overwrite",
                out_root.display()
            )));
        }
    }
    Ok(())
}

fn write_aggregate(path: &Path, cfg: &ResolvedConfig, agg: &Aggregate) -> Result<()> {
    #[derive(Serialize)]
    struct AggregateFile<'a> {
        run_name: String,
        dataset: String,
        strategy: &'a str,
        aggregate: &'a Aggregate,
        config: &'a ResolvedConfig,
    }
    let payload = AggregateFile {
        run_name: cfg.run_name(),
        dataset: cfg.dataset_label(),
        strategy: cfg.al.strategy.name(),
        aggregate: agg,
        config: cfg,
    };
    let mut file = std::fs::File::create(path)?;
    file.write_all(serde_json::to_string_pretty(&payload)?.as_bytes())?;
    file.write_all(b"\n")?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_sweep(
    config_path: &Path,
    param: SweepParam,
    values: &[usize],
    out: Option<PathBuf>,
    force: bool,
    data_dir: Option<PathBuf>,
    threads: Option<usize>,
) -> Result<()> {
    let base = load_config(config_path)?;
    let out_root = out.unwrap_or_else(|| PathBuf::from(format!("{}-sweep", base.run.out_dir)));
    prepare_out_dir(&out_root, force)?;
    std::fs::create_dir_all(&out_root)?;

    let dataset = base.load_dataset(data_dir.as_deref())?;
    let param_name = match param {
        SweepParam::Beta => "beta",
        SweepParam::Batch => "batch",
    };

    let mut rows: Vec<(usize, f64, f64)> = Vec::new();
    for &value in values {
        let mut cfg = base.clone();
        match param {
            SweepParam::Beta => cfg.al.beta = value,
            SweepParam::Batch => cfg.al.batch = value,
        }
        if cfg.al.batch == 0 || cfg.al.budget % cfg.al.batch != 0 {
            eprintln!(
                "warning: skipping {param_name} = {value}: budget {} is not a multiple of batch {}",
                cfg.al.budget, cfg.al.batch
            );
            continue;
        }
        if cfg.al.initial + cfg.al.budget > dataset.train_len() {
            eprintln!(
                "warning: skipping {param_name} = {value}: initial + budget exceeds the pool"
            );
            continue;
        }
        cfg.run.name = Some(format!("{}-{param_name}{value}", base.run_name()));
        let value_dir = out_root.join(format!("{param_name}-{value}"));
        let results = execute_seeds(&cfg, &dataset, &value_dir, None, threads)?;
        let agg = aggregate(&results)?;
        write_aggregate(&value_dir.join("aggregate.json"), &cfg, &agg)?;
        println!(
            "{param_name} = {value}: aubc {:.4} +- {:.4}, final accuracy {:.4}",
            agg.aubc_mean, agg.aubc_std, agg.facc_mean
        );
        rows.push((value, agg.aubc_mean, agg.facc_mean));
    }

    let mut writer = csv::Writer::from_path(out_root.join("sweep.csv"))?;
    writer.write_record(["value", "aubc_mean", "facc_mean"])?;
    for (value, aubc_mean, facc_mean) in &rows {
        writer.write_record([
            value.to_string(),
            format!("{aubc_mean:.6}"),
            format!("{facc_mean:.6}"),
        ])?;
    }
    writer.flush()?;
    println!("sweep table: {}", out_root.join("sweep.csv").display());
    Ok(())
}

pub fn cmd_report(dir: &Path, out: Option<PathBuf>) -> Result<()> {
    let mut paths = Vec::new();
    collect_summaries(dir, &mut paths)?;
    paths.sort();

    // (strategy, dataset) -> (aubc values, facc values)
    let mut groups: std::collections::BTreeMap<(String, String), (Vec<f64>, Vec<f64>)> =
        std::collections::BTreeMap::new();
    for path in &paths {
        let parsed: std::result::Result<Summary, _> = std::fs::read_to_string(path)
            .map_err(Error::from)
            .and_then(|text| serde_json::from_str(&text).map_err(Error::from));
        match parsed {
            Ok(summary) => {
                let entry = groups
                    .entry((summary.strategy, summary.dataset))
                    .or_default();
                entry.0.push(summary.aubc);
                entry.1.push(summary.final_accuracy);
            }
            Err(e) => eprintln!("warning: skipping {}: {e}", path.display()),
        }
    }

    let mut table = String::from("strategy,dataset,aubc_mean,aubc_std,facc_mean,facc_std\n");
    for ((strategy, dataset), (aubcs, faccs)) in &groups {
        let (am, astd) = mean_std(aubcs);
        let (fm, fstd) = mean_std(faccs);
        table.push_str(&format!(
            "{strategy},{dataset},{am:.6},{astd:.6},{fm:.6},{fstd:.6}\n"
        ));
    }

    match out {
        Some(path) => std::fs::write(path, table)?,
        None => print!("{table}"),
    }
    Ok(())
}

fn collect_summaries(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    if !dir.is_dir() {
        return Err(Error::invalid_argument(format!(
            "{} is not a directory",
            dir.display()
        )));
    }
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            collect_summaries(&path, out)?;
        } else if path.file_name().is_some_and(|n| n == "summary.json") {
            out.push(path);
        }
    }
    Ok(())
}

/// Write the `(C-1) x C` prototype matrix as CSV with 17 significant
/// digits per value.
pub fn cmd_prototypes(classes: usize, out: &Path) -> Result<()> {
    let prototypes = build_prototypes(classes)?;
    let report = verify_separation(&prototypes, 1e-9);
    if !report.pass {
        return Err(Error::invalid_state(format!(
            "constructed matrix failed verification: norm error {}, angle error {}",
            report.max_norm_error, report.max_angle_error
        )));
    }

    let values = prototypes.values();
    let mut file = std::io::BufWriter::new(std::fs::File::create(out)?);
    for i in 0..values.nrows() {
        let row: Vec<String> = (0..values.ncols())
            .map(|j| format!("{:.16e}", values[[i, j]]))
            .collect();
        writeln!(file, "{}", row.join(","))?;
    }
    file.into_inner()
        .map_err(|e| Error::invalid_state(format!("flush failed: {e}")))?;

    let cosines = pairwise_cosine(&prototypes);
    println!(
        "{classes} classes: wrote {}x{} matrix to {}; pairwise cosine {:.6} (target {:.6}), max errors {:.2e}/{:.2e}",
        values.nrows(),
        values.ncols(),
        out.display(),
        cosines[[0, 1]],
        -1.0 / (classes as f64 - 1.0),
        report.max_norm_error,
        report.max_angle_error
    );
    Ok(())
}
