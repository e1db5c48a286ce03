//! The desk-scale MNIST benchmark: diversity-aware prototype selection
//! against random sampling, three seeds each.
//!
//!     cargo run --release --example mnist_experiment
//!
//! Looks for the four IDX files (optionally .gz) under `$MAXSEP_AL_DATA_DIR`,
//! `./data` or `./data/mnist`; see the README for where to get them.

use maxsep_al::al_loop::run_experiment;
use maxsep_al::config::{preset, DATA_DIR_ENV};
use maxsep_al::metrics::mean_std;
use maxsep_al::{StrategyKind, StrategySpec};

fn main() -> maxsep_al::Result<()> {
    let base = preset("mnist-desk")?;
    let dataset = match base.load_dataset(None) {
        Ok(ds) => ds,
        Err(e) => {
            eprintln!("{e}");
            eprintln!("place the MNIST IDX files under ./data/mnist or set ${DATA_DIR_ENV}");
            std::process::exit(1);
        }
    };
    println!(
        "mnist-desk: {} pool / {} test samples; 100 initial labels, 100 per round, budget 1000\n",
        dataset.train_len(),
        dataset.test_len()
    );

    for kind in [StrategyKind::Random, StrategyKind::Msal, StrategyKind::MsalD] {
        let mut aubcs = Vec::new();
        let mut faccs = Vec::new();
        for seed in 0..3u64 {
            let mut cfg = base.experiment(seed);
            cfg.strategy = StrategySpec::new(kind).with_beta(5);
            let (result, _) = run_experiment(&cfg, &dataset)?;
            aubcs.push(result.aubc);
            faccs.push(result.final_accuracy);
        }
        println!(
            "{:<8} aubc {:.4} ± {:.4}, final accuracy {:.4}",
            kind.name(),
            mean_std(&aubcs).0,
            mean_std(&aubcs).1,
            mean_std(&faccs).0
        );
    }
    Ok(())
}
