//! Dump per-round pool embeddings (plus which samples were selected) as
//! CSV for external visualization.
//!
//!     cargo run --release --example export_embeddings

use maxsep_al::al_loop::{run_experiment_with, ExperimentConfig, Precision, RunOptions};
use maxsep_al::data::gen_gaussian;
use maxsep_al::{StrategyKind, StrategySpec};

fn main() -> maxsep_al::Result<()> {
    let ds = gen_gaussian(3, 2, 200, 2.5, 0.2, 61)?;
    let cfg = ExperimentConfig {
        initial_labeled: 20,
        batch: 20,
        budget: 100,
        strategy: StrategySpec::new(StrategyKind::MsalD).with_beta(5),
        hidden_dims: vec![12],
        rho: 1.0,
        epochs: 15,
        minibatch_size: 32,
        learning_rate: 0.01,
        warm_start: false,
        precision: Precision::F64,
        seed: 0,
        eval_every: 1,
    };

    let dir = std::env::temp_dir().join("maxsep-al-embeddings");
    let options = RunOptions {
        replay: None,
        embeddings_dir: Some(dir.clone()),
    };
    let (result, _) = run_experiment_with(&cfg, &ds, &options)?;
    println!("run finished: aubc {:.4}\n", result.aubc);

    println!("per-round embedding files under {}:", dir.display());
    let mut names: Vec<String> = std::fs::read_dir(&dir)?
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    for name in &names {
        println!("  {name}");
    }

    let first = std::fs::read_to_string(dir.join(&names[0]))?;
    println!("\nfirst rows of {} (index, oracle label, selected flag, feature coords):", names[0]);
    for line in first.lines().take(4) {
        println!("  {line}");
    }
    Ok(())
}
