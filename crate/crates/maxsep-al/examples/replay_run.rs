//! Re-run an experiment from its persisted query log, bypassing selection,
//! and confirm the learning curve reproduces bit-exactly.
//!
//!     cargo run --release --example replay_run

use maxsep_al::al_loop::{run_experiment, run_experiment_replay, ExperimentConfig, Precision};
use maxsep_al::data::gen_gaussian;
use maxsep_al::{StrategyKind, StrategySpec};

fn main() -> maxsep_al::Result<()> {
    let ds = gen_gaussian(3, 2, 200, 2.5, 0.2, 71)?;
    let cfg = ExperimentConfig {
        initial_labeled: 20,
        batch: 10,
        budget: 100,
        strategy: StrategySpec::new(StrategyKind::MsalD).with_beta(5),
        hidden_dims: vec![12],
        rho: 1.0,
        epochs: 10,
        minibatch_size: 32,
        learning_rate: 0.01,
        warm_start: false,
        precision: Precision::F64,
        seed: 9,
        eval_every: 1,
    };

    let (original, state) = run_experiment(&cfg, &ds)?;
    println!("original run: aubc {:.6}", original.aubc);

    // group the query log into per-round index sets, as read_query_log would
    let mut rounds = vec![Vec::new(); cfg.rounds()];
    for record in &state.query_log {
        rounds[record.round].push(record.pool_index);
    }
    let (replayed, _) = run_experiment_replay(&cfg, &ds, rounds)?;
    println!("replayed run: aubc {:.6}", replayed.aubc);

    let identical = original
        .curve
        .iter()
        .zip(&replayed.curve)
        .all(|(a, b)| a.test_accuracy.to_bits() == b.test_accuracy.to_bits());
    println!("curves bit-identical: {identical}");
    Ok(())
}
