//! Run the full acquisition loop with several strategies on one synthetic
//! pool and tabulate area under the budget curve and final accuracy.
//!
//!     cargo run --release --example compare_strategies

use maxsep_al::al_loop::{run_experiment, ExperimentConfig, Precision};
use maxsep_al::data::gen_gaussian;
use maxsep_al::metrics::{aggregate, RunResult};
use maxsep_al::{StrategyKind, StrategySpec};

fn main() -> maxsep_al::Result<()> {
    let ds = gen_gaussian(4, 3, 250, 2.0, 0.2, 21)?;
    println!(
        "pool: {} train / {} test, {} classes; 20 labels per round, budget 200\n",
        ds.train_len(),
        ds.test_len(),
        ds.num_classes
    );

    let kinds = [
        StrategyKind::Random,
        StrategyKind::Entropy,
        StrategyKind::Kcenter,
        StrategyKind::Dbal,
        StrategyKind::Msal,
        StrategyKind::MsalD,
    ];
    println!("{:<10} {:>8} {:>8} {:>8}", "strategy", "aubc", "f-acc", "±aubc");
    for kind in kinds {
        let mut results: Vec<RunResult> = Vec::new();
        for seed in 0..3u64 {
            let cfg = ExperimentConfig {
                initial_labeled: 20,
                batch: 20,
                budget: 200,
                strategy: StrategySpec::new(kind).with_beta(5),
                hidden_dims: vec![16],
                rho: 1.0,
                epochs: 15,
                minibatch_size: 32,
                learning_rate: 0.01,
                warm_start: false,
                precision: Precision::F64,
                seed,
                eval_every: 1,
            };
            results.push(run_experiment(&cfg, &ds)?.0);
        }
        let agg = aggregate(&results)?;
        println!(
            "{:<10} {:>8.4} {:>8.4} {:>8.4}",
            kind.name(),
            agg.aubc_mean,
            agg.facc_mean,
            agg.aubc_std
        );
    }
    Ok(())
}
