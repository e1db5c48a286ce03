//! Ablate the pre-filter factor: how many uncertain candidates the
//! diversity stage gets to choose from.
//!
//!     cargo run --release --example beta_ablation

use maxsep_al::al_loop::{run_experiment, ExperimentConfig, Precision};
use maxsep_al::data::gen_gaussian;
use maxsep_al::metrics::mean_std;
use maxsep_al::{StrategyKind, StrategySpec};

fn main() -> maxsep_al::Result<()> {
    let ds = gen_gaussian(4, 3, 300, 2.0, 0.2, 51)?;
    println!("{:<6} {:>8} {:>8}", "beta", "aubc", "±");
    for beta in [1usize, 2, 5, 10, 20] {
        let mut aubcs = Vec::new();
        for seed in 0..3u64 {
            let cfg = ExperimentConfig {
                initial_labeled: 20,
                batch: 20,
                budget: 200,
                strategy: StrategySpec::new(StrategyKind::MsalD).with_beta(beta),
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
            aubcs.push(run_experiment(&cfg, &ds)?.0.aubc);
        }
        let (mean, std) = mean_std(&aubcs);
        println!("{beta:<6} {mean:>8.4} {std:>8.4}");
    }
    println!("\nbeta = 1 is plain uncertainty sampling; larger beta trades uncertainty for class coverage");
    Ok(())
}
