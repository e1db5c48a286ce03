//! Subsample a balanced pool into an exponential long tail and run active
//! learning on it.
//!
//!     cargo run --release --example longtail_pool

use maxsep_al::al_loop::{run_experiment, ExperimentConfig, Precision};
use maxsep_al::data::{gen_gaussian, make_longtail, ImbalanceSpec};
use maxsep_al::{StrategyKind, StrategySpec};

fn main() -> maxsep_al::Result<()> {
    let balanced = gen_gaussian(5, 4, 300, 2.5, 0.2, 31)?;
    let longtail = make_longtail(&balanced, &ImbalanceSpec::exponential(0.1), 1)?;

    let mut counts = vec![0usize; longtail.num_classes];
    for &y in &longtail.train_labels {
        counts[y] += 1;
    }
    println!("class sizes after imbalance factor 0.1 (head to tail):");
    for (c, n) in counts.iter().enumerate() {
        println!("  class {c}: {n:>4}  {}", "#".repeat(n / 5));
    }

    for kind in [StrategyKind::Random, StrategyKind::Msal, StrategyKind::MsalD] {
        let cfg = ExperimentConfig {
            initial_labeled: 25,
            batch: 25,
            budget: 250,
            strategy: StrategySpec::new(kind).with_beta(5),
            hidden_dims: vec![16],
            rho: 1.0,
            epochs: 15,
            minibatch_size: 32,
            learning_rate: 0.01,
            warm_start: false,
            precision: Precision::F64,
            seed: 0,
            eval_every: 1,
        };
        let (result, _) = run_experiment(&cfg, &longtail)?;
        println!(
            "{:<8} on the long tail: aubc {:.4}, final accuracy {:.4}",
            kind.name(),
            result.aubc,
            result.final_accuracy
        );
    }
    Ok(())
}
