//! Wrap a strategy with cost-effective pseudo-labeling: confident pool
//! samples join the next round's training set for free.
//!
//!     cargo run --release --example ceal_pseudo_labels

use maxsep_al::al_loop::{run_experiment, ExperimentConfig, Precision};
use maxsep_al::data::gen_gaussian;
use maxsep_al::strategies::CealSettings;
use maxsep_al::{StrategyKind, StrategySpec, UncertaintySource};

fn main() -> maxsep_al::Result<()> {
    let ds = gen_gaussian(3, 2, 300, 2.5, 0.2, 41)?;
    let base = ExperimentConfig {
        initial_labeled: 15,
        batch: 15,
        budget: 150,
        strategy: StrategySpec::new(StrategyKind::Entropy).with_source(UncertaintySource::Entropy),
        hidden_dims: vec![12],
        rho: 1.0,
        epochs: 15,
        minibatch_size: 32,
        learning_rate: 0.01,
        warm_start: false,
        precision: Precision::F64,
        seed: 3,
        eval_every: 1,
    };

    let (plain, _) = run_experiment(&base, &ds)?;
    println!(
        "entropy sampling            : aubc {:.4}, final accuracy {:.4}",
        plain.aubc, plain.final_accuracy
    );

    // entropy variant: rows under 0.3 nats get pseudo-labeled
    let mut wrapped = base.clone();
    wrapped.strategy = wrapped.strategy.with_ceal(CealSettings {
        delta0: 0.3,
        decay_rate: 0.02,
    });
    let (ceal, state) = run_experiment(&wrapped, &ds)?;
    println!(
        "entropy + pseudo-labeling   : aubc {:.4}, final accuracy {:.4}",
        ceal.aubc, ceal.final_accuracy
    );
    println!(
        "pseudo-labels active after the last selection round: {} (budget untouched: |L| = {})",
        state.pseudo_labeled.len(),
        state.labeled.len()
    );

    // the msal variant keys on cosine to the nearest prototype instead
    let mut msal_ceal = base.clone();
    msal_ceal.strategy = StrategySpec::new(StrategyKind::Msal).with_ceal(CealSettings {
        delta0: 0.05,
        decay_rate: 0.005,
    });
    let (msal, _) = run_experiment(&msal_ceal, &ds)?;
    println!(
        "msal + pseudo-labeling      : aubc {:.4}, final accuracy {:.4}",
        msal.aubc, msal.final_accuracy
    );
    Ok(())
}
