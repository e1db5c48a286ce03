//! Score an unlabeled pool by cosine to the nearest class prototype and
//! compare the ranking against entropy sampling.
//!
//!     cargo run --release --example score_pool

use maxsep_al::data::gen_gaussian;
use maxsep_al::model::init_classifier;
use maxsep_al::strategies::{score_entropy, score_msal, select_top_uncertain};
use maxsep_al::{Architecture, Classifier, TrainConfig};
use ndarray::Axis;

fn main() -> maxsep_al::Result<()> {
    let ds = gen_gaussian(3, 2, 150, 2.5, 0.2, 11)?;
    let labeled: Vec<usize> = (0..30).collect();
    let pool: Vec<usize> = (30..ds.train_len()).collect();

    let mut clf: Classifier<f64> = init_classifier(
        Architecture::new(2, vec![12], 3),
        3,
        1.0,
        1,
    )?;
    let labeled_inputs = ds.train_inputs.select(Axis(0), &labeled);
    let labeled_labels: Vec<usize> = labeled.iter().map(|&i| ds.train_labels[i]).collect();
    clf.train(
        &labeled_inputs.view(),
        &labeled_labels,
        &TrainConfig { epochs: 25, minibatch_size: 16, learning_rate: 0.01, seed: 2 },
    )?;

    let pool_inputs = ds.train_inputs.select(Axis(0), &pool);
    let features = clf.embed_pool(&pool_inputs.view())?;
    let probs = clf.predict_probs(&pool_inputs.view())?;

    let by_cosine = score_msal(&features, &pool, clf.prototypes())?;
    let by_entropy = score_entropy(&probs, &pool)?;

    println!("ten most uncertain pool samples per score:");
    println!("  cosine-to-prototype: {:?}", select_top_uncertain(&by_cosine, 10)?);
    println!("  entropy:             {:?}", select_top_uncertain(&by_entropy, 10)?);

    let top = select_top_uncertain(&by_cosine, 1)?[0];
    let pos = pool.iter().position(|&i| i == top).unwrap();
    println!(
        "\nmost uncertain sample {top}: max cosine {:.4} (score {:.4}), true class {}",
        -by_cosine.scores[pos],
        by_cosine.scores[pos],
        ds.train_labels[top]
    );
    Ok(())
}
