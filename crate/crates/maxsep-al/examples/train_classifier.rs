//! Train the prototype-head classifier on a synthetic Gaussian pool and
//! show that the head never moves: only the feature extractor learns.
//!
//!     cargo run --release --example train_classifier

use maxsep_al::data::gen_gaussian;
use maxsep_al::metrics::accuracy;
use maxsep_al::model::init_classifier;
use maxsep_al::{Architecture, Classifier, TrainConfig};

fn main() -> maxsep_al::Result<()> {
    let ds = gen_gaussian(5, 4, 200, 3.0, 0.25, 7)?;
    println!(
        "dataset: {} train / {} test samples, {} classes, dim {}",
        ds.train_len(),
        ds.test_len(),
        ds.num_classes,
        ds.input_dim()
    );

    let mut clf: Classifier<f64> = init_classifier(
        Architecture::new(ds.input_dim(), vec![32, 16], ds.num_classes),
        ds.num_classes,
        1.0,
        42,
    )?;
    let head_before: Vec<u64> = clf.prototypes().values().iter().map(|v| v.to_bits()).collect();

    let cfg = TrainConfig {
        epochs: 30,
        minibatch_size: 32,
        learning_rate: 0.005,
        seed: 43,
    };
    let final_loss = clf.train(&ds.train_inputs.view(), &ds.train_labels, &cfg)?;

    let train_acc = accuracy(&clf.predict(&ds.train_inputs.view())?, &ds.train_labels)?;
    let test_acc = accuracy(&clf.predict(&ds.test_inputs.view())?, &ds.test_labels)?;
    println!("after {} epochs: loss {final_loss:.4}, train accuracy {train_acc:.3}, test accuracy {test_acc:.3}", cfg.epochs);

    let head_after: Vec<u64> = clf.prototypes().values().iter().map(|v| v.to_bits()).collect();
    println!(
        "prototype head bit-identical through training: {}",
        head_before == head_after
    );
    Ok(())
}
