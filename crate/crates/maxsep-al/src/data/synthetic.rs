//! Synthetic Gaussian pools centered on the class prototypes.

use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::prototypes::build_prototypes;
use crate::seeding::{stream_rng, Stream};

use super::Dataset;

/// Class `c` is an identity-covariance Gaussian centered at
/// `separation * p_c` embedded in the first `C - 1` of `d` dimensions.
/// `test_fraction` of each class's `per_class_n` samples is held out.
pub fn gen_gaussian(
    num_classes: usize,
    dim: usize,
    per_class_n: usize,
    separation: f64,
    test_fraction: f64,
    seed: u64,
) -> Result<Dataset> {
    if num_classes < 2 {
        return Err(Error::invalid_argument("need at least 2 classes"));
    }
    if dim < num_classes - 1 {
        return Err(Error::invalid_argument(format!(
            "dim {dim} cannot embed the {num_classes}-class prototype space of dimension {}",
            num_classes - 1
        )));
    }
    if per_class_n == 0 {
        return Err(Error::invalid_argument("per_class_n must be at least 1"));
    }
    if !(0.0..1.0).contains(&test_fraction) {
        return Err(Error::invalid_argument(format!(
            "test_fraction {test_fraction} must lie in [0, 1)"
        )));
    }
    if separation < 0.0 {
        return Err(Error::invalid_argument("separation must be nonnegative"));
    }

    let prototypes = build_prototypes(num_classes)?;
    let test_per_class = (per_class_n as f64 * test_fraction).round() as usize;
    let train_per_class = per_class_n - test_per_class;
    if train_per_class == 0 {
        return Err(Error::invalid_argument(
            "test_fraction leaves no training samples".to_string(),
        ));
    }

    let mut rng = stream_rng(seed, Stream::Data, 0);
    let n_train = train_per_class * num_classes;
    let n_test = test_per_class * num_classes;
    let mut train_inputs = Array2::zeros((n_train, dim));
    let mut test_inputs = Array2::zeros((n_test, dim));
    let mut train_labels = Vec::with_capacity(n_train);
    let mut test_labels = Vec::with_capacity(n_test);

    let mut train_row = 0usize;
    let mut test_row = 0usize;
    for c in 0..num_classes {
        let center = prototypes.prototype(c);
        for s in 0..per_class_n {
            let into_test = s >= train_per_class;
            for d in 0..dim {
                let offset = if d < num_classes - 1 {
                    separation * center[d]
                } else {
                    0.0
                };
                let noise: f64 = rng.sample(StandardNormal);
                if into_test {
                    test_inputs[[test_row, d]] = offset + noise;
                } else {
                    train_inputs[[train_row, d]] = offset + noise;
                }
            }
            if into_test {
                test_labels.push(c);
                test_row += 1;
            } else {
                train_labels.push(c);
                train_row += 1;
            }
        }
    }

    let ds = Dataset {
        name: format!("gaussian-c{num_classes}-d{dim}"),
        train_inputs,
        train_labels,
        test_inputs,
        test_labels,
        num_classes,
        normalization: None,
    };
    ds.validate()?;
    Ok(ds)
}
