//! Feed-forward classifier with a frozen maximum-separation head.
//!
//! The network maps inputs to a `(C-1)`-dimensional feature space; class
//! logits are the scaled projection of those features onto the fixed
//! prototype matrix, `logits = rho * P^T f`. The prototype head and the
//! radius `rho` carry no gradient and never change during training, so the
//! class geometry stays maximally separated from the first round onward.
//!
//! Training is plain minibatch softmax cross-entropy with hand-derived
//! backpropagation and Adam. Everything is deterministic under the seed:
//! weight init comes from a ChaCha8 stream, shuffles from another, and all
//! reductions run in fixed serial order.

mod adam;

pub use adam::{adam_step, OptimizerState};

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::prototypes::{build_prototypes, PrototypeMatrix};
use crate::seeding::unit_f64;

/// Element type for model arithmetic. Double precision is the default;
/// `f32` is available for runs that want to trade accuracy for speed.
pub trait Elem: ndarray::NdFloat {
    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
}

impl Elem for f32 {
    fn from_f64(v: f64) -> Self {
        v as f32
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Elem for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(self) -> f64 {
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
}

/// Layer sizes of the feature extractor. The output dimension must be
/// `num_classes - 1` so features land in the prototype space.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Architecture {
    pub input_dim: usize,
    pub hidden_dims: Vec<usize>,
    pub activation: Activation,
    pub output_dim: usize,
}

impl Architecture {
    pub fn new(input_dim: usize, hidden_dims: Vec<usize>, num_classes: usize) -> Self {
        Architecture {
            input_dim,
            hidden_dims,
            activation: Activation::Relu,
            output_dim: num_classes - 1,
        }
    }

    fn validate(&self, num_classes: usize) -> Result<()> {
        if self.output_dim != num_classes - 1 {
            return Err(Error::invalid_argument(format!(
                "output_dim {} must equal num_classes - 1 = {}",
                self.output_dim,
                num_classes - 1
            )));
        }
        if self.input_dim == 0 || self.output_dim == 0 || self.hidden_dims.contains(&0) {
            return Err(Error::invalid_argument(
                "all layer dimensions must be at least 1".to_string(),
            ));
        }
        Ok(())
    }

    /// (fan_in, fan_out) per dense layer, input to output.
    fn layer_dims(&self) -> Vec<(usize, usize)> {
        let mut dims = Vec::with_capacity(self.hidden_dims.len() + 1);
        let mut prev = self.input_dim;
        for &h in &self.hidden_dims {
            dims.push((prev, h));
            prev = h;
        }
        dims.push((prev, self.output_dim));
        dims
    }
}

/// One dense layer, `weight` is `fan_in x fan_out`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense<E: Elem> {
    pub weight: Array2<E>,
    pub bias: Array1<E>,
}

/// Gradient of one dense layer, same shapes as [`Dense`].
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGrads<E: Elem> {
    pub weight: Array2<E>,
    pub bias: Array1<E>,
}

pub type Gradients<E> = Vec<LayerGrads<E>>;

/// Feature extractor plus the frozen prototype projection.
#[derive(Debug, Clone)]
pub struct Classifier<E: Elem> {
    arch: Architecture,
    layers: Vec<Dense<E>>,
    prototypes: PrototypeMatrix,
    projection: Array2<E>,
    radius: f64,
    rng_seed: u64,
}

/// Features and logits of one forward pass.
#[derive(Debug, Clone)]
pub struct ForwardPass<E: Elem> {
    /// `n x (C-1)` pre-projection features.
    pub features: Array2<E>,
    /// `n x C` class logits, `rho * features . P`.
    pub logits: Array2<E>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub minibatch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if self.epochs < 1 {
            return Err(Error::invalid_argument("epochs must be at least 1"));
        }
        if self.minibatch_size < 1 {
            return Err(Error::invalid_argument("minibatch_size must be at least 1"));
        }
        Ok(())
    }
}

/// Initialize a classifier with fan-scaled uniform weights.
///
/// Weights are drawn uniformly in `+-sqrt(6 / (fan_in + fan_out))` from a
/// ChaCha8 stream seeded by `seed` (draws happen in f64 and are cast to the
/// element type, so f32 and f64 models see the same stream). Biases start
/// at zero. The prototype head is built for `num_classes` and frozen.
pub fn init_classifier<E: Elem>(
    arch: Architecture,
    num_classes: usize,
    rho: f64,
    seed: u64,
) -> Result<Classifier<E>> {
    arch.validate(num_classes)?;
    if rho <= 0.0 {
        return Err(Error::invalid_argument(format!(
            "radius must be positive, got {rho}"
        )));
    }
    let prototypes = build_prototypes(num_classes)?;
    let projection = prototypes.values().mapv(E::from_f64);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut layers = Vec::new();
    for (fan_in, fan_out) in arch.layer_dims() {
        let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
        let mut weight = Array2::zeros((fan_in, fan_out));
        for i in 0..fan_in {
            for j in 0..fan_out {
                weight[[i, j]] = E::from_f64((unit_f64(&mut rng) * 2.0 - 1.0) * limit);
            }
        }
        layers.push(Dense {
            weight,
            bias: Array1::zeros(fan_out),
        });
    }

    Ok(Classifier {
        arch,
        layers,
        prototypes,
        projection,
        radius: rho,
        rng_seed: seed,
    })
}

impl<E: Elem> Classifier<E> {
    pub fn arch(&self) -> &Architecture {
        &self.arch
    }

    pub fn num_classes(&self) -> usize {
        self.prototypes.num_classes()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn rng_seed(&self) -> u64 {
        self.rng_seed
    }

    pub fn prototypes(&self) -> &PrototypeMatrix {
        &self.prototypes
    }

    pub fn layers(&self) -> &[Dense<E>] {
        &self.layers
    }

    /// Mutable access to the trainable layers (gradient checks, custom
    /// update rules). The prototype head is not reachable from here.
    pub fn layers_mut(&mut self) -> &mut [Dense<E>] {
        &mut self.layers
    }

    fn check_width(&self, inputs: &ArrayView2<'_, E>) -> Result<()> {
        if inputs.ncols() != self.arch.input_dim {
            return Err(Error::invalid_argument(format!(
                "input width {} does not match input_dim {}",
                inputs.ncols(),
                self.arch.input_dim
            )));
        }
        Ok(())
    }

    /// Hidden-layer activations and linear features; used by forward and
    /// backprop. Returns (pre_activations, activations) per layer with
    /// `activations[0]` = inputs.
    fn forward_cached(&self, inputs: &ArrayView2<'_, E>) -> (Vec<Array2<E>>, Vec<Array2<E>>) {
        let n_layers = self.layers.len();
        let mut pre = Vec::with_capacity(n_layers);
        let mut act: Vec<Array2<E>> = Vec::with_capacity(n_layers + 1);
        act.push(inputs.to_owned());
        for (l, layer) in self.layers.iter().enumerate() {
            let z = act[l].dot(&layer.weight) + &layer.bias;
            // last layer is linear: its output is the feature vector
            let a = if l + 1 < n_layers {
                z.mapv(|v| if v > E::zero() { v } else { E::zero() })
            } else {
                z.clone()
            };
            pre.push(z);
            act.push(a);
        }
        (pre, act)
    }

    /// Project features through the frozen head: `rho * f . P`.
    pub fn logits_from_features(&self, features: &Array2<E>) -> Array2<E> {
        features.dot(&self.projection) * E::from_f64(self.radius)
    }

    /// Features and logits for a batch of inputs.
    pub fn forward(&self, inputs: &ArrayView2<'_, E>) -> Result<ForwardPass<E>> {
        self.check_width(inputs)?;
        let (_, act) = self.forward_cached(inputs);
        let features = act.last().expect("at least one layer").clone();
        let logits = self.logits_from_features(&features);
        Ok(ForwardPass { features, logits })
    }

    /// Pre-projection features for an unlabeled pool; no training side
    /// effects, safe to call concurrently on a shared classifier.
    pub fn embed_pool(&self, inputs: &ArrayView2<'_, E>) -> Result<Array2<E>> {
        self.check_width(inputs)?;
        let (_, act) = self.forward_cached(inputs);
        Ok(act.into_iter().next_back().expect("at least one layer"))
    }

    /// Mean softmax cross-entropy and exact gradients for every trainable
    /// parameter. No gradient flows into the prototypes or the radius.
    pub fn loss_and_grad(
        &self,
        inputs: &ArrayView2<'_, E>,
        labels: &[usize],
    ) -> Result<(f64, Gradients<E>)> {
        self.check_width(inputs)?;
        let n = inputs.nrows();
        if labels.len() != n {
            return Err(Error::invalid_argument(format!(
                "{} labels for {} inputs",
                labels.len(),
                n
            )));
        }
        let c = self.num_classes();
        if let Some(&bad) = labels.iter().find(|&&y| y >= c) {
            return Err(Error::invalid_argument(format!(
                "label {bad} out of range for {c} classes"
            )));
        }
        if n == 0 {
            return Err(Error::invalid_argument("empty batch"));
        }

        let (pre, act) = self.forward_cached(inputs);
        let features = act.last().expect("nonempty");
        let logits = self.logits_from_features(features);

        // softmax with the row max subtracted; loss via log-sum-exp
        let inv_n = E::from_f64(1.0 / n as f64);
        let mut dlogits = Array2::zeros((n, c));
        let mut loss = E::zero();
        for i in 0..n {
            let row = logits.row(i);
            let mut max = row[0];
            for &v in row.iter() {
                if v > max {
                    max = v;
                }
            }
            let mut denom = E::zero();
            for &v in row.iter() {
                denom += (v - max).exp();
            }
            loss = loss + denom.ln() + max - row[labels[i]];
            for j in 0..c {
                let p = (row[j] - max).exp() / denom;
                let t = if j == labels[i] { E::one() } else { E::zero() };
                dlogits[[i, j]] = (p - t) * inv_n;
            }
        }
        let loss = (loss * inv_n).to_f64();

        // back through the frozen projection, then the dense stack
        let mut delta = dlogits.dot(&self.projection.t()) * E::from_f64(self.radius);
        let n_layers = self.layers.len();
        let mut grads: Vec<LayerGrads<E>> = (0..n_layers)
            .map(|l| LayerGrads {
                weight: Array2::zeros(self.layers[l].weight.raw_dim()),
                bias: Array1::zeros(self.layers[l].bias.raw_dim()),
            })
            .collect();
        for l in (0..n_layers).rev() {
            grads[l].weight = act[l].t().dot(&delta);
            grads[l].bias = delta.sum_axis(Axis(0));
            if l > 0 {
                let back = delta.dot(&self.layers[l].weight.t());
                let gate = pre[l - 1].mapv(|z| if z > E::zero() { E::one() } else { E::zero() });
                delta = back * gate;
            }
        }

        Ok((loss, grads))
    }

    /// Minibatch training with Adam over a seed-deterministic shuffle.
    /// The prototype head is untouched; returns the mean minibatch loss of
    /// the final epoch.
    pub fn train(
        &mut self,
        inputs: &ArrayView2<'_, E>,
        labels: &[usize],
        cfg: &TrainConfig,
    ) -> Result<f64> {
        cfg.validate()?;
        self.check_width(inputs)?;
        let n = inputs.nrows();
        if n == 0 {
            return Err(Error::invalid_state("cannot train on an empty labeled set"));
        }
        if labels.len() != n {
            return Err(Error::invalid_argument(format!(
                "{} labels for {} inputs",
                labels.len(),
                n
            )));
        }

        let mut opt = OptimizerState::new(&self.layers, cfg.learning_rate);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut order: Vec<usize> = (0..n).collect();
        let mut last_epoch_loss = 0.0;

        for _ in 0..cfg.epochs {
            order.shuffle(&mut rng);
            let mut epoch_loss = 0.0;
            let mut batches = 0usize;
            for chunk in order.chunks(cfg.minibatch_size) {
                let batch_inputs = inputs.select(Axis(0), chunk);
                let batch_labels: Vec<usize> = chunk.iter().map(|&i| labels[i]).collect();
                let (loss, grads) = self.loss_and_grad(&batch_inputs.view(), &batch_labels)?;
                adam_step(&mut opt, &mut self.layers, &grads);
                epoch_loss += loss;
                batches += 1;
            }
            last_epoch_loss = epoch_loss / batches as f64;
        }
        Ok(last_epoch_loss)
    }

    /// Softmax class probabilities, rows summing to one.
    pub fn predict_probs(&self, inputs: &ArrayView2<'_, E>) -> Result<Array2<E>> {
        let fwd = self.forward(inputs)?;
        Ok(softmax_rows(&fwd.logits))
    }

    /// Hard predictions; argmax ties break toward the lowest class index.
    pub fn predict(&self, inputs: &ArrayView2<'_, E>) -> Result<Vec<usize>> {
        let fwd = self.forward(inputs)?;
        Ok(argmax_rows(&fwd.logits))
    }
}

/// Row-wise softmax with the max subtracted for stability.
pub fn softmax_rows<E: Elem>(logits: &Array2<E>) -> Array2<E> {
    let mut out = logits.clone();
    for mut row in out.rows_mut() {
        let mut max = row[0];
        for &v in row.iter() {
            if v > max {
                max = v;
            }
        }
        let mut denom = E::zero();
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            denom += *v;
        }
        for v in row.iter_mut() {
            *v /= denom;
        }
    }
    out
}

/// Row-wise argmax, first maximum wins.
pub fn argmax_rows<E: Elem>(values: &Array2<E>) -> Vec<usize> {
    values
        .rows()
        .into_iter()
        .map(|row| {
            let mut best = 0;
            for (j, &v) in row.iter().enumerate() {
                if v > row[best] {
                    best = j;
                }
            }
            best
        })
        .collect()
}
