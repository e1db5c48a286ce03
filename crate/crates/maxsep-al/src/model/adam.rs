//! Adam with bias correction, folded into the step size.

use ndarray::{Array1, Array2};

use super::{Dense, Elem, Gradients};

/// Per-parameter first and second moments plus the step counter.
///
/// The bias correction is applied through the effective step size
/// `lr_t = lr * sqrt(1 - beta2^t) / (1 - beta1^t)`, so a single fused
/// update per coordinate: `w -= lr_t * m / (sqrt(v) + eps)`.
#[derive(Debug, Clone)]
pub struct OptimizerState<E: Elem> {
    pub step_count: u64,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    first_moment: Vec<(Array2<E>, Array1<E>)>,
    second_moment: Vec<(Array2<E>, Array1<E>)>,
}

impl<E: Elem> OptimizerState<E> {
    /// Fresh state with zero moments and the standard defaults
    /// (beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8).
    pub fn new(layers: &[Dense<E>], learning_rate: f64) -> Self {
        let zeros: Vec<(Array2<E>, Array1<E>)> = layers
            .iter()
            .map(|l| {
                (
                    Array2::zeros(l.weight.raw_dim()),
                    Array1::zeros(l.bias.raw_dim()),
                )
            })
            .collect();
        OptimizerState {
            step_count: 0,
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            first_moment: zeros.clone(),
            second_moment: zeros,
        }
    }
}

/// One Adam update over every layer, in place.
pub fn adam_step<E: Elem>(
    state: &mut OptimizerState<E>,
    layers: &mut [Dense<E>],
    grads: &Gradients<E>,
) {
    assert_eq!(layers.len(), grads.len(), "gradient/layer count mismatch");
    state.step_count += 1;
    let t = state.step_count as i32;
    let lr_t = E::from_f64(
        state.learning_rate * (1.0 - state.beta2.powi(t)).sqrt() / (1.0 - state.beta1.powi(t)),
    );
    let b1 = E::from_f64(state.beta1);
    let b2 = E::from_f64(state.beta2);
    let eps = E::from_f64(state.epsilon);
    let one = E::one();

    for (l, layer) in layers.iter_mut().enumerate() {
        let (m_w, m_b) = &mut state.first_moment[l];
        let (v_w, v_b) = &mut state.second_moment[l];

        for ((w, g), (m, v)) in layer
            .weight
            .iter_mut()
            .zip(grads[l].weight.iter())
            .zip(m_w.iter_mut().zip(v_w.iter_mut()))
        {
            *m = b1 * *m + (one - b1) * *g;
            *v = b2 * *v + (one - b2) * *g * *g;
            *w -= lr_t * *m / (v.sqrt() + eps);
        }
        for ((w, g), (m, v)) in layer
            .bias
            .iter_mut()
            .zip(grads[l].bias.iter())
            .zip(m_b.iter_mut().zip(v_b.iter_mut()))
        {
            *m = b1 * *m + (one - b1) * *g;
            *v = b2 * *v + (one - b2) * *g * *g;
            *w -= lr_t * *m / (v.sqrt() + eps);
        }
    }
}
