//! Dense MLP with rectifier hidden layers, analytic backprop, and Adam.
//!
//! Deliberately from scratch: forward passes are deterministic `f64`
//! matrix products, gradients are exact, and every parameter serializes,
//! which the checkpoint/resume contract depends on.

use crate::RlError;
use ndarray::{Array1, Array2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputActivation {
    /// Bounded head for actors; outputs componentwise in (-1, 1).
    Tanh,
    /// Unbounded head for critics.
    Linear,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Mlp {
    weights: Vec<Array2<f64>>,
    biases: Vec<Array1<f64>>,
    output: OutputActivation,
}

/// Activations cached by a forward pass, consumed by backprop.
pub struct MlpCache {
    /// Layer inputs: `a[0]` is the network input, `a[i]` the activation
    /// feeding layer `i`.
    inputs: Vec<Array2<f64>>,
    /// Post-activation output of the final layer.
    output: Array2<f64>,
}

impl MlpCache {
    pub fn output(&self) -> &Array2<f64> {
        &self.output
    }
}

/// Per-layer parameter gradients.
pub struct MlpGrads {
    pub d_weights: Vec<Array2<f64>>,
    pub d_biases: Vec<Array1<f64>>,
}

impl Mlp {
    /// Xavier-uniform initialization over the given layer widths
    /// (`[input, hidden..., output]`).
    pub fn new(widths: &[usize], output: OutputActivation, rng: &mut impl Rng) -> Self {
        assert!(widths.len() >= 2, "need at least input and output widths");
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for pair in widths.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let w = Array2::from_shape_fn((fan_in, fan_out), |_| rng.gen_range(-limit..limit));
            weights.push(w);
            biases.push(Array1::zeros(fan_out));
        }
        Self { weights, biases, output }
    }

    pub fn input_width(&self) -> usize {
        self.weights[0].nrows()
    }

    pub fn output_width(&self) -> usize {
        self.weights.last().unwrap().ncols()
    }

    pub fn layer_widths(&self) -> Vec<usize> {
        let mut w: Vec<usize> = vec![self.input_width()];
        w.extend(self.weights.iter().map(|m| m.ncols()));
        w
    }

    pub fn forward_batch(&self, x: &Array2<f64>) -> Array2<f64> {
        self.forward_cached(x).output
    }

    /// Single-sample forward pass.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, RlError> {
        if x.len() != self.input_width() {
            return Err(RlError::WidthMismatch { expected: self.input_width(), got: x.len() });
        }
        let arr = Array2::from_shape_vec((1, x.len()), x.to_vec()).expect("shape checked");
        Ok(self.forward_batch(&arr).row(0).to_vec())
    }

    pub fn forward_cached(&self, x: &Array2<f64>) -> MlpCache {
        let n_layers = self.weights.len();
        let mut inputs = Vec::with_capacity(n_layers);
        let mut h = x.clone();
        for (i, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            inputs.push(h.clone());
            let mut z = h.dot(w) + b;
            if i + 1 < n_layers {
                z.mapv_inplace(|v| v.max(0.0));
            } else {
                match self.output {
                    OutputActivation::Tanh => z.mapv_inplace(f64::tanh),
                    OutputActivation::Linear => {}
                }
            }
            h = z;
        }
        MlpCache { inputs, output: h }
    }

    /// Backprop `d_output` (gradient w.r.t. the post-activation output).
    /// Returns parameter gradients and the gradient w.r.t. the input batch.
    pub fn backward(&self, cache: &MlpCache, d_output: &Array2<f64>) -> (MlpGrads, Array2<f64>) {
        let n_layers = self.weights.len();
        let mut d_weights = vec![Array2::zeros((0, 0)); n_layers];
        let mut d_biases = vec![Array1::zeros(0); n_layers];

        // Output activation derivative expressed via the activation value.
        let mut delta = match self.output {
            OutputActivation::Tanh => {
                let mut d = d_output.clone();
                d.zip_mut_with(&cache.output, |g, y| *g *= 1.0 - y * y);
                d
            }
            OutputActivation::Linear => d_output.clone(),
        };

        for i in (0..n_layers).rev() {
            let a_prev = &cache.inputs[i];
            d_weights[i] = a_prev.t().dot(&delta);
            d_biases[i] = delta.sum_axis(Axis(0));
            let mut d_prev = delta.dot(&self.weights[i].t());
            if i > 0 {
                // ReLU mask: the input of layer i is the activation of i-1.
                d_prev.zip_mut_with(a_prev, |g, a| {
                    if *a <= 0.0 {
                        *g = 0.0;
                    }
                });
            }
            delta = d_prev;
        }
        (MlpGrads { d_weights, d_biases }, delta)
    }

    /// `self = tau * other + (1 - tau) * self`, exact copy at `tau = 1`.
    pub fn soft_update_from(&mut self, other: &Self, tau: f64) {
        for (w, wo) in self.weights.iter_mut().zip(&other.weights) {
            w.zip_mut_with(wo, |a, b| *a = tau * b + (1.0 - tau) * a);
        }
        for (b, bo) in self.biases.iter_mut().zip(&other.biases) {
            b.zip_mut_with(bo, |a, v| *a = tau * v + (1.0 - tau) * a);
        }
    }

    pub fn params_finite(&self) -> bool {
        self.weights.iter().all(|w| w.iter().all(|v| v.is_finite()))
            && self.biases.iter().all(|b| b.iter().all(|v| v.is_finite()))
    }

    /// Max absolute parameter difference; handy for convergence checks.
    pub fn max_param_delta(&self, other: &Self) -> f64 {
        let mut m: f64 = 0.0;
        for (w, wo) in self.weights.iter().zip(&other.weights) {
            for (a, b) in w.iter().zip(wo.iter()) {
                m = m.max((a - b).abs());
            }
        }
        for (b, bo) in self.biases.iter().zip(&other.biases) {
            for (a, v) in b.iter().zip(bo.iter()) {
                m = m.max((a - v).abs());
            }
        }
        m
    }
}

/// Adam optimizer with one moment pair per parameter tensor.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    t: u64,
    m_w: Vec<Array2<f64>>,
    v_w: Vec<Array2<f64>>,
    m_b: Vec<Array1<f64>>,
    v_b: Vec<Array1<f64>>,
}

impl Adam {
    pub fn new(net: &Mlp, lr: f64) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            m_w: net.weights.iter().map(|w| Array2::zeros(w.dim())).collect(),
            v_w: net.weights.iter().map(|w| Array2::zeros(w.dim())).collect(),
            m_b: net.biases.iter().map(|b| Array1::zeros(b.len())).collect(),
            v_b: net.biases.iter().map(|b| Array1::zeros(b.len())).collect(),
        }
    }

    pub fn step(&mut self, net: &mut Mlp, grads: &MlpGrads) {
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..net.weights.len() {
            adam_update(
                &mut net.weights[i],
                &grads.d_weights[i],
                &mut self.m_w[i],
                &mut self.v_w[i],
                self.lr,
                self.beta1,
                self.beta2,
                self.eps,
                bc1,
                bc2,
            );
            adam_update_1d(
                &mut net.biases[i],
                &grads.d_biases[i],
                &mut self.m_b[i],
                &mut self.v_b[i],
                self.lr,
                self.beta1,
                self.beta2,
                self.eps,
                bc1,
                bc2,
            );
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn adam_update(
    p: &mut Array2<f64>,
    g: &Array2<f64>,
    m: &mut Array2<f64>,
    v: &mut Array2<f64>,
    lr: f64,
    b1: f64,
    b2: f64,
    eps: f64,
    bc1: f64,
    bc2: f64,
) {
    for ((p, g), (m, v)) in p.iter_mut().zip(g.iter()).zip(m.iter_mut().zip(v.iter_mut())) {
        *m = b1 * *m + (1.0 - b1) * g;
        *v = b2 * *v + (1.0 - b2) * g * g;
        *p -= lr * (*m / bc1) / ((*v / bc2).sqrt() + eps);
    }
}

#[allow(clippy::too_many_arguments)]
fn adam_update_1d(
    p: &mut Array1<f64>,
    g: &Array1<f64>,
    m: &mut Array1<f64>,
    v: &mut Array1<f64>,
    lr: f64,
    b1: f64,
    b2: f64,
    eps: f64,
    bc1: f64,
    bc2: f64,
) {
    for ((p, g), (m, v)) in p.iter_mut().zip(g.iter()).zip(m.iter_mut().zip(v.iter_mut())) {
        *m = b1 * *m + (1.0 - b1) * g;
        *v = b2 * *v + (1.0 - b2) * g * g;
        *p -= lr * (*m / bc1) / ((*v / bc2).sqrt() + eps);
    }
}
