//! Fully connected network with tanh hidden activations, reverse-mode
//! gradients, Adam updates and input standardization.
//!
//! Everything is deterministic: initialization is seeded, and forward and
//! backward passes contain no hidden randomness, so identical seeds produce
//! bit-identical parameters.

use ndarray::{Array1, Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Standard-deviation floor below which a feature is treated as constant.
pub const STD_FLOOR: f64 = 1e-12;

/// Current model-file schema version.
pub const MODEL_FILE_VERSION: u32 = 1;

/// Descriptive metadata carried with a model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelMeta {
    /// Closure form this model was trained for ("lm", "lwm", "lg", "lgnm").
    pub ansatz: Option<String>,
    /// Truncation order N of the moment system the model closes.
    pub moment_order: Option<usize>,
    /// Seed used for weight initialization (and training shuffles).
    pub seed: u64,
    /// Optimizer used in training. Adam is an assumption recorded here, not
    /// a quantity taken from elsewhere.
    pub optimizer: String,
}

impl Default for ModelMeta {
    fn default() -> Self {
        ModelMeta {
            ansatz: None,
            moment_order: None,
            seed: 0,
            optimizer: "adam (assumed default)".to_string(),
        }
    }
}

/// Weights, biases and input-normalization statistics of a fully connected
/// tanh network with an identity output layer.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel<S> {
    layer_sizes: Vec<usize>,
    /// `weights[l]` has shape `(layer_sizes[l + 1], layer_sizes[l])`.
    weights: Vec<Array2<S>>,
    biases: Vec<Array1<S>>,
    input_mean: Array1<S>,
    input_std: Array1<S>,
    pub meta: ModelMeta,
}

/// Per-layer parameter gradients, shaped like the model.
#[derive(Debug, Clone)]
pub struct MlpGradients<S> {
    pub weights: Vec<Array2<S>>,
    pub biases: Vec<Array1<S>>,
}

impl<S: Scalar> MlpGradients<S> {
    pub fn zeros_like(model: &MlpModel<S>) -> Self {
        MlpGradients {
            weights: model.weights.iter().map(|w| Array2::zeros(w.dim())).collect(),
            biases: model.biases.iter().map(|b| Array1::zeros(b.len())).collect(),
        }
    }

    pub fn scale(&mut self, factor: S) {
        for w in &mut self.weights {
            w.mapv_inplace(|x| x * factor);
        }
        for b in &mut self.biases {
            b.mapv_inplace(|x| x * factor);
        }
    }
}

/// Activations cached by a forward pass, consumed by [`MlpModel::backward_batch`].
#[derive(Debug, Clone)]
pub struct MlpCache<S> {
    /// `activations[0]` is the standardized input; `activations[l]` for
    /// `l >= 1` is the post-activation output of layer `l`.
    activations: Vec<Array2<S>>,
}

impl<S: Scalar> MlpModel<S> {
    /// Builds a network with the given layer widths (input first, output
    /// last) and symmetric uniform weight initialization in
    /// `±sqrt(6 / (fan_in + fan_out))`.
    pub fn new(layer_sizes: &[usize], seed: u64) -> Result<Self> {
        if layer_sizes.len() < 2 {
            return invalid("MlpModel: need at least an input and an output layer");
        }
        if layer_sizes.iter().any(|&w| w == 0) {
            return invalid("MlpModel: zero-width layer");
        }
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for l in 0..layer_sizes.len() - 1 {
            let (fan_in, fan_out) = (layer_sizes[l], layer_sizes[l + 1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let w = Array2::from_shape_fn((fan_out, fan_in), |_| {
                S::of((rng.gen::<f64>() * 2.0 - 1.0) * bound)
            });
            weights.push(w);
            biases.push(Array1::zeros(fan_out));
        }
        Ok(MlpModel {
            layer_sizes: layer_sizes.to_vec(),
            weights,
            biases,
            input_mean: Array1::zeros(layer_sizes[0]),
            input_std: Array1::from_elem(layer_sizes[0], S::one()),
            meta: ModelMeta {
                seed,
                ..ModelMeta::default()
            },
        })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn input_width(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_width(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    pub fn input_mean(&self) -> &Array1<S> {
        &self.input_mean
    }

    pub fn input_std(&self) -> &Array1<S> {
        &self.input_std
    }

    /// Installs per-feature normalization statistics (std entries must be
    /// positive; fit them with [`fit_standardization`]).
    pub fn set_input_norm(&mut self, mean: Vec<S>, std: Vec<S>) -> Result<()> {
        if mean.len() != self.input_width() || std.len() != self.input_width() {
            return invalid("set_input_norm: statistics width mismatch");
        }
        if std.iter().any(|s| !(*s > S::zero())) {
            return invalid("set_input_norm: non-positive standard deviation");
        }
        self.input_mean = Array1::from_vec(mean);
        self.input_std = Array1::from_vec(std);
        Ok(())
    }

    fn check_input(&self, len: usize) -> Result<()> {
        if len != self.input_width() {
            return invalid(format!(
                "forward: input width {} does not match the model's {}",
                len,
                self.input_width()
            ));
        }
        Ok(())
    }

    /// Evaluates the network on a single input. Standardization is applied
    /// internally.
    pub fn forward(&self, x: &[S]) -> Result<Vec<S>> {
        self.check_input(x.len())?;
        let mut a: Vec<S> = x
            .iter()
            .zip(self.input_mean.iter().zip(self.input_std.iter()))
            .map(|(&xi, (&mu, &sd))| (xi - mu) / sd)
            .collect();
        let last = self.weights.len() - 1;
        for (l, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let mut out = vec![S::zero(); w.nrows()];
            for (o, (row, &bias)) in out.iter_mut().zip(w.rows().into_iter().zip(b.iter())) {
                let mut acc = bias;
                for (&wij, &aj) in row.iter().zip(&a) {
                    acc = acc + wij * aj;
                }
                *o = if l < last { acc.tanh() } else { acc };
            }
            a = out;
        }
        Ok(a)
    }

    /// Batched forward pass over the rows of `x` (shape `batch × input`).
    pub fn forward_batch(&self, x: &Array2<S>) -> Result<Array2<S>> {
        Ok(self.forward_batch_cached(x)?.0)
    }

    /// Batched forward pass that keeps the per-layer activations for a
    /// subsequent backward pass.
    pub fn forward_batch_cached(&self, x: &Array2<S>) -> Result<(Array2<S>, MlpCache<S>)> {
        self.check_input(x.ncols())?;
        let mut z = x.clone();
        for (j, mut col) in z.axis_iter_mut(Axis(1)).enumerate() {
            let mu = self.input_mean[j];
            let sd = self.input_std[j];
            col.mapv_inplace(|v| (v - mu) / sd);
        }
        let mut activations = vec![z];
        let last = self.weights.len() - 1;
        for (l, (w, b)) in self.weights.iter().zip(&self.biases).enumerate() {
            let mut pre = activations[l].dot(&w.t());
            for mut row in pre.rows_mut() {
                row += b;
            }
            if l < last {
                pre.mapv_inplace(|v| v.tanh());
            }
            activations.push(pre);
        }
        let out = activations.last().unwrap().clone();
        Ok((out, MlpCache { activations }))
    }

    /// Reverse-mode gradients of `sum(upstream ⊙ output)` with respect to
    /// all weights and biases, given the cache of the forward pass that
    /// produced `output`.
    pub fn backward_batch(&self, cache: &MlpCache<S>, upstream: &Array2<S>) -> MlpGradients<S> {
        let layers = self.weights.len();
        let mut grads = MlpGradients::zeros_like(self);
        let mut delta = upstream.clone();
        for l in (0..layers).rev() {
            grads.weights[l] = delta.t().dot(&cache.activations[l]);
            grads.biases[l] = delta.sum_axis(Axis(0));
            if l > 0 {
                let mut prev = delta.dot(&self.weights[l]);
                // activations[l] is the tanh output of layer l, so the
                // activation derivative is 1 - a^2.
                prev.zip_mut_with(&cache.activations[l], |d, &a| {
                    *d = *d * (S::one() - a * a);
                });
                delta = prev;
            }
        }
        grads
    }

    /// Jacobian of the network output with respect to the raw (pre-
    /// standardization) input, shape `output × input`.
    pub fn input_jacobian(&self, x: &[S]) -> Result<Array2<S>> {
        self.check_input(x.len())?;
        let row = Array2::from_shape_vec((1, x.len()), x.to_vec())
            .expect("row shape matches input length");
        let (_, cache) = self.forward_batch_cached(&row)?;
        let layers = self.weights.len();
        let out_w = self.output_width();
        let mut jac = Array2::zeros((out_w, self.input_width()));
        for o in 0..out_w {
            let mut delta = Array2::zeros((1, out_w));
            delta[(0, o)] = S::one();
            for l in (0..layers).rev() {
                let mut prev = delta.dot(&self.weights[l]);
                if l > 0 {
                    prev.zip_mut_with(&cache.activations[l], |d, &a| {
                        *d = *d * (S::one() - a * a);
                    });
                }
                delta = prev;
            }
            for j in 0..self.input_width() {
                jac[(o, j)] = delta[(0, j)] / self.input_std[j];
            }
        }
        Ok(jac)
    }

    /// Serializes to the versioned JSON model-file schema (always 64-bit
    /// floats on disk).
    pub fn to_json(&self) -> String {
        let file = ModelFile {
            version: MODEL_FILE_VERSION,
            layer_sizes: self.layer_sizes.clone(),
            activation: "tanh".to_string(),
            weights: self
                .weights
                .iter()
                .map(|w| w.iter().map(|v| v.as_f64()).collect())
                .collect(),
            biases: self
                .biases
                .iter()
                .map(|b| b.iter().map(|v| v.as_f64()).collect())
                .collect(),
            input_mean: self.input_mean.iter().map(|v| v.as_f64()).collect(),
            input_std: self.input_std.iter().map(|v| v.as_f64()).collect(),
            meta: self.meta.clone(),
        };
        serde_json::to_string_pretty(&file).expect("model serialization")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        if file.version != MODEL_FILE_VERSION {
            return Err(Error::Format(format!(
                "unsupported model file version {}",
                file.version
            )));
        }
        if file.activation != "tanh" {
            return Err(Error::Format(format!(
                "unsupported activation '{}'",
                file.activation
            )));
        }
        if file.layer_sizes.len() < 2
            || file.weights.len() != file.layer_sizes.len() - 1
            || file.biases.len() != file.layer_sizes.len() - 1
        {
            return Err(Error::Format("inconsistent layer table".to_string()));
        }
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for l in 0..file.layer_sizes.len() - 1 {
            let (rows, cols) = (file.layer_sizes[l + 1], file.layer_sizes[l]);
            if file.weights[l].len() != rows * cols || file.biases[l].len() != rows {
                return Err(Error::Format(format!("layer {l} has wrong element count")));
            }
            let w = Array2::from_shape_vec(
                (rows, cols),
                file.weights[l].iter().map(|&v| S::of(v)).collect(),
            )
            .expect("validated shape");
            weights.push(w);
            biases.push(Array1::from_vec(
                file.biases[l].iter().map(|&v| S::of(v)).collect(),
            ));
        }
        let input_w = file.layer_sizes[0];
        if file.input_mean.len() != input_w || file.input_std.len() != input_w {
            return Err(Error::Format("normalization width mismatch".to_string()));
        }
        Ok(MlpModel {
            layer_sizes: file.layer_sizes,
            weights,
            biases,
            input_mean: Array1::from_vec(file.input_mean.iter().map(|&v| S::of(v)).collect()),
            input_std: Array1::from_vec(file.input_std.iter().map(|&v| S::of(v)).collect()),
            meta: file.meta,
        })
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    #[cfg(test)]
    pub(crate) fn weights_mut(&mut self) -> &mut Vec<Array2<S>> {
        &mut self.weights
    }

    #[cfg(test)]
    pub(crate) fn biases_mut(&mut self) -> &mut Vec<Array1<S>> {
        &mut self.biases
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    layer_sizes: Vec<usize>,
    activation: String,
    /// Row-major `(fan_out × fan_in)` weight matrices.
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
    input_mean: Vec<f64>,
    input_std: Vec<f64>,
    #[serde(flatten)]
    meta: ModelMeta,
}

/// Adam accumulators matching a model's shape, plus the fixed
/// hyperparameters `beta1 = 0.9`, `beta2 = 0.999`, `eps = 1e-8` and the L2
/// coefficient applied as an additive gradient term.
#[derive(Debug, Clone)]
pub struct AdamState<S> {
    m_w: Vec<Array2<S>>,
    v_w: Vec<Array2<S>>,
    m_b: Vec<Array1<S>>,
    v_b: Vec<Array1<S>>,
    pub step: u64,
    pub beta1: S,
    pub beta2: S,
    pub epsilon: S,
    pub weight_decay: S,
}

impl<S: Scalar> AdamState<S> {
    pub fn new(model: &MlpModel<S>, weight_decay: S) -> Self {
        AdamState {
            m_w: model.weights.iter().map(|w| Array2::zeros(w.dim())).collect(),
            v_w: model.weights.iter().map(|w| Array2::zeros(w.dim())).collect(),
            m_b: model.biases.iter().map(|b| Array1::zeros(b.len())).collect(),
            v_b: model.biases.iter().map(|b| Array1::zeros(b.len())).collect(),
            step: 0,
            beta1: S::of(0.9),
            beta2: S::of(0.999),
            epsilon: S::of(1e-8),
            weight_decay,
        }
    }
}

/// One Adam update with bias correction. The L2 term `weight_decay * w` is
/// added to the weight gradients before the moment updates (biases are not
/// decayed).
pub fn adam_step<S: Scalar>(
    model: &mut MlpModel<S>,
    grads: &MlpGradients<S>,
    state: &mut AdamState<S>,
    lr: S,
) -> Result<()> {
    if grads.weights.len() != model.weights.len() {
        return invalid("adam_step: gradient layer count mismatch");
    }
    for (g, w) in grads.weights.iter().zip(&model.weights) {
        if g.dim() != w.dim() {
            return invalid("adam_step: gradient shape mismatch");
        }
    }
    state.step += 1;
    let t = state.step as i32;
    let bc1 = S::one() - state.beta1.powi(t);
    let bc2 = S::one() - state.beta2.powi(t);
    let (b1, b2, eps, wd) = (state.beta1, state.beta2, state.epsilon, state.weight_decay);
    let one = S::one();

    for l in 0..model.weights.len() {
        let w = &mut model.weights[l];
        let m = &mut state.m_w[l];
        let v = &mut state.v_w[l];
        let g = &grads.weights[l];
        for ((wi, (mi, vi)), &gi) in w.iter_mut().zip(m.iter_mut().zip(v.iter_mut())).zip(g.iter())
        {
            let grad = gi + wd * *wi;
            *mi = b1 * *mi + (one - b1) * grad;
            *vi = b2 * *vi + (one - b2) * grad * grad;
            let mhat = *mi / bc1;
            let vhat = *vi / bc2;
            *wi = *wi - lr * mhat / (vhat.sqrt() + eps);
        }
        let b = &mut model.biases[l];
        let mb = &mut state.m_b[l];
        let vb = &mut state.v_b[l];
        let gb = &grads.biases[l];
        for ((bi, (mi, vi)), &gi) in b.iter_mut().zip(mb.iter_mut().zip(vb.iter_mut())).zip(gb.iter())
        {
            *mi = b1 * *mi + (one - b1) * gi;
            *vi = b2 * *vi + (one - b2) * gi * gi;
            let mhat = *mi / bc1;
            let vhat = *vi / bc2;
            *bi = *bi - lr * mhat / (vhat.sqrt() + eps);
        }
    }
    Ok(())
}

/// Fits per-feature mean and standard deviation on the rows of a training
/// matrix. Features with standard deviation below [`STD_FLOOR`] are treated
/// as constant (std forced to 1) so they standardize to zero.
pub fn fit_standardization<S: Scalar>(inputs: &Array2<S>) -> (Vec<S>, Vec<S>) {
    let rows = inputs.nrows().max(1);
    let inv = S::one() / S::of_usize(rows);
    let mut mean = Vec::with_capacity(inputs.ncols());
    let mut std = Vec::with_capacity(inputs.ncols());
    for col in inputs.columns() {
        let mu: S = col.iter().copied().sum::<S>() * inv;
        let var: S = col.iter().map(|&x| (x - mu) * (x - mu)).sum::<S>() * inv;
        let sd = var.sqrt();
        mean.push(mu);
        std.push(if sd > S::of(STD_FLOOR) { sd } else { S::one() });
    }
    (mean, std)
}

/// Applies `(x - mean) / std` per feature.
pub fn standardize<S: Scalar>(x: &[S], mean: &[S], std: &[S]) -> Vec<S> {
    x.iter()
        .zip(mean.iter().zip(std))
        .map(|(&xi, (&mu, &sd))| (xi - mu) / sd)
        .collect()
}
