//! From-scratch feedforward network used for both the access-point
//! classifier (softmax output) and the mobility delta regressor (identity
//! output). Double precision throughout; training is fully seeded.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::LearningError;
use crate::geometry::Vec3;
use crate::scenario::AccessPointId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputLayer {
    Softmax,
    Identity,
}

/// Feedforward network with rectified-linear hidden layers and per-feature
/// input standardization baked into the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub layer_dims: Vec<usize>,
    /// Layer l weight matrix, row-major, shape layer_dims[l+1] x layer_dims[l].
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
    pub output: OutputLayer,
    pub norm_shift: Vec<f64>,
    pub norm_scale: Vec<f64>,
    /// Output-class meanings for the classifier; empty for a regressor.
    pub class_map: Vec<AccessPointId>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub momentum: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.05,
            epochs: 200,
            batch_size: 64,
            seed: 0,
            momentum: 0.9,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<(), LearningError> {
        if !(self.learning_rate > 0.0) {
            return Err(LearningError::InvalidConfig("learning_rate must be > 0".into()));
        }
        if self.batch_size == 0 {
            return Err(LearningError::InvalidConfig("batch_size must be > 0".into()));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(LearningError::InvalidConfig("momentum must be in [0, 1)".into()));
        }
        Ok(())
    }
}

/// Supervised targets: class indices or real vectors.
#[derive(Debug, Clone)]
pub enum Targets {
    Classes(Vec<usize>),
    Values(Vec<Vec<f64>>),
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub features: Vec<Vec<f64>>,
    pub targets: Targets,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    fn validate(&self, input_dim: usize, output_dim: usize) -> Result<(), LearningError> {
        if self.is_empty() {
            return Err(LearningError::InvalidDataset("empty dataset".into()));
        }
        for f in &self.features {
            if f.len() != input_dim {
                return Err(LearningError::DimensionMismatch {
                    expected: input_dim,
                    got: f.len(),
                    context: "feature vector".into(),
                });
            }
        }
        match &self.targets {
            Targets::Classes(cs) => {
                if cs.len() != self.features.len() {
                    return Err(LearningError::InvalidDataset(
                        "feature/label count mismatch".into(),
                    ));
                }
                if let Some(&c) = cs.iter().find(|&&c| c >= output_dim) {
                    return Err(LearningError::InvalidDataset(format!(
                        "class index {c} out of range for {output_dim} classes"
                    )));
                }
            }
            Targets::Values(vs) => {
                if vs.len() != self.features.len() {
                    return Err(LearningError::InvalidDataset(
                        "feature/target count mismatch".into(),
                    ));
                }
                for v in vs {
                    if v.len() != output_dim {
                        return Err(LearningError::DimensionMismatch {
                            expected: output_dim,
                            got: v.len(),
                            context: "target vector".into(),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Parameter-shaped gradient buffers.
#[derive(Debug, Clone)]
pub struct Grads {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl MlpModel {
    /// Seeded Glorot-uniform initialization: U(+-sqrt(6 / (fan_in + fan_out))).
    pub fn init(layer_dims: &[usize], output: OutputLayer, seed: u64) -> Self {
        assert!(layer_dims.len() >= 2, "need at least input and output dims");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for l in 0..layer_dims.len() - 1 {
            let (fan_in, fan_out) = (layer_dims[l], layer_dims[l + 1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            weights.push(
                (0..fan_in * fan_out)
                    .map(|_| rng.gen_range(-bound..bound))
                    .collect(),
            );
            biases.push(vec![0.0; fan_out]);
        }
        MlpModel {
            layer_dims: layer_dims.to_vec(),
            weights,
            biases,
            output,
            norm_shift: vec![0.0; layer_dims[0]],
            norm_scale: vec![1.0; layer_dims[0]],
            class_map: Vec::new(),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.layer_dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_dims.last().unwrap()
    }

    /// Forward pass. Classifier outputs are a probability vector.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, LearningError> {
        if x.len() != self.input_dim() {
            return Err(LearningError::DimensionMismatch {
                expected: self.input_dim(),
                got: x.len(),
                context: "forward input".into(),
            });
        }
        Ok(self.forward_cache(x).pop().unwrap())
    }

    /// Activations of every layer (index 0 = normalized input), used by
    /// backprop.
    fn forward_cache(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let normed: Vec<f64> = x
            .iter()
            .zip(self.norm_shift.iter().zip(&self.norm_scale))
            .map(|(v, (sh, sc))| (v - sh) / sc)
            .collect();
        let mut acts = vec![normed];
        let layers = self.weights.len();
        for l in 0..layers {
            let (n_in, n_out) = (self.layer_dims[l], self.layer_dims[l + 1]);
            let prev = acts.last().unwrap();
            let w = &self.weights[l];
            let mut z = self.biases[l].clone();
            for (i, zi) in z.iter_mut().enumerate() {
                let row = &w[i * n_in..(i + 1) * n_in];
                for (a, b) in row.iter().zip(prev) {
                    *zi += a * b;
                }
            }
            if l + 1 < layers {
                for v in z.iter_mut() {
                    if *v < 0.0 {
                        *v = 0.0;
                    }
                }
            } else if self.output == OutputLayer::Softmax {
                softmax_in_place(&mut z);
            }
            let _ = n_out;
            acts.push(z);
        }
        acts
    }

    pub fn zero_grads(&self) -> Grads {
        Grads {
            weights: self.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            biases: self.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    /// Mean loss over the batch and exact analytic gradients.
    ///
    /// Classifier: cross-entropy over softmax outputs. Regressor: squared
    /// error summed over output dimensions, averaged over the batch.
    pub fn loss_and_grad(&self, batch: &Dataset) -> Result<(f64, Grads), LearningError> {
        batch.validate(self.input_dim(), self.output_dim())?;
        let b = batch.len() as f64;
        let mut grads = self.zero_grads();
        let mut loss = 0.0;
        let layers = self.weights.len();
        for (idx, x) in batch.features.iter().enumerate() {
            let acts = self.forward_cache(x);
            let out = acts.last().unwrap();
            // d(loss)/d(z_last), already averaged over the batch.
            let mut delta: Vec<f64> = match (&batch.targets, self.output) {
                (Targets::Classes(cs), OutputLayer::Softmax) => {
                    let y = cs[idx];
                    loss += -(out[y].max(1e-300)).ln() / b;
                    out.iter()
                        .enumerate()
                        .map(|(j, p)| (p - if j == y { 1.0 } else { 0.0 }) / b)
                        .collect()
                }
                (Targets::Values(vs), OutputLayer::Identity) => {
                    let y = &vs[idx];
                    let err: Vec<f64> = out.iter().zip(y).map(|(o, t)| o - t).collect();
                    loss += err.iter().map(|e| e * e).sum::<f64>() / b;
                    err.iter().map(|e| 2.0 * e / b).collect()
                }
                _ => {
                    return Err(LearningError::InvalidDataset(
                        "target kind does not match the model's output layer".into(),
                    ))
                }
            };
            for l in (0..layers).rev() {
                let n_in = self.layer_dims[l];
                let prev = &acts[l];
                let gw = &mut grads.weights[l];
                for (i, d) in delta.iter().enumerate() {
                    grads.biases[l][i] += d;
                    let row = &mut gw[i * n_in..(i + 1) * n_in];
                    for (g, p) in row.iter_mut().zip(prev) {
                        *g += d * p;
                    }
                }
                if l > 0 {
                    let w = &self.weights[l];
                    let mut next = vec![0.0; n_in];
                    for (i, d) in delta.iter().enumerate() {
                        let row = &w[i * n_in..(i + 1) * n_in];
                        for (nx, a) in next.iter_mut().zip(row) {
                            *nx += d * a;
                        }
                    }
                    // ReLU derivative through the hidden activation.
                    for (nx, a) in next.iter_mut().zip(prev) {
                        if *a <= 0.0 {
                            *nx = 0.0;
                        }
                    }
                    delta = next;
                }
            }
        }
        Ok((loss, grads))
    }

    /// Argmax class mapped through `class_map`; ties break to the lowest
    /// class index.
    pub fn predict_access_point(&self, pos: Vec3) -> Result<AccessPointId, LearningError> {
        if self.class_map.len() != self.output_dim() {
            return Err(LearningError::Validation {
                field: "class_map".into(),
                reason: format!(
                    "{} entries for {} output classes",
                    self.class_map.len(),
                    self.output_dim()
                ),
            });
        }
        let out = self.forward(&[pos.x, pos.y, pos.z])?;
        let mut best = 0;
        for (i, v) in out.iter().enumerate() {
            if *v > out[best] {
                best = i;
            }
        }
        Ok(self.class_map[best])
    }

    pub fn validate(&self) -> Result<(), LearningError> {
        if self.layer_dims.len() < 2 {
            return Err(LearningError::Validation {
                field: "layer_dims".into(),
                reason: "need at least two layers".into(),
            });
        }
        if self.weights.len() != self.layer_dims.len() - 1
            || self.biases.len() != self.layer_dims.len() - 1
        {
            return Err(LearningError::Validation {
                field: "weights".into(),
                reason: "layer count mismatch".into(),
            });
        }
        for l in 0..self.weights.len() {
            let want_w = self.layer_dims[l] * self.layer_dims[l + 1];
            if self.weights[l].len() != want_w {
                return Err(LearningError::Validation {
                    field: format!("weights[{l}]"),
                    reason: format!("expected {} entries, got {}", want_w, self.weights[l].len()),
                });
            }
            if self.biases[l].len() != self.layer_dims[l + 1] {
                return Err(LearningError::Validation {
                    field: format!("biases[{l}]"),
                    reason: format!(
                        "expected {} entries, got {}",
                        self.layer_dims[l + 1],
                        self.biases[l].len()
                    ),
                });
            }
            if self.weights[l].iter().any(|v| !v.is_finite())
                || self.biases[l].iter().any(|v| !v.is_finite())
            {
                return Err(LearningError::Validation {
                    field: format!("weights[{l}]"),
                    reason: "non-finite parameter".into(),
                });
            }
        }
        if self.norm_shift.len() != self.layer_dims[0] || self.norm_scale.len() != self.layer_dims[0]
        {
            return Err(LearningError::Validation {
                field: "normalization".into(),
                reason: "length must match the input dimension".into(),
            });
        }
        if self.norm_scale.iter().any(|s| !(*s > 0.0)) {
            return Err(LearningError::Validation {
                field: "norm_scale".into(),
                reason: "scale entries must be positive".into(),
            });
        }
        if !self.class_map.is_empty() && self.class_map.len() != self.output_dim() {
            return Err(LearningError::Validation {
                field: "class_map".into(),
                reason: "length must match the output dimension".into(),
            });
        }
        Ok(())
    }
}

fn softmax_in_place(z: &mut [f64]) {
    let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in z.iter_mut() {
        *v /= sum;
    }
}

/// Fit per-feature standardization from the data. Features with (near-)zero
/// spread keep scale 1 so normalization never divides by zero.
fn fit_normalization(features: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let dim = features[0].len();
    let n = features.len() as f64;
    let mut mean = vec![0.0; dim];
    for f in features {
        for (m, v) in mean.iter_mut().zip(f) {
            *m += v / n;
        }
    }
    let mut var = vec![0.0; dim];
    for f in features {
        for ((s, v), m) in var.iter_mut().zip(f).zip(&mean) {
            *s += (v - m) * (v - m) / n;
        }
    }
    let scale = var
        .iter()
        .map(|v| {
            let sd = v.sqrt();
            if sd > 1e-12 {
                sd
            } else {
                1.0
            }
        })
        .collect();
    (mean, scale)
}

/// Minibatch SGD with momentum. Deterministic given the seed: shuffling and
/// initialization both derive from it. Returns the trained model and the
/// per-epoch mean loss trace.
pub fn train(
    model: &MlpModel,
    data: &Dataset,
    cfg: &TrainConfig,
) -> Result<(MlpModel, Vec<f64>), LearningError> {
    cfg.validate()?;
    data.validate(model.input_dim(), model.output_dim())?;
    let mut m = model.clone();
    let (shift, scale) = fit_normalization(&data.features);
    m.norm_shift = shift;
    m.norm_scale = scale;
    let mut velocity = m.zero_grads();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut losses = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        let mut batches = 0usize;
        for chunk in order.chunks(cfg.batch_size) {
            let batch = Dataset {
                features: chunk.iter().map(|&i| data.features[i].clone()).collect(),
                targets: match &data.targets {
                    Targets::Classes(cs) => {
                        Targets::Classes(chunk.iter().map(|&i| cs[i]).collect())
                    }
                    Targets::Values(vs) => {
                        Targets::Values(chunk.iter().map(|&i| vs[i].clone()).collect())
                    }
                },
            };
            let (loss, grads) = m.loss_and_grad(&batch)?;
            epoch_loss += loss;
            batches += 1;
            for l in 0..m.weights.len() {
                for (w, (v, g)) in m.weights[l]
                    .iter_mut()
                    .zip(velocity.weights[l].iter_mut().zip(&grads.weights[l]))
                {
                    *v = cfg.momentum * *v - cfg.learning_rate * g;
                    *w += *v;
                }
                for (b, (v, g)) in m.biases[l]
                    .iter_mut()
                    .zip(velocity.biases[l].iter_mut().zip(&grads.biases[l]))
                {
                    *v = cfg.momentum * *v - cfg.learning_rate * g;
                    *b += *v;
                }
            }
        }
        let mean = epoch_loss / batches.max(1) as f64;
        if !mean.is_finite() {
            return Err(LearningError::NonFiniteLoss { epoch, loss: mean });
        }
        losses.push(mean);
    }
    Ok((m, losses))
}

/// Persist a model as a JSON document; floating-point values round-trip
/// exactly at double precision.
pub fn save_model(m: &MlpModel, path: &Path) -> Result<(), LearningError> {
    m.validate()?;
    let text = serde_json::to_string_pretty(m).map_err(|e| LearningError::Parse(e.to_string()))?;
    std::fs::write(path, text).map_err(|e| LearningError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

pub fn load_model(path: &Path) -> Result<MlpModel, LearningError> {
    let text = std::fs::read_to_string(path).map_err(|e| LearningError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let m: MlpModel =
        serde_json::from_str(&text).map_err(|e| LearningError::Parse(e.to_string()))?;
    m.validate()?;
    Ok(m)
}

/// Classification accuracy of a classifier model on labeled features.
pub fn accuracy(m: &MlpModel, data: &Dataset) -> Result<f64, LearningError> {
    let labels = match &data.targets {
        Targets::Classes(cs) => cs,
        Targets::Values(_) => {
            return Err(LearningError::InvalidDataset(
                "accuracy needs class targets".into(),
            ))
        }
    };
    let mut hits = 0usize;
    for (f, &y) in data.features.iter().zip(labels) {
        let out = m.forward(f)?;
        let mut best = 0;
        for (i, v) in out.iter().enumerate() {
            if *v > out[best] {
                best = i;
            }
        }
        if best == y {
            hits += 1;
        }
    }
    Ok(hits as f64 / data.len() as f64)
}
