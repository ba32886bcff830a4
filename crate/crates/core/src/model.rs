//! GCNH, GCN and MLP node classifiers.
//!
//! All three architectures share the same skeleton: `L` hidden layers with a
//! LeakyReLU activation followed by a linear classifier producing logits. A
//! GCNH layer encodes each node and its neighbors with two separate
//! one-layer MLPs, reduces the neighbor encodings with a sum, mean or max,
//! and mixes the two with a per-layer coefficient `beta = sigmoid(raw_beta)`:
//!
//! ```text
//! z_self  = act(dropout(H) W1 + b1)
//! z_neigh = AGG_{v in N(u)} act(dropout(H) W2 + b2)_v
//! H'      = (1 - beta) z_neigh + beta z_self
//! ```
//!
//! Random streams for initialization and dropout are keyed by
//! `(layer, branch)` rather than drawn in sequence, so a GCNH model whose
//! betas are pinned at 1 consumes exactly the same random numbers for its
//! center branch as an MLP with the same seed.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, LabelVector, NormalizedAdjacency};
use crate::tensor::{AggregationMode, Matrix, Tape, Var, LEAKY_RELU_SLOPE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Architecture {
    Gcnh,
    Gcn,
    Mlp,
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Gcnh => "gcnh",
            Self::Gcn => "gcn",
            Self::Mlp => "mlp",
        })
    }
}

impl FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gcnh" => Ok(Self::Gcnh),
            "gcn" => Ok(Self::Gcn),
            "mlp" => Ok(Self::Mlp),
            other => Err(Error::InvalidInput(format!("unknown architecture `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    pub architecture: Architecture,
    pub num_layers: usize,
    pub hidden_size: usize,
    pub dropout_rate: f64,
    pub aggregation: AggregationMode,
    pub beta_trainable: bool,
    /// Pins beta to this value (in `[0, 1]`); requires `beta_trainable = false`.
    pub beta_fixed_value: Option<f64>,
    /// Ablation: the neighbor MLP reuses the center MLP's weights.
    pub share_mlps: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            architecture: Architecture::Gcnh,
            num_layers: 1,
            hidden_size: 16,
            dropout_rate: 0.0,
            aggregation: AggregationMode::Sum,
            beta_trainable: true,
            beta_fixed_value: None,
            share_mlps: false,
        }
    }
}

impl ModelConfig {
    pub fn gcnh(num_layers: usize, hidden_size: usize) -> Self {
        Self {
            num_layers,
            hidden_size,
            ..Self::default()
        }
    }

    pub fn gcn(num_layers: usize, hidden_size: usize) -> Self {
        Self {
            architecture: Architecture::Gcn,
            ..Self::gcnh(num_layers, hidden_size)
        }
    }

    pub fn mlp(num_layers: usize, hidden_size: usize) -> Self {
        Self {
            architecture: Architecture::Mlp,
            ..Self::gcnh(num_layers, hidden_size)
        }
    }

    pub fn with_dropout(mut self, rate: f64) -> Self {
        self.dropout_rate = rate;
        self
    }

    pub fn with_aggregation(mut self, mode: AggregationMode) -> Self {
        self.aggregation = mode;
        self
    }

    pub fn with_fixed_beta(mut self, beta: f64) -> Self {
        self.beta_trainable = false;
        self.beta_fixed_value = Some(beta);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if self.num_layers == 0 {
            return bad("num_layers must be at least 1".into());
        }
        if self.hidden_size == 0 {
            return bad("hidden_size must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return bad(format!("dropout rate {} outside [0, 1)", self.dropout_rate));
        }
        if let Some(b) = self.beta_fixed_value {
            if self.beta_trainable {
                return bad("beta_fixed_value requires beta_trainable = false".into());
            }
            if !(0.0..=1.0).contains(&b) {
                return bad(format!("fixed beta {b} outside [0, 1]"));
            }
        }
        Ok(())
    }
}

/// Per-(step, layer, branch) dropout random streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DropoutStreams {
    seed: u64,
    step: u64,
}

impl DropoutStreams {
    pub fn new(seed: u64, step: u64) -> Self {
        Self { seed, step }
    }

    pub fn rng(&self, layer: usize, branch: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x6472_6f70_6f75_7421);
        rng.set_stream((self.step << 16) | ((layer as u64) << 1) | branch as u64);
        rng
    }
}

fn init_rng(seed: u64, layer: usize, slot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((layer as u64) << 2) | slot);
    rng
}

/// Graph-side inputs of a forward pass.
pub struct GraphInput<'a> {
    pub graph: &'a Graph,
    pub features: &'a Matrix,
    pub adjacency: NormalizedAdjacency,
}

impl<'a> GraphInput<'a> {
    pub fn new(graph: &'a Graph, features: &'a Matrix) -> Result<Self> {
        if features.rows() != graph.num_nodes() {
            return Err(Error::shape(
                "GraphInput",
                format!("{} feature rows for {} nodes", features.rows(), graph.num_nodes()),
            ));
        }
        Ok(Self {
            graph,
            features,
            adjacency: NormalizedAdjacency::new(graph),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Beta {
    Learned(usize),
    Frozen(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct GcnhSlots {
    w1: usize,
    b1: usize,
    w2: usize,
    b2: usize,
    beta: Beta,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct DenseSlots {
    w: usize,
    b: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Layers {
    Gcnh(Vec<GcnhSlots>),
    Dense(Vec<DenseSlots>),
}

/// Tape handles of one GCNH layer's parameters. `beta` is the mixing
/// coefficient itself, already squashed into `[0, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct GcnhLayerVars {
    pub w1: Var,
    pub b1: Var,
    pub w2: Var,
    pub b2: Var,
    pub beta: Var,
}

/// One GCNH layer on the tape. With `training = None` dropout is skipped.
#[allow(clippy::too_many_arguments)]
pub fn gcnh_layer_forward<'a>(
    tape: &mut Tape<'a>,
    graph: &'a Graph,
    h: Var,
    vars: &GcnhLayerVars,
    mode: AggregationMode,
    dropout_rate: f64,
    training: Option<&DropoutStreams>,
    layer: usize,
) -> Result<Var> {
    if tape.value(h).rows() != graph.num_nodes() {
        return Err(Error::shape(
            "gcnh_layer_forward",
            format!("{} rows for {} nodes", tape.value(h).rows(), graph.num_nodes()),
        ));
    }
    let center_in = dropout_branch(tape, h, dropout_rate, training, layer, 0)?;
    let neigh_in = dropout_branch(tape, h, dropout_rate, training, layer, 1)?;

    let pre = tape.matmul(center_in, vars.w1)?;
    let pre = tape.add_row_bias(pre, vars.b1)?;
    let z_self = tape.leaky_relu(pre, LEAKY_RELU_SLOPE);

    let pre = tape.matmul(neigh_in, vars.w2)?;
    let pre = tape.add_row_bias(pre, vars.b2)?;
    let encoded = tape.leaky_relu(pre, LEAKY_RELU_SLOPE);
    let z_neigh = tape.neighbor_aggregate(graph, encoded, mode)?;

    tape.mix(z_neigh, z_self, vars.beta)
}

/// One GCN layer: `act(A_norm dropout(H) W + b)`.
#[allow(clippy::too_many_arguments)]
pub fn gcn_layer_forward<'a>(
    tape: &mut Tape<'a>,
    adjacency: &'a NormalizedAdjacency,
    h: Var,
    w: Var,
    b: Var,
    dropout_rate: f64,
    training: Option<&DropoutStreams>,
    layer: usize,
) -> Result<Var> {
    let input = dropout_branch(tape, h, dropout_rate, training, layer, 0)?;
    let projected = tape.matmul(input, w)?;
    let propagated = tape.propagate(adjacency, projected)?;
    let pre = tape.add_row_bias(propagated, b)?;
    Ok(tape.leaky_relu(pre, LEAKY_RELU_SLOPE))
}

fn mlp_layer_forward(
    tape: &mut Tape<'_>,
    h: Var,
    w: Var,
    b: Var,
    dropout_rate: f64,
    training: Option<&DropoutStreams>,
    layer: usize,
) -> Result<Var> {
    let input = dropout_branch(tape, h, dropout_rate, training, layer, 0)?;
    let pre = tape.matmul(input, w)?;
    let pre = tape.add_row_bias(pre, b)?;
    Ok(tape.leaky_relu(pre, LEAKY_RELU_SLOPE))
}

fn dropout_branch(
    tape: &mut Tape<'_>,
    h: Var,
    rate: f64,
    training: Option<&DropoutStreams>,
    layer: usize,
    branch: usize,
) -> Result<Var> {
    match training {
        Some(streams) if rate > 0.0 => {
            let mut rng = streams.rng(layer, branch);
            tape.dropout(h, rate, true, &mut rng)
        }
        _ => Ok(h),
    }
}

/// Logits node plus the tape handle of every parameter, in parameter order.
pub struct Forward {
    pub logits: Var,
    pub params: Vec<Var>,
}

/// Row-wise class distribution and its argmax.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionOutput {
    pub class_probs: Matrix,
    pub predicted: Vec<usize>,
}

/// Softmax per row and argmax with ties going to the lowest class index.
pub fn predict(logits: &Matrix) -> PredictionOutput {
    let mut probs = logits.clone();
    let mut predicted = Vec::with_capacity(logits.rows());
    for r in 0..logits.rows() {
        let row = probs.row_mut(r);
        let mut best = 0;
        for j in 1..row.len() {
            if row[j] > row[best] {
                best = j;
            }
        }
        predicted.push(best);
        let max = row[best];
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        row.iter_mut().for_each(|v| *v /= sum);
    }
    PredictionOutput {
        class_probs: probs,
        predicted,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    config: ModelConfig,
    input_dim: usize,
    num_classes: usize,
    seed: u64,
    params: Vec<Matrix>,
    names: Vec<String>,
    layers: Layers,
    classifier: DenseSlots,
}

enum Init {
    Glorot,
    Zeros,
}

impl Model {
    /// Glorot-uniform weights, zero biases and `raw_beta = 0` (beta = 0.5).
    pub fn new(config: ModelConfig, input_dim: usize, num_classes: usize, seed: u64) -> Result<Self> {
        config.validate()?;
        if input_dim == 0 || num_classes < 2 {
            return Err(Error::InvalidInput(format!(
                "input_dim {input_dim} and num_classes {num_classes} must be >= 1 and >= 2"
            )));
        }
        let mut params = Vec::new();
        let mut names = Vec::new();
        let mut add = |name: String, rows: usize, cols: usize, init: Init, layer: usize, slot: u64| {
            let m = match init {
                Init::Glorot => Matrix::glorot(rows, cols, &mut init_rng(seed, layer, slot)),
                Init::Zeros => Matrix::zeros(rows, cols),
            };
            params.push(m);
            names.push(name);
            params.len() - 1
        };

        let h = config.hidden_size;
        let layers = match config.architecture {
            Architecture::Gcnh => {
                let mut slots = Vec::with_capacity(config.num_layers);
                for l in 0..config.num_layers {
                    let fan_in = if l == 0 { input_dim } else { h };
                    let w1 = add(format!("layer{l}.w1"), fan_in, h, Init::Glorot, l, 0);
                    let b1 = add(format!("layer{l}.b1"), 1, h, Init::Zeros, l, 0);
                    let (w2, b2) = if config.share_mlps {
                        (w1, b1)
                    } else {
                        (
                            add(format!("layer{l}.w2"), fan_in, h, Init::Glorot, l, 1),
                            add(format!("layer{l}.b2"), 1, h, Init::Zeros, l, 1),
                        )
                    };
                    let beta = if config.beta_trainable {
                        Beta::Learned(add(format!("layer{l}.raw_beta"), 1, 1, Init::Zeros, l, 2))
                    } else {
                        Beta::Frozen(config.beta_fixed_value.unwrap_or(0.5))
                    };
                    slots.push(GcnhSlots { w1, b1, w2, b2, beta });
                }
                Layers::Gcnh(slots)
            }
            Architecture::Gcn | Architecture::Mlp => {
                let slots = (0..config.num_layers)
                    .map(|l| {
                        let fan_in = if l == 0 { input_dim } else { h };
                        DenseSlots {
                            w: add(format!("layer{l}.w"), fan_in, h, Init::Glorot, l, 0),
                            b: add(format!("layer{l}.b"), 1, h, Init::Zeros, l, 0),
                        }
                    })
                    .collect();
                Layers::Dense(slots)
            }
        };
        let l = config.num_layers;
        let classifier = DenseSlots {
            w: add("classifier.w".into(), h, num_classes, Init::Glorot, l, 0),
            b: add("classifier.b".into(), 1, num_classes, Init::Zeros, l, 0),
        };

        Ok(Self {
            config,
            input_dim,
            num_classes,
            seed,
            params,
            names,
            layers,
            classifier,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Trainable parameter tensors. Shared MLP weights appear once.
    pub fn params(&self) -> &[Matrix] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [Matrix] {
        &mut self.params
    }

    pub fn param_names(&self) -> &[String] {
        &self.names
    }

    pub fn set_params(&mut self, params: Vec<Matrix>) -> Result<()> {
        if params.len() != self.params.len()
            || params.iter().zip(&self.params).any(|(a, b)| a.shape() != b.shape())
        {
            return Err(Error::shape("set_params", "parameter layout differs"));
        }
        self.params = params;
        Ok(())
    }

    /// Number of trainable scalars.
    pub fn count_params(&self) -> usize {
        self.params.iter().map(Matrix::len).sum()
    }

    /// `sigmoid(raw_beta)` per layer (or the pinned value), in layer order.
    pub fn extract_betas(&self) -> Result<Vec<f64>> {
        match &self.layers {
            Layers::Gcnh(slots) => Ok(slots
                .iter()
                .map(|s| match s.beta {
                    Beta::Learned(i) => crate::tensor::sigmoid(self.params[i].data()[0]),
                    Beta::Frozen(b) => b,
                })
                .collect()),
            Layers::Dense(_) => Err(Error::NotGcnh),
        }
    }

    /// Records the forward pass on `tape` using `params` in place of the
    /// model's own values (same layout). Dropout is applied iff `training`
    /// is set; parameter leaves require gradients iff `track_grads`.
    pub fn forward_with<'a>(
        &self,
        params: &'a [Matrix],
        tape: &mut Tape<'a>,
        input: &'a GraphInput<'a>,
        training: Option<&DropoutStreams>,
        track_grads: bool,
    ) -> Result<Forward> {
        if params.len() != self.params.len() {
            return Err(Error::shape("forward", "parameter layout differs"));
        }
        if input.features.cols() != self.input_dim {
            return Err(Error::shape(
                "forward",
                format!("{} feature columns, model expects {}", input.features.cols(), self.input_dim),
            ));
        }
        let vars: Vec<Var> = params.iter().map(|p| tape.leaf_ref(p, track_grads)).collect();
        let mut h = tape.leaf_ref(input.features, false);
        let rate = self.config.dropout_rate;

        match &self.layers {
            Layers::Gcnh(slots) => {
                for (l, s) in slots.iter().enumerate() {
                    let beta = match s.beta {
                        Beta::Learned(i) => tape.sigmoid_scalar(vars[i])?,
                        Beta::Frozen(b) => tape.constant(Matrix::scalar(b)),
                    };
                    let layer_vars = GcnhLayerVars {
                        w1: vars[s.w1],
                        b1: vars[s.b1],
                        w2: vars[s.w2],
                        b2: vars[s.b2],
                        beta,
                    };
                    h = gcnh_layer_forward(
                        tape,
                        input.graph,
                        h,
                        &layer_vars,
                        self.config.aggregation,
                        rate,
                        training,
                        l,
                    )?;
                }
            }
            Layers::Dense(slots) => {
                for (l, s) in slots.iter().enumerate() {
                    h = match self.config.architecture {
                        Architecture::Gcn => gcn_layer_forward(
                            tape,
                            &input.adjacency,
                            h,
                            vars[s.w],
                            vars[s.b],
                            rate,
                            training,
                            l,
                        )?,
                        _ => mlp_layer_forward(tape, h, vars[s.w], vars[s.b], rate, training, l)?,
                    };
                }
            }
        }

        let logits = tape.matmul(h, vars[self.classifier.w])?;
        let logits = tape.add_row_bias(logits, vars[self.classifier.b])?;
        Ok(Forward { logits, params: vars })
    }

    pub fn forward<'a>(
        &'a self,
        tape: &mut Tape<'a>,
        input: &'a GraphInput<'a>,
        training: Option<&DropoutStreams>,
        track_grads: bool,
    ) -> Result<Forward> {
        self.forward_with(&self.params, tape, input, training, track_grads)
    }

    /// Evaluation-mode logits.
    pub fn logits(&self, input: &GraphInput<'_>) -> Result<Matrix> {
        let mut tape = Tape::new();
        let f = self.forward(&mut tape, input, None, false)?;
        Ok(tape.value(f.logits).clone())
    }

    /// Masked mean NLL and its gradient with respect to `params`.
    pub fn loss_and_grads(
        &self,
        params: &[Matrix],
        input: &GraphInput<'_>,
        labels: &LabelVector,
        mask: &[usize],
        training: Option<&DropoutStreams>,
    ) -> Result<(f64, Vec<Matrix>)> {
        let mut tape = Tape::new();
        let f = self.forward_with(params, &mut tape, input, training, true)?;
        let loss = tape.softmax_nll(f.logits, labels, mask)?;
        let value = tape.value(loss).data()[0];
        if !value.is_finite() {
            return Err(Error::NonFinite(format!("loss {value}")));
        }
        tape.backward(loss)?;
        let grads = f.params.iter().map(|&v| tape.grad_or_zeros(v)).collect();
        Ok((value, grads))
    }

    pub fn save_checkpoint(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let ckpt = Checkpoint {
            format: CHECKPOINT_FORMAT.into(),
            version: CHECKPOINT_VERSION,
            config: self.config.clone(),
            input_dim: self.input_dim,
            num_classes: self.num_classes,
            seed: self.seed,
            params: self
                .names
                .iter()
                .zip(&self.params)
                .map(|(name, m)| NamedTensor {
                    name: name.clone(),
                    rows: m.rows(),
                    cols: m.cols(),
                    data: m.data().to_vec(),
                })
                .collect(),
        };
        let json = serde_json::to_string(&ckpt)?;
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let ckpt: Checkpoint = serde_json::from_str(&text)?;
        if ckpt.format != CHECKPOINT_FORMAT || ckpt.version != CHECKPOINT_VERSION {
            return Err(Error::InvalidInput(format!(
                "unsupported checkpoint {} v{}",
                ckpt.format, ckpt.version
            )));
        }
        let mut model = Model::new(ckpt.config, ckpt.input_dim, ckpt.num_classes, ckpt.seed)?;
        if ckpt.params.len() != model.params.len() {
            return Err(Error::InvalidInput("checkpoint parameter count differs".into()));
        }
        let mut params = Vec::with_capacity(ckpt.params.len());
        for (t, name) in ckpt.params.into_iter().zip(&model.names) {
            if &t.name != name {
                return Err(Error::InvalidInput(format!(
                    "checkpoint tensor `{}` where `{name}` was expected",
                    t.name
                )));
            }
            params.push(Matrix::new(t.rows, t.cols, t.data)?);
        }
        model.set_params(params)?;
        Ok(model)
    }
}

const CHECKPOINT_FORMAT: &str = "gcnh-checkpoint";
const CHECKPOINT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    format: String,
    version: u32,
    config: ModelConfig,
    input_dim: usize,
    num_classes: usize,
    seed: u64,
    params: Vec<NamedTensor>,
}

#[derive(Serialize, Deserialize)]
struct NamedTensor {
    name: String,
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}
