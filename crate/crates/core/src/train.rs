//! Transductive training: full-graph forward per batch, loss on the batch's
//! nodes only, best-validation checkpointing, the multi-split protocol and
//! grid search.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, SplitMask};
use crate::error::{Error, Result};
use crate::graph::LabelVector;
use crate::model::{predict, Architecture, DropoutStreams, GraphInput, Model, ModelConfig};
use crate::tensor::{AdamConfig, AdamState, AggregationMode, Matrix};

/// Number of training nodes per optimizer step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BatchSizeRepr", into = "BatchSizeRepr")]
pub enum BatchSize {
    /// All training nodes in one batch.
    Full,
    Nodes(usize),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum BatchSizeRepr {
    Nodes(usize),
    Word(String),
}

impl TryFrom<BatchSizeRepr> for BatchSize {
    type Error = String;

    fn try_from(r: BatchSizeRepr) -> std::result::Result<Self, String> {
        match r {
            BatchSizeRepr::Nodes(0) => Err("batch size must be >= 1".into()),
            BatchSizeRepr::Nodes(n) => Ok(Self::Nodes(n)),
            BatchSizeRepr::Word(w) => w.parse(),
        }
    }
}

impl From<BatchSize> for BatchSizeRepr {
    fn from(b: BatchSize) -> Self {
        match b {
            BatchSize::Full => Self::Word("full".into()),
            BatchSize::Nodes(n) => Self::Nodes(n),
        }
    }
}

impl fmt::Display for BatchSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Full => f.write_str("full"),
            Self::Nodes(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for BatchSize {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s.eq_ignore_ascii_case("full") {
            return Ok(Self::Full);
        }
        match s.parse::<usize>() {
            Ok(0) | Err(_) => Err(format!("batch size `{s}` is neither `full` nor a positive integer")),
            Ok(n) => Ok(Self::Nodes(n)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub epochs: usize,
    pub batch_size: BatchSize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 5e-3,
            weight_decay: 5e-3,
            epochs: 100,
            batch_size: BatchSize::Full,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn new(epochs: usize, batch_size: BatchSize, seed: u64) -> Self {
        Self {
            epochs,
            batch_size,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidInput("epochs must be >= 1".into()));
        }
        if self.batch_size == BatchSize::Nodes(0) {
            return Err(Error::InvalidInput("batch size must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) || self.weight_decay.is_nan() || self.weight_decay < 0.0 {
            return Err(Error::InvalidInput(format!(
                "learning rate {} / weight decay {} out of range",
                self.learning_rate, self.weight_decay
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    /// Mean training loss over the epoch, weighted by batch size.
    pub train_loss: f64,
    pub val_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub test_accuracy: f64,
    pub best_val_accuracy: f64,
    /// Zero-based epoch whose parameters produced `test_accuracy`.
    pub best_epoch: usize,
    /// Per-layer beta of the selected checkpoint; empty unless GCNH.
    pub betas: Vec<f64>,
    /// Per-layer beta after the last epoch; empty unless GCNH.
    pub final_betas: Vec<f64>,
    /// Wall time of the optimizer part of each epoch (forward, backward,
    /// Adam); validation passes are excluded. Not serialized, so that
    /// result files stay byte-identical across runs.
    #[serde(skip_serializing, default)]
    pub epoch_times_ms: Vec<f64>,
    pub param_count: usize,
    pub history: Vec<EpochRecord>,
}

/// Fraction of `mask` whose arg-max prediction matches its label.
pub fn accuracy(logits: &Matrix, labels: &LabelVector, mask: &[usize]) -> Result<f64> {
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    if logits.rows() != labels.len() || mask.iter().any(|&u| u >= labels.len()) {
        return Err(Error::shape(
            "accuracy",
            format!("{} logit rows, {} labels, mask outside range", logits.rows(), labels.len()),
        ));
    }
    let predicted = predict(&logits.select_rows(mask)).predicted;
    let correct = predicted
        .iter()
        .zip(mask)
        .filter(|(&p, &u)| p == labels.get(u))
        .count();
    Ok(correct as f64 / mask.len() as f64)
}

/// Evaluation-mode accuracy of `model` on the nodes in `mask`.
pub fn evaluate(model: &Model, dataset: &Dataset, mask: &[usize]) -> Result<f64> {
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    let input = GraphInput::new(&dataset.graph, &dataset.features)?;
    accuracy(&model.logits(&input)?, &dataset.labels, mask)
}

/// Trains a fresh model seeded with `train_config.seed` and returns it
/// restored to the best-validation epoch.
pub fn train_model(
    dataset: &Dataset,
    split: &SplitMask,
    model_config: &ModelConfig,
    train_config: &TrainConfig,
) -> Result<(Model, RunResult)> {
    train_config.validate()?;
    split.validate(0, dataset.num_nodes())?;
    let mut model = Model::new(
        model_config.clone(),
        dataset.num_features(),
        dataset.num_classes(),
        train_config.seed,
    )?;
    let input = GraphInput::new(&dataset.graph, &dataset.features)?;
    let adam = AdamConfig::new(train_config.learning_rate, train_config.weight_decay);
    let mut state = AdamState::new(model.params());
    let batch = match train_config.batch_size {
        BatchSize::Full => split.train.len(),
        BatchSize::Nodes(b) => b.min(split.train.len()),
    };

    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(train_config.seed);
    shuffle_rng.set_stream(u64::MAX);
    let mut order = split.train.clone();
    let mut params = model.params().to_vec();
    let mut best: Option<(usize, f64, Vec<Matrix>)> = None;
    let mut history = Vec::with_capacity(train_config.epochs);
    let mut epoch_times_ms = Vec::with_capacity(train_config.epochs);

    for epoch in 0..train_config.epochs {
        let start = Instant::now();
        order.shuffle(&mut shuffle_rng);
        let mut loss_sum = 0.0;
        for (b, nodes) in order.chunks(batch).enumerate() {
            let streams = DropoutStreams::new(train_config.seed, state.step_count());
            let (loss, grads) = model
                .loss_and_grads(&params, &input, &dataset.labels, nodes, Some(&streams))
                .map_err(|e| match e {
                    Error::NonFinite(msg) => Error::NonFinite(format!("epoch {epoch}, batch {b}: {msg}")),
                    other => other,
                })?;
            loss_sum += loss * nodes.len() as f64;
            state.step(&adam, &mut params, &grads)?;
        }
        epoch_times_ms.push(start.elapsed().as_secs_f64() * 1e3);

        model.set_params(params.clone())?;
        let val_accuracy = accuracy(&model.logits(&input)?, &dataset.labels, &split.val)?;
        history.push(EpochRecord {
            train_loss: loss_sum / order.len() as f64,
            val_accuracy,
        });
        if best.as_ref().is_none_or(|(_, v, _)| val_accuracy > *v) {
            best = Some((epoch, val_accuracy, params.clone()));
        }
    }

    let final_betas = match model_config.architecture {
        Architecture::Gcnh => model.extract_betas()?,
        _ => Vec::new(),
    };
    let (best_epoch, best_val_accuracy, best_params) = best.expect("at least one epoch");
    model.set_params(best_params)?;
    let test_accuracy = accuracy(&model.logits(&input)?, &dataset.labels, &split.test)?;
    let betas = match model_config.architecture {
        Architecture::Gcnh => model.extract_betas()?,
        _ => Vec::new(),
    };
    let result = RunResult {
        test_accuracy,
        best_val_accuracy,
        best_epoch,
        betas,
        final_betas,
        epoch_times_ms,
        param_count: model.count_params(),
        history,
    };
    Ok((model, result))
}

pub fn train(
    dataset: &Dataset,
    split: &SplitMask,
    model_config: &ModelConfig,
    train_config: &TrainConfig,
) -> Result<RunResult> {
    train_model(dataset, split, model_config, train_config).map(|(_, r)| r)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolResult {
    pub test_mean: f64,
    /// Sample standard deviation; 0 for a single split.
    pub test_std: f64,
    pub val_mean: f64,
    pub runs: Vec<RunResult>,
}

impl ProtocolResult {
    pub fn from_runs(runs: Vec<RunResult>) -> Self {
        let test: Vec<f64> = runs.iter().map(|r| r.test_accuracy).collect();
        let val: Vec<f64> = runs.iter().map(|r| r.best_val_accuracy).collect();
        let (test_mean, test_std) = mean_std(&test);
        Self {
            test_mean,
            test_std,
            val_mean: mean_std(&val).0,
            runs,
        }
    }
}

/// Mean and sample standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Runs `jobs` on a pool of `workers` threads; results keep input order.
pub fn run_parallel<T, R, F>(workers: usize, jobs: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    if workers <= 1 {
        return jobs.iter().map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    pool.install(|| jobs.par_iter().map(f).collect())
}

/// Trains once per split of `dataset`; split `i` uses seed
/// `train_config.seed + i`.
pub fn run_protocol(
    dataset: &Dataset,
    model_config: &ModelConfig,
    train_config: &TrainConfig,
    workers: usize,
) -> Result<ProtocolResult> {
    if dataset.splits.is_empty() {
        return Err(Error::InvalidInput(format!("dataset `{}` has no splits", dataset.name)));
    }
    let indices: Vec<usize> = (0..dataset.splits.len()).collect();
    let runs = run_parallel(workers, &indices, |&i| {
        let cfg = TrainConfig {
            seed: train_config.seed + i as u64,
            ..*train_config
        };
        train(dataset, &dataset.splits[i], model_config, &cfg)
    })?;
    Ok(ProtocolResult::from_runs(runs))
}

/// Candidate values per field. An empty list keeps the base value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HyperGrid {
    pub base_model: ModelConfig,
    pub base_train: TrainConfig,
    pub num_layers: Vec<usize>,
    pub batch_size: Vec<BatchSize>,
    pub epochs: Vec<usize>,
    pub hidden_size: Vec<usize>,
    pub dropout_rate: Vec<f64>,
    pub aggregation: Vec<AggregationMode>,
    pub learning_rate: Vec<f64>,
    pub weight_decay: Vec<f64>,
}

impl Default for HyperGrid {
    fn default() -> Self {
        Self::singleton(ModelConfig::default(), TrainConfig::default())
    }
}

fn or_base<T: Clone>(values: &[T], base: T) -> Vec<T> {
    if values.is_empty() {
        vec![base]
    } else {
        values.to_vec()
    }
}

impl HyperGrid {
    pub fn singleton(model: ModelConfig, train: TrainConfig) -> Self {
        Self {
            base_model: model,
            base_train: train,
            num_layers: Vec::new(),
            batch_size: Vec::new(),
            epochs: Vec::new(),
            hidden_size: Vec::new(),
            dropout_rate: Vec::new(),
            aggregation: Vec::new(),
            learning_rate: Vec::new(),
            weight_decay: Vec::new(),
        }
    }

    /// Cartesian product in field order, last field varying fastest.
    pub fn configs(&self) -> Vec<(ModelConfig, TrainConfig)> {
        let m = &self.base_model;
        let t = &self.base_train;
        let mut out = Vec::new();
        for &num_layers in &or_base(&self.num_layers, m.num_layers) {
            for &batch_size in &or_base(&self.batch_size, t.batch_size) {
                for &epochs in &or_base(&self.epochs, t.epochs) {
                    for &hidden_size in &or_base(&self.hidden_size, m.hidden_size) {
                        for &dropout_rate in &or_base(&self.dropout_rate, m.dropout_rate) {
                            for &aggregation in &or_base(&self.aggregation, m.aggregation) {
                                for &learning_rate in &or_base(&self.learning_rate, t.learning_rate) {
                                    for &weight_decay in &or_base(&self.weight_decay, t.weight_decay) {
                                        out.push((
                                            ModelConfig {
                                                num_layers,
                                                hidden_size,
                                                dropout_rate,
                                                aggregation,
                                                ..m.clone()
                                            },
                                            TrainConfig {
                                                learning_rate,
                                                weight_decay,
                                                epochs,
                                                batch_size,
                                                seed: t.seed,
                                            },
                                        ));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.configs().len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridEntry {
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub param_count: usize,
    pub result: ProtocolResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub entries: Vec<GridEntry>,
    /// Index into `entries` of the selected configuration.
    pub best: usize,
}

impl GridResult {
    pub fn best_entry(&self) -> &GridEntry {
        &self.entries[self.best]
    }
}

/// Runs the protocol for every grid point and selects the highest mean
/// validation accuracy; ties go to fewer parameters, then grid order.
pub fn grid_search(dataset: &Dataset, grid: &HyperGrid, workers: usize) -> Result<GridResult> {
    let configs = grid.configs();
    let mut param_counts = Vec::with_capacity(configs.len());
    for (m, _) in &configs {
        m.validate()?;
        param_counts.push(Model::new(m.clone(), dataset.num_features(), dataset.num_classes(), 0)?.count_params());
    }
    let splits = dataset.splits.len();
    let jobs: Vec<(usize, usize)> = (0..configs.len())
        .flat_map(|c| (0..splits).map(move |s| (c, s)))
        .collect();
    let mut runs = run_parallel(workers, &jobs, |&(c, s)| {
        let (m, t) = &configs[c];
        let cfg = TrainConfig {
            seed: t.seed + s as u64,
            ..*t
        };
        train(dataset, &dataset.splits[s], m, &cfg)
    })?
    .into_iter();

    let entries: Vec<GridEntry> = configs
        .into_iter()
        .zip(param_counts)
        .map(|((model, train), param_count)| GridEntry {
            model,
            train,
            param_count,
            result: ProtocolResult::from_runs(runs.by_ref().take(splits).collect()),
        })
        .collect();
    let best = select_best(&entries);
    Ok(GridResult { entries, best })
}

fn select_best(entries: &[GridEntry]) -> usize {
    let mut best = 0;
    for (i, e) in entries.iter().enumerate().skip(1) {
        let b = &entries[best];
        let better = e.result.val_mean > b.result.val_mean
            || (e.result.val_mean == b.result.val_mean && e.param_count < b.param_count);
        if better {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::generate_splits;
    use crate::graph::Graph;

    /// Ring graph whose features are the one-hot labels.
    fn one_hot_dataset(n: usize, classes: usize, splits: usize) -> Dataset {
        let edges: Vec<(usize, usize)> = (0..n).map(|u| (u, (u + 1) % n)).collect();
        let graph = Graph::from_edges(n, &edges).unwrap();
        let labels: Vec<usize> = (0..n).map(|u| (u * 7 + u / 3) % classes).collect();
        let mut x = Matrix::zeros(n, classes);
        for (u, &c) in labels.iter().enumerate() {
            x.set(u, c, 1.0);
        }
        let labels = LabelVector::new(labels, classes).unwrap();
        let splits = generate_splits(n, crate::data::BENCHMARK_SPLIT_RATIOS, splits, 3).unwrap();
        Dataset::new("onehot", graph, x, labels, splits).unwrap()
    }

    #[test]
    fn mlp_learns_one_hot_features() {
        let ds = one_hot_dataset(60, 3, 1);
        let cfg = TrainConfig {
            learning_rate: 0.05,
            ..TrainConfig::new(100, BatchSize::Full, 0)
        };
        let r = train(&ds, &ds.splits[0], &ModelConfig::mlp(1, 8), &cfg).unwrap();
        assert_eq!(r.test_accuracy, 1.0);
        assert!(r.betas.is_empty());
        assert_eq!(r.history.len(), 100);
        assert_eq!(r.epoch_times_ms.len(), 100);
    }

    #[test]
    fn deterministic_history() {
        let ds = one_hot_dataset(40, 2, 1);
        let m = ModelConfig::gcnh(2, 4).with_dropout(0.3);
        let t = TrainConfig::new(5, BatchSize::Nodes(7), 11);
        let a = train(&ds, &ds.splits[0], &m, &t).unwrap();
        let b = train(&ds, &ds.splits[0], &m, &t).unwrap();
        assert_eq!(a.history, b.history);
        assert_eq!(a.betas.len(), 2);
    }

    #[test]
    fn test_labels_never_touched_during_training() {
        let ds = one_hot_dataset(40, 2, 1);
        let mut corrupted = ds.clone();
        let mut labels = ds.labels.labels().to_vec();
        for &u in &ds.splits[0].test {
            labels[u] = 1 - labels[u];
        }
        corrupted.labels = LabelVector::new(labels, 2).unwrap();
        let m = ModelConfig::gcnh(1, 4);
        let t = TrainConfig::new(6, BatchSize::Nodes(5), 2);
        let a = train(&ds, &ds.splits[0], &m, &t).unwrap();
        let b = train(&corrupted, &corrupted.splits[0], &m, &t).unwrap();
        assert_eq!(a.history, b.history);
        assert_eq!(a.best_epoch, b.best_epoch);
    }

    #[test]
    fn full_batch_loss_equals_masked_train_loss() {
        let ds = one_hot_dataset(30, 3, 1);
        let m = ModelConfig::gcnh(1, 4);
        let t = TrainConfig::new(1, BatchSize::Full, 5);
        let model = Model::new(m.clone(), 3, 3, 5).unwrap();
        let input = GraphInput::new(&ds.graph, &ds.features).unwrap();
        let (expected, _) = model
            .loss_and_grads(model.params(), &input, &ds.labels, &ds.splits[0].train, None)
            .unwrap();
        let r = train(&ds, &ds.splits[0], &m, &t).unwrap();
        assert!((r.history[0].train_loss - expected).abs() < 1e-12);
    }

    #[test]
    fn reported_test_accuracy_matches_restored_checkpoint() {
        let ds = one_hot_dataset(50, 3, 1);
        let m = ModelConfig::gcn(1, 4).with_dropout(0.5);
        let t = TrainConfig::new(12, BatchSize::Nodes(8), 4);
        let (model, r) = train_model(&ds, &ds.splits[0], &m, &t).unwrap();
        let best = r.history.iter().map(|h| h.val_accuracy).fold(f64::MIN, f64::max);
        assert_eq!(r.best_val_accuracy, best);
        let first = r.history.iter().position(|h| h.val_accuracy == best).unwrap();
        assert_eq!(r.best_epoch, first);
        assert_eq!(evaluate(&model, &ds, &ds.splits[0].val).unwrap(), best);
        assert_eq!(evaluate(&model, &ds, &ds.splits[0].test).unwrap(), r.test_accuracy);
    }

    #[test]
    fn evaluate_edge_cases() {
        let ds = one_hot_dataset(30, 3, 1);
        let model = Model::new(ModelConfig::mlp(1, 4), 3, 3, 0).unwrap();
        assert!(matches!(evaluate(&model, &ds, &[]), Err(Error::EmptyMask)));
        let a = evaluate(&model, &ds, &ds.splits[0].test).unwrap();
        assert_eq!(a, evaluate(&model, &ds, &ds.splits[0].test).unwrap());
        let mut logits = Matrix::zeros(30, 3);
        for u in 0..30 {
            logits.set(u, ds.labels.get(u), 1.0);
        }
        assert_eq!(accuracy(&logits, &ds.labels, &[0, 1, 2]).unwrap(), 1.0);
        assert!(accuracy(&logits, &ds.labels, &[30]).is_err());
    }

    #[test]
    fn protocol_statistics() {
        assert_eq!(mean_std(&[0.5]), (0.5, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);

        let mut ds = one_hot_dataset(30, 3, 1);
        ds.splits = vec![ds.splits[0].clone(); 3];
        let t = TrainConfig::new(3, BatchSize::Full, 0);
        let serial = run_protocol(&ds, &ModelConfig::mlp(1, 4), &t, 1).unwrap();
        let parallel = run_protocol(&ds, &ModelConfig::mlp(1, 4), &t, 3).unwrap();
        assert_eq!(serial.runs.len(), 3);
        assert_eq!((serial.test_mean, serial.test_std), (parallel.test_mean, parallel.test_std));
        for (a, b) in serial.runs.iter().zip(&parallel.runs) {
            assert_eq!(a.history, b.history);
        }
    }

    #[test]
    fn cornell_grid_size() {
        let grid = HyperGrid {
            num_layers: vec![1, 2, 3],
            batch_size: vec![BatchSize::Nodes(50), BatchSize::Full],
            epochs: vec![100, 200, 300],
            hidden_size: vec![16, 32, 64],
            dropout_rate: vec![0.0, 0.25, 0.5],
            ..HyperGrid::default()
        };
        let configs = grid.configs();
        assert_eq!(configs.len(), 162);
        assert_eq!(configs[0].0.num_layers, 1);
        assert_eq!(configs[1].0.dropout_rate, 0.25);
        assert_eq!(configs[161].1.epochs, 300);
    }

    #[test]
    fn grid_json_round_trip() {
        let json = r#"{"base_model": {"architecture": "gcn"}, "batch_size": [50, "full"], "aggregation": ["max"]}"#;
        let grid: HyperGrid = serde_json::from_str(json).unwrap();
        assert_eq!(grid.base_model.architecture, Architecture::Gcn);
        assert_eq!(grid.batch_size, vec![BatchSize::Nodes(50), BatchSize::Full]);
        let back: HyperGrid = serde_json::from_str(&serde_json::to_string(&grid).unwrap()).unwrap();
        assert_eq!(back, grid);
        assert!(serde_json::from_str::<BatchSize>("0").is_err());
    }

    #[test]
    fn grid_selection_rules() {
        let ds = one_hot_dataset(40, 2, 2);
        let grid = HyperGrid::singleton(ModelConfig::mlp(1, 4), TrainConfig::new(2, BatchSize::Full, 0));
        let r = grid_search(&ds, &grid, 1).unwrap();
        assert_eq!((r.entries.len(), r.best), (1, 0));
        assert_eq!(r.entries[0].result.runs.len(), 2);

        let entry = |val_mean: f64, param_count: usize| GridEntry {
            param_count,
            result: ProtocolResult {
                val_mean,
                ..r.entries[0].result.clone()
            },
            ..r.entries[0].clone()
        };
        assert_eq!(select_best(&[entry(0.5, 10), entry(0.7, 99), entry(0.7, 20), entry(0.7, 20)]), 2);
        assert_eq!(select_best(&[entry(0.9, 99), entry(0.7, 1)]), 0);
    }
}
