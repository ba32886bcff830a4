//! Experiment drivers behind the command-line subcommands.
//!
//! Each driver takes a plan (deserializable from a JSON config file, with
//! defaults matching the published protocol), runs it and writes CSV/JSON
//! tables under an output directory. Every output carries
//! [`SCHEMA_VERSION`]. Apart from fields named `*_seconds` or `*_ms`, files
//! depend only on the inputs and the seed, not on the worker count.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::{
    generate_splits, generate_synthetic, homophily_sweep_generate, load_dataset, save_dataset, Dataset,
    FeaturePool, GenerationReport, SurrogatePoolConfig, SynthConfig, SYNTH_SPLIT_RATIOS,
};
use crate::error::{Error, Result};
use crate::graph::{class_edge_matrix, edge_homophily, HomophilyReport};
use crate::model::{Architecture, Model, ModelConfig};
use crate::tensor::AggregationMode;
use crate::train::{
    grid_search, run_parallel, train, train_model, BatchSize, GridResult, HyperGrid, ProtocolResult,
    RunResult, TrainConfig,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Where a single dataset comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DataSource {
    Dir(PathBuf),
    /// A generated graph whose single split is replaced by `splits` random
    /// 50/20/30 splits.
    Synthetic {
        config: SynthConfig,
        pool: SurrogatePoolConfig,
        splits: usize,
    },
}

impl DataSource {
    pub fn synthetic(target_homophily: f64, splits: usize, seed: u64) -> Self {
        Self::Synthetic {
            config: SynthConfig {
                target_homophily,
                seed,
                ..SynthConfig::default()
            },
            pool: SurrogatePoolConfig::default(),
            splits,
        }
    }

    pub fn load(&self) -> Result<Dataset> {
        match self {
            Self::Dir(dir) => load_dataset(dir),
            Self::Synthetic { config, pool, splits } => {
                let pool = FeaturePool::surrogate(pool)?;
                let (mut ds, _) = generate_synthetic(config, &pool)?;
                ds.splits = generate_splits(ds.num_nodes(), SYNTH_SPLIT_RATIOS, (*splits).max(1), config.seed)?;
                Ok(ds)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Options {
    pub out: PathBuf,
    pub seed: u64,
    pub workers: usize,
}

impl Options {
    pub fn new(out: impl Into<PathBuf>, seed: u64) -> Self {
        Self {
            out: out.into(),
            seed,
            workers: 1,
        }
    }

    fn path(&self, name: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.out).map_err(|e| Error::io(&self.out, e))?;
        Ok(self.out.join(name))
    }

    fn write_json<T: Serialize>(&self, name: &str, command: &str, body: &T) -> Result<()> {
        #[derive(Serialize)]
        struct Envelope<'a, T> {
            schema_version: u32,
            command: &'a str,
            #[serde(flatten)]
            body: &'a T,
        }
        let path = self.path(name)?;
        let text = serde_json::to_string_pretty(&Envelope {
            schema_version: SCHEMA_VERSION,
            command,
            body,
        })? + "\n";
        fs::write(&path, text).map_err(|e| Error::io(path, e))
    }

    fn write_csv<T: Serialize>(&self, name: &str, rows: &[T]) -> Result<()> {
        let path = self.path(name)?;
        let csv_err = |e: csv::Error| Error::InvalidInput(format!("{}: {e}", path.display()));
        let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
        for row in rows {
            w.serialize(row).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::io(&path, e))
    }
}

fn with_seed(train: &TrainConfig, seed: u64) -> TrainConfig {
    TrainConfig { seed, ..*train }
}

fn join_betas(betas: &[f64]) -> String {
    betas.iter().map(|b| format!("{b:.6}")).collect::<Vec<_>>().join(";")
}

/// Model and training settings for a single configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub train: TrainConfig,
    /// Split used by `train`.
    pub split: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelConfig::gcnh(1, 32),
            train: TrainConfig::new(100, BatchSize::Nodes(300), 0),
            split: 0,
        }
    }
}

/// Trains one model on one split; writes `run.json`, `timings.json` and
/// `checkpoint.json`.
pub fn cmd_train(source: &DataSource, config: &RunConfig, opts: &Options) -> Result<RunResult> {
    let ds = source.load()?;
    let split = ds.splits.get(config.split).ok_or_else(|| {
        Error::InvalidInput(format!("dataset `{}` has no split {}", ds.name, config.split))
    })?;
    let train_cfg = with_seed(&config.train, opts.seed);
    let (model, result) = train_model(&ds, split, &config.model, &train_cfg)?;

    #[derive(Serialize)]
    struct Run<'a> {
        dataset: &'a str,
        split: usize,
        model: &'a ModelConfig,
        train: &'a TrainConfig,
        result: &'a RunResult,
    }
    opts.write_json(
        "run.json",
        "train",
        &Run {
            dataset: &ds.name,
            split: config.split,
            model: &config.model,
            train: &train_cfg,
            result: &result,
        },
    )?;
    #[derive(Serialize)]
    struct Timings<'a> {
        epoch_times_ms: &'a [f64],
    }
    opts.write_json(
        "timings.json",
        "train",
        &Timings {
            epoch_times_ms: &result.epoch_times_ms,
        },
    )?;
    model.save_checkpoint(opts.path("checkpoint.json")?)?;
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub schema_version: u32,
    pub config_index: usize,
    pub architecture: Architecture,
    pub num_layers: usize,
    pub hidden_size: usize,
    pub dropout_rate: f64,
    pub aggregation: AggregationMode,
    pub batch_size: String,
    pub epochs: usize,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub param_count: usize,
    pub split: usize,
    pub best_epoch: usize,
    pub val_accuracy: f64,
    pub test_accuracy: f64,
}

pub fn grid_rows(result: &GridResult) -> Vec<GridRow> {
    let mut rows = Vec::new();
    for (i, e) in result.entries.iter().enumerate() {
        for (s, r) in e.result.runs.iter().enumerate() {
            rows.push(GridRow {
                schema_version: SCHEMA_VERSION,
                config_index: i,
                architecture: e.model.architecture,
                num_layers: e.model.num_layers,
                hidden_size: e.model.hidden_size,
                dropout_rate: e.model.dropout_rate,
                aggregation: e.model.aggregation,
                batch_size: e.train.batch_size.to_string(),
                epochs: e.train.epochs,
                learning_rate: e.train.learning_rate,
                weight_decay: e.train.weight_decay,
                param_count: e.param_count,
                split: s,
                best_epoch: r.best_epoch,
                val_accuracy: r.best_val_accuracy,
                test_accuracy: r.test_accuracy,
            });
        }
    }
    rows
}

/// Grid search over every split; writes `grid_results.csv` (one row per
/// configuration and split) and `best.json`.
pub fn cmd_grid(source: &DataSource, grid: &HyperGrid, opts: &Options) -> Result<GridResult> {
    let ds = source.load()?;
    let grid = HyperGrid {
        base_train: with_seed(&grid.base_train, opts.seed),
        ..grid.clone()
    };
    let result = grid_search(&ds, &grid, opts.workers)?;
    opts.write_csv("grid_results.csv", &grid_rows(&result))?;
    let best = result.best_entry();

    #[derive(Serialize)]
    struct Best<'a> {
        dataset: &'a str,
        configurations: usize,
        best_index: usize,
        model: &'a ModelConfig,
        train: &'a TrainConfig,
        param_count: usize,
        val_mean: f64,
        test_mean: f64,
        test_std: f64,
    }
    opts.write_json(
        "best.json",
        "grid",
        &Best {
            dataset: &ds.name,
            configurations: result.entries.len(),
            best_index: result.best,
            model: &best.model,
            train: &best.train,
            param_count: best.param_count,
            val_mean: best.result.val_mean,
            test_mean: best.result.test_mean,
            test_std: best.result.test_std,
        },
    )?;
    Ok(result)
}

/// A family of synthetic graphs over several homophily levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepSpec {
    pub levels: Vec<f64>,
    pub graphs_per_h: usize,
    pub synth: SynthConfig,
    /// Used when no donor dataset is given.
    pub pool: SurrogatePoolConfig,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            levels: crate::data::sweep_homophily_levels(),
            graphs_per_h: 3,
            synth: SynthConfig::default(),
            pool: SurrogatePoolConfig::default(),
        }
    }
}

impl SweepSpec {
    /// Generates every graph; `donor` replaces the surrogate feature pool.
    pub fn generate(&self, donor: Option<&Dataset>, seed: u64) -> Result<Vec<(Dataset, GenerationReport)>> {
        let pool = match donor {
            Some(ds) => FeaturePool::from_dataset(ds)?,
            None => FeaturePool::surrogate(&self.pool)?,
        };
        let base = SynthConfig {
            num_classes: pool.num_classes(),
            ..self.synth
        };
        homophily_sweep_generate(&self.levels, self.graphs_per_h, &base, &pool, seed)
    }
}

fn grid_for(architecture: Architecture, model: ModelConfig, train: TrainConfig) -> HyperGrid {
    HyperGrid::singleton(ModelConfig { architecture, ..model }, train)
}

/// Per-model grids of the homophily sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepPlan {
    pub sweep: SweepSpec,
    pub mlp: HyperGrid,
    pub gcn: HyperGrid,
    pub gcnh: HyperGrid,
}

impl Default for SweepPlan {
    /// Baselines: 100 epochs, 1 to 3 layers, hidden 16 or 32. GCNH: 300
    /// epochs, 1 to 3 layers, batch 300 or full, hidden 16 or 32, dropout
    /// 0, 0.25 or 0.5.
    fn default() -> Self {
        let baseline = |architecture| HyperGrid {
            num_layers: vec![1, 2, 3],
            hidden_size: vec![16, 32],
            ..grid_for(architecture, ModelConfig::default(), TrainConfig::new(100, BatchSize::Full, 0))
        };
        Self {
            sweep: SweepSpec::default(),
            mlp: baseline(Architecture::Mlp),
            gcn: baseline(Architecture::Gcn),
            gcnh: HyperGrid {
                num_layers: vec![1, 2, 3],
                batch_size: vec![BatchSize::Nodes(300), BatchSize::Full],
                hidden_size: vec![16, 32],
                dropout_rate: vec![0.0, 0.25, 0.5],
                ..grid_for(Architecture::Gcnh, ModelConfig::default(), TrainConfig::new(300, BatchSize::Full, 0))
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub schema_version: u32,
    pub target_h: f64,
    pub replicate: usize,
    pub achieved_h: f64,
    pub model: Architecture,
    pub num_layers: usize,
    pub hidden_size: usize,
    pub val_accuracy: f64,
    pub test_accuracy: f64,
    /// Final-epoch betas of the selected configuration, `;`-separated.
    pub betas: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummaryRow {
    pub schema_version: u32,
    pub target_h: f64,
    pub model: Architecture,
    pub graphs: usize,
    pub test_mean: f64,
    pub test_std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub summary: Vec<SweepSummaryRow>,
}

impl SweepResult {
    pub fn mean_accuracy(&self, model: Architecture, target_h: f64) -> Option<f64> {
        self.summary
            .iter()
            .find(|r| r.model == model && (r.target_h - target_h).abs() < 1e-9)
            .map(|r| r.test_mean)
    }
}

/// Grid-searches MLP, GCN and GCNH on every graph of the sweep; writes
/// `sweep.csv` (one row per graph and model) and `sweep_summary.csv`.
pub fn cmd_synth_sweep(donor: Option<&DataSource>, plan: &SweepPlan, opts: &Options) -> Result<SweepResult> {
    let donor = donor.map(DataSource::load).transpose()?;
    let graphs = plan.sweep.generate(donor.as_ref(), opts.seed)?;
    let models = [
        (Architecture::Mlp, &plan.mlp),
        (Architecture::Gcn, &plan.gcn),
        (Architecture::Gcnh, &plan.gcnh),
    ];
    let jobs: Vec<(usize, usize)> = (0..graphs.len())
        .flat_map(|g| (0..models.len()).map(move |m| (g, m)))
        .collect();
    let results = run_parallel(opts.workers, &jobs, |&(g, m)| {
        let (architecture, grid) = models[m];
        let grid = HyperGrid {
            base_model: ModelConfig {
                architecture,
                ..grid.base_model.clone()
            },
            base_train: with_seed(&grid.base_train, opts.seed + g as u64),
            ..grid.clone()
        };
        grid_search(&graphs[g].0, &grid, 1)
    })?;

    let per_h = plan.sweep.graphs_per_h;
    let mut rows = Vec::with_capacity(jobs.len());
    for (&(g, m), result) in jobs.iter().zip(&results) {
        let report = &graphs[g].1;
        let best = result.best_entry();
        let run = &best.result.runs[0];
        rows.push(SweepRow {
            schema_version: SCHEMA_VERSION,
            target_h: report.target_homophily,
            replicate: g % per_h,
            achieved_h: report.achieved.edge_homophily,
            model: models[m].0,
            num_layers: best.model.num_layers,
            hidden_size: best.model.hidden_size,
            val_accuracy: run.best_val_accuracy,
            test_accuracy: run.test_accuracy,
            betas: join_betas(&run.final_betas),
        });
    }

    let mut summary = Vec::new();
    for &h in &plan.sweep.levels {
        for (model, _) in models {
            let acc: Vec<f64> = rows
                .iter()
                .filter(|r| r.model == model && r.target_h == h)
                .map(|r| r.test_accuracy)
                .collect();
            let (test_mean, test_std) = crate::train::mean_std(&acc);
            summary.push(SweepSummaryRow {
                schema_version: SCHEMA_VERSION,
                target_h: h,
                model,
                graphs: acc.len(),
                test_mean,
                test_std,
            });
        }
    }
    opts.write_csv("sweep.csv", &rows)?;
    opts.write_csv("sweep_summary.csv", &summary)?;
    Ok(SweepResult { rows, summary })
}

/// One row of a model comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub schema_version: u32,
    pub dataset: String,
    pub variant: String,
    pub architecture: Architecture,
    pub num_layers: usize,
    pub hidden_size: usize,
    pub aggregation: AggregationMode,
    pub param_count: usize,
    pub runs: usize,
    pub val_mean: f64,
    pub test_mean: f64,
    pub test_std: f64,
}

/// Settings shared by the fixed-configuration comparisons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ComparePlan {
    /// Layers, hidden size, dropout and aggregation of every variant.
    pub model: ModelConfig,
    pub train: TrainConfig,
}

impl Default for ComparePlan {
    fn default() -> Self {
        Self {
            model: ModelConfig::gcnh(1, 32),
            train: TrainConfig::new(100, BatchSize::Nodes(300), 0),
        }
    }
}

fn compare(
    ds: &Dataset,
    variants: &[(String, ModelConfig)],
    train_config: &TrainConfig,
    opts: &Options,
) -> Result<Vec<ComparisonRow>> {
    let splits = ds.splits.len();
    let jobs: Vec<(usize, usize)> = (0..variants.len())
        .flat_map(|v| (0..splits).map(move |s| (v, s)))
        .collect();
    let runs = run_parallel(opts.workers, &jobs, |&(v, s)| {
        let t = with_seed(train_config, opts.seed + s as u64);
        train(ds, &ds.splits[s], &variants[v].1, &t)
    })?;
    let mut runs = runs.into_iter();
    variants
        .iter()
        .map(|(variant, m)| {
            let result = ProtocolResult::from_runs(runs.by_ref().take(splits).collect());
            Ok(ComparisonRow {
                schema_version: SCHEMA_VERSION,
                dataset: ds.name.clone(),
                variant: variant.clone(),
                architecture: m.architecture,
                num_layers: m.num_layers,
                hidden_size: m.hidden_size,
                aggregation: m.aggregation,
                param_count: Model::new(m.clone(), ds.num_features(), ds.num_classes(), 0)?.count_params(),
                runs: result.runs.len(),
                val_mean: result.val_mean,
                test_mean: result.test_mean,
                test_std: result.test_std,
            })
        })
        .collect()
}

/// GCN, GCNH with separate MLPs and beta fixed at 0.5, and full GCNH;
/// writes `ablation.csv`.
pub fn cmd_ablation(source: &DataSource, plan: &ComparePlan, opts: &Options) -> Result<Vec<ComparisonRow>> {
    let ds = source.load()?;
    let base = ModelConfig {
        share_mlps: false,
        beta_trainable: true,
        beta_fixed_value: None,
        ..plan.model.clone()
    };
    let variants = vec![
        (
            "gcn".to_string(),
            ModelConfig {
                architecture: Architecture::Gcn,
                ..base.clone()
            },
        ),
        (
            "gcnh-fixed-beta".to_string(),
            ModelConfig {
                architecture: Architecture::Gcnh,
                ..base.clone()
            }
            .with_fixed_beta(0.5),
        ),
        (
            "gcnh".to_string(),
            ModelConfig {
                architecture: Architecture::Gcnh,
                ..base
            },
        ),
    ];
    let rows = compare(&ds, &variants, &plan.train, opts)?;
    opts.write_csv("ablation.csv", &rows)?;
    Ok(rows)
}

/// GCNH with each aggregation function; writes `aggregation.csv`.
pub fn cmd_agg_compare(source: &DataSource, plan: &ComparePlan, opts: &Options) -> Result<Vec<ComparisonRow>> {
    let ds = source.load()?;
    let variants: Vec<(String, ModelConfig)> = AggregationMode::ALL
        .iter()
        .map(|&mode| {
            (
                mode.to_string(),
                ModelConfig {
                    architecture: Architecture::Gcnh,
                    ..plan.model.clone()
                }
                .with_aggregation(mode),
            )
        })
        .collect();
    let rows = compare(&ds, &variants, &plan.train, opts)?;
    opts.write_csv("aggregation.csv", &rows)?;
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OversmoothingPlan {
    pub depths: Vec<usize>,
    /// Searched per model and depth; `num_layers` and `architecture` are
    /// overridden.
    pub grid: HyperGrid,
}

impl Default for OversmoothingPlan {
    /// Depths 1, 2, 4, 8; batch 300, epochs 300 or 500, hidden 16, 32 or
    /// 64, dropout 0 or 0.5.
    fn default() -> Self {
        Self {
            depths: vec![1, 2, 4, 8],
            grid: HyperGrid {
                epochs: vec![300, 500],
                hidden_size: vec![16, 32, 64],
                dropout_rate: vec![0.0, 0.5],
                ..HyperGrid::singleton(ModelConfig::default(), TrainConfig::new(300, BatchSize::Nodes(300), 0))
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthRow {
    pub schema_version: u32,
    pub dataset: String,
    pub model: Architecture,
    pub num_layers: usize,
    pub hidden_size: usize,
    pub dropout_rate: f64,
    pub epochs: usize,
    pub val_mean: f64,
    pub test_mean: f64,
    pub test_std: f64,
}

/// Accuracy against depth for GCN and GCNH; writes `oversmoothing.csv`.
pub fn cmd_oversmoothing(source: &DataSource, plan: &OversmoothingPlan, opts: &Options) -> Result<Vec<DepthRow>> {
    let ds = source.load()?;
    let mut jobs = Vec::new();
    for model in [Architecture::Gcn, Architecture::Gcnh] {
        for &depth in &plan.depths {
            jobs.push((model, depth));
        }
    }
    let results = run_parallel(opts.workers, &jobs, |&(architecture, depth)| {
        let grid = HyperGrid {
            base_model: ModelConfig {
                architecture,
                ..plan.grid.base_model.clone()
            },
            base_train: with_seed(&plan.grid.base_train, opts.seed),
            num_layers: vec![depth],
            ..plan.grid.clone()
        };
        grid_search(&ds, &grid, 1)
    })?;
    let rows: Vec<DepthRow> = jobs
        .iter()
        .zip(&results)
        .map(|(&(model, depth), r)| {
            let best = r.best_entry();
            DepthRow {
                schema_version: SCHEMA_VERSION,
                dataset: ds.name.clone(),
                model,
                num_layers: depth,
                hidden_size: best.model.hidden_size,
                dropout_rate: best.model.dropout_rate,
                epochs: best.train.epochs,
                val_mean: best.result.val_mean,
                test_mean: best.result.test_mean,
                test_std: best.result.test_std,
            }
        })
        .collect();
    opts.write_csv("oversmoothing.csv", &rows)?;
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchPlan {
    pub epochs: usize,
    pub splits: usize,
    pub hidden_size: usize,
    pub num_layers: usize,
    pub batch_size: BatchSize,
}

impl Default for BenchPlan {
    /// 200 epochs on 10 splits, one layer of width 16.
    fn default() -> Self {
        Self {
            epochs: 200,
            splits: 10,
            hidden_size: 16,
            num_layers: 1,
            batch_size: BatchSize::Full,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub dataset: String,
    pub aggregation: AggregationMode,
    pub param_count: usize,
    pub epochs: usize,
    pub splits: usize,
    pub total_train_seconds: f64,
    pub median_epoch_ms: f64,
}

/// Training time of 1-layer GCNH with SUM and MAX aggregation; writes
/// `bench.json`. Splits are reused cyclically when the dataset has fewer.
/// Always runs on one worker so timings are not shared with other runs.
pub fn cmd_bench(source: &DataSource, plan: &BenchPlan, opts: &Options) -> Result<Vec<BenchResult>> {
    let ds = source.load()?;
    let mut out = Vec::new();
    for mode in [AggregationMode::Sum, AggregationMode::Max] {
        let model = ModelConfig::gcnh(plan.num_layers, plan.hidden_size).with_aggregation(mode);
        let mut times = Vec::new();
        for s in 0..plan.splits {
            let t = TrainConfig::new(plan.epochs, plan.batch_size, opts.seed + s as u64);
            let r = train(&ds, &ds.splits[s % ds.splits.len()], &model, &t)?;
            times.extend(r.epoch_times_ms);
        }
        out.push(BenchResult {
            dataset: ds.name.clone(),
            aggregation: mode,
            param_count: Model::new(model, ds.num_features(), ds.num_classes(), 0)?.count_params(),
            epochs: plan.epochs,
            splits: plan.splits,
            total_train_seconds: times.iter().sum::<f64>() / 1e3,
            median_epoch_ms: median(&mut times),
        });
    }
    #[derive(Serialize)]
    struct Bench<'a> {
        results: &'a [BenchResult],
    }
    opts.write_json("bench.json", "bench", &Bench { results: &out })?;
    Ok(out)
}

pub fn median(xs: &mut [f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        0.5 * (xs[m - 1] + xs[m])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BetaPlan {
    pub sweep: SweepSpec,
    pub model: ModelConfig,
    pub train: TrainConfig,
}

impl Default for BetaPlan {
    fn default() -> Self {
        Self {
            sweep: SweepSpec::default(),
            model: ModelConfig::gcnh(1, 32),
            train: TrainConfig::new(300, BatchSize::Nodes(300), 0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaRow {
    pub schema_version: u32,
    pub dataset: String,
    /// Target level for synthetic graphs, empty for datasets.
    pub target_h: Option<f64>,
    pub edge_homophily: f64,
    pub layer: usize,
    /// Final-epoch beta, averaged over the dataset's splits.
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaReport {
    pub rows: Vec<BetaRow>,
    /// Spearman correlation between the per-level mean first-layer beta
    /// and `1 - h` over the synthetic sweep.
    pub sweep_spearman: f64,
}

/// Learned betas on each dataset in `sources` and on the synthetic sweep;
/// writes `betas.csv` and `beta_report.json`.
pub fn cmd_beta_report(sources: &[DataSource], plan: &BetaPlan, opts: &Options) -> Result<BetaReport> {
    if plan.model.architecture != Architecture::Gcnh {
        return Err(Error::NotGcnh);
    }
    let mut datasets: Vec<(Dataset, Option<f64>)> = Vec::new();
    for s in sources {
        datasets.push((s.load()?, None));
    }
    for (ds, report) in plan.sweep.generate(None, opts.seed)? {
        datasets.push((ds, Some(report.target_homophily)));
    }
    let jobs: Vec<(usize, usize)> = datasets
        .iter()
        .enumerate()
        .flat_map(|(d, (ds, _))| (0..ds.splits.len()).map(move |s| (d, s)))
        .collect();
    let runs = run_parallel(opts.workers, &jobs, |&(d, s)| {
        let ds = &datasets[d].0;
        train(ds, &ds.splits[s], &plan.model, &with_seed(&plan.train, opts.seed + s as u64))
    })?;

    let mut rows = Vec::new();
    let mut runs = runs.into_iter();
    for (ds, target_h) in &datasets {
        let per_split: Vec<RunResult> = runs.by_ref().take(ds.splits.len()).collect();
        let h = edge_homophily(&ds.graph, &ds.labels)?.edge_homophily;
        for layer in 0..plan.model.num_layers {
            let beta = per_split.iter().map(|r| r.final_betas[layer]).sum::<f64>() / per_split.len() as f64;
            rows.push(BetaRow {
                schema_version: SCHEMA_VERSION,
                dataset: ds.name.clone(),
                target_h: *target_h,
                edge_homophily: h,
                layer,
                beta,
            });
        }
    }

    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for &h in &plan.sweep.levels {
        let betas: Vec<f64> = rows
            .iter()
            .filter(|r| r.layer == 0 && r.target_h == Some(h))
            .map(|r| r.beta)
            .collect();
        xs.push(betas.iter().sum::<f64>() / betas.len() as f64);
        ys.push(1.0 - h);
    }
    let report = BetaReport {
        sweep_spearman: spearman(&xs, &ys),
        rows,
    };
    opts.write_csv("betas.csv", &report.rows)?;
    opts.write_json("beta_report.json", "beta-report", &report)?;
    Ok(report)
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut r = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation with average ranks for ties. NaN when either
/// input is constant.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = xs.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomophilyOutput {
    pub dataset: String,
    pub num_nodes: usize,
    pub num_classes: usize,
    pub report: HomophilyReport,
    pub class_edges: Vec<Vec<usize>>,
}

/// Edge homophily and the class-by-class edge counts; writes
/// `homophily.json`.
pub fn cmd_homophily(source: &DataSource, opts: &Options) -> Result<HomophilyOutput> {
    let ds = source.load()?;
    let out = HomophilyOutput {
        dataset: ds.name.clone(),
        num_nodes: ds.num_nodes(),
        num_classes: ds.num_classes(),
        report: edge_homophily(&ds.graph, &ds.labels)?,
        class_edges: class_edge_matrix(&ds.graph, &ds.labels)?,
    };
    opts.write_json("homophily.json", "homophily", &out)?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRow {
    pub schema_version: u32,
    pub dataset: String,
    pub target_h: f64,
    pub achieved_h: f64,
    pub num_nodes: usize,
    pub num_edges: usize,
    pub fallback_edges: usize,
}

/// Writes every sweep graph as a dataset directory under the output
/// directory, plus `generation.csv`.
pub fn cmd_gen_synth(donor: Option<&DataSource>, sweep: &SweepSpec, opts: &Options) -> Result<Vec<GenerationRow>> {
    let donor = donor.map(DataSource::load).transpose()?;
    let graphs = sweep.generate(donor.as_ref(), opts.seed)?;
    let mut rows = Vec::with_capacity(graphs.len());
    for (ds, report) in &graphs {
        save_dataset(ds, opts.path(&ds.name)?)?;
        rows.push(GenerationRow {
            schema_version: SCHEMA_VERSION,
            dataset: ds.name.clone(),
            target_h: report.target_homophily,
            achieved_h: report.achieved.edge_homophily,
            num_nodes: ds.num_nodes(),
            num_edges: ds.graph.num_edges(),
            fallback_edges: report.fallback_edges,
        });
    }
    opts.write_csv("generation.csv", &rows)?;
    Ok(rows)
}

/// Reads a JSON plan, or the default when `path` is `None`.
pub fn read_plan<T: Default + for<'de> Deserialize<'de>>(path: Option<&Path>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            if !p.is_file() {
                return Err(Error::MissingFile(p.to_path_buf()));
            }
            let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            serde_json::from_str(&text).map_err(|e| Error::Malformed {
                file: p.to_path_buf(),
                line: e.line(),
                message: e.to_string(),
            })
        }
    }
}
