use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gcnh::experiments::{self as ex, DataSource, Options};
use gcnh::train::HyperGrid;
use gcnh::Error;

/// Node classification experiments with GCNH, GCN and MLP.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Dataset directory (nodes.tsv, edges.tsv, splits.json). Repeatable for
    /// beta-report; a feature-pool donor for synth-sweep and gen-synth.
    #[arg(long, global = true)]
    data: Vec<PathBuf>,
    /// Use a generated graph with this edge homophily instead of --data.
    #[arg(long, global = true)]
    synth_h: Option<f64>,
    /// Number of random splits of the generated graph.
    #[arg(long, global = true, default_value_t = 10)]
    synth_splits: usize,
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Parallel runs; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// HyperGrid JSON for `grid`.
    #[arg(long, global = true)]
    grid_file: Option<PathBuf>,
    /// JSON plan for the subcommand; defaults reproduce the reference protocol.
    #[arg(long, global = true)]
    config_file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Train one configuration on one split.
    Train,
    /// Grid search over every split.
    Grid,
    /// MLP, GCN and GCNH across synthetic homophily levels.
    SynthSweep,
    /// GCN against GCNH with and without learned beta.
    Ablation,
    /// GCNH with sum, mean and max aggregation.
    AggCompare,
    /// Accuracy against depth for GCN and GCNH.
    Oversmoothing,
    /// Training time and parameter count.
    Bench,
    /// Learned beta per dataset and across the synthetic sweep.
    BetaReport,
    /// Edge homophily of a dataset.
    Homophily,
    /// Write the synthetic sweep graphs to disk.
    GenSynth,
}

impl Cli {
    fn source(&self) -> Result<DataSource, Error> {
        match (self.data.first(), self.synth_h) {
            (Some(dir), None) => Ok(DataSource::Dir(dir.clone())),
            (None, Some(h)) => Ok(DataSource::synthetic(h, self.synth_splits, self.seed)),
            (None, None) => Err(Error::MissingFile(PathBuf::from("<--data>"))),
            (Some(_), Some(_)) => Err(Error::InvalidInput("give either --data or --synth-h".into())),
        }
    }

    fn donor(&self) -> Option<DataSource> {
        self.data.first().cloned().map(DataSource::Dir)
    }

    fn run(&self) -> Result<String, Error> {
        let opts = Options {
            out: self.out.clone(),
            seed: self.seed,
            workers: self.workers.max(1),
        };
        let plan = self.config_file.as_deref();
        Ok(match self.command {
            Command::Train => {
                let r = ex::cmd_train(&self.source()?, &ex::read_plan(plan)?, &opts)?;
                format!("test accuracy {:.4} (best val {:.4} at epoch {})", r.test_accuracy, r.best_val_accuracy, r.best_epoch)
            }
            Command::Grid => {
                let path = self
                    .grid_file
                    .as_deref()
                    .ok_or_else(|| Error::InvalidInput("grid requires --grid-file".into()))?;
                let grid: HyperGrid = ex::read_plan(Some(path))?;
                let r = ex::cmd_grid(&self.source()?, &grid, &opts)?;
                let b = r.best_entry();
                format!(
                    "{} configurations; best #{}: test {:.4} +- {:.4}",
                    r.entries.len(),
                    r.best,
                    b.result.test_mean,
                    b.result.test_std
                )
            }
            Command::SynthSweep => {
                let r = ex::cmd_synth_sweep(self.donor().as_ref(), &ex::read_plan(plan)?, &opts)?;
                format!("{} runs", r.rows.len())
            }
            Command::Ablation => table(&ex::cmd_ablation(&self.source()?, &ex::read_plan(plan)?, &opts)?),
            Command::AggCompare => table(&ex::cmd_agg_compare(&self.source()?, &ex::read_plan(plan)?, &opts)?),
            Command::Oversmoothing => {
                let rows = ex::cmd_oversmoothing(&self.source()?, &ex::read_plan(plan)?, &opts)?;
                rows.iter()
                    .map(|r| format!("{} L={}: {:.4} +- {:.4}", r.model, r.num_layers, r.test_mean, r.test_std))
                    .collect::<Vec<_>>()
                    .join("\n")
            }
            Command::Bench => {
                let rows = ex::cmd_bench(&self.source()?, &ex::read_plan(plan)?, &opts)?;
                rows.iter()
                    .map(|r| format!("{}: {:.2} s, {} params", r.aggregation, r.total_train_seconds, r.param_count))
                    .collect::<Vec<_>>()
                    .join("\n")
            }
            Command::BetaReport => {
                let sources: Vec<DataSource> = self.data.iter().cloned().map(DataSource::Dir).collect();
                let r = ex::cmd_beta_report(&sources, &ex::read_plan(plan)?, &opts)?;
                format!("spearman(beta, 1 - h) = {:.4}", r.sweep_spearman)
            }
            Command::Homophily => {
                let r = ex::cmd_homophily(&self.source()?, &opts)?;
                format!("edge homophily {:.4} ({}/{})", r.report.edge_homophily, r.report.same_label_edges, r.report.total_edges)
            }
            Command::GenSynth => {
                let rows = ex::cmd_gen_synth(self.donor().as_ref(), &ex::read_plan(plan)?, &opts)?;
                format!("{} datasets written to {}", rows.len(), opts.out.display())
            }
        })
    }
}

fn table(rows: &[ex::ComparisonRow]) -> String {
    rows.iter()
        .map(|r| format!("{}: {:.4} +- {:.4}", r.variant, r.test_mean, r.test_std))
        .collect::<Vec<_>>()
        .join("\n")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.run() {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::MissingFile(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
