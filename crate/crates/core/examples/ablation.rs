//! GCN against GCNH with a pinned and a learned mixing weight, and the three
//! neighborhood aggregators. CSV files land in the output directory.
//!
//! cargo run --release --example ablation -- [OUT_DIR]

use gcnh::experiments::{cmd_ablation, cmd_agg_compare, ComparePlan, DataSource, Options};
use gcnh::model::ModelConfig;
use gcnh::train::{BatchSize, TrainConfig};

fn main() -> gcnh::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "out/ablation".into());
    let opts = Options::new(out, 0);
    let source = DataSource::synthetic(0.1, 3, 0);
    let plan = ComparePlan {
        model: ModelConfig::gcnh(1, 32),
        train: TrainConfig::new(150, BatchSize::Nodes(300), 0),
    };
    for row in cmd_ablation(&source, &plan, &opts)?.iter().chain(&cmd_agg_compare(&source, &plan, &opts)?) {
        println!("{:<16} {:<4} {:.3} +- {:.3}", row.variant, row.aggregation, row.test_mean, row.test_std);
    }
    Ok(())
}
