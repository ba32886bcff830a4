//! Trains a one-layer GCNH on a heterophilous synthetic graph and prints the
//! learned mixing weight.
//!
//! cargo run --release --example quickstart

use gcnh::experiments::DataSource;
use gcnh::model::ModelConfig;
use gcnh::train::{train, BatchSize, TrainConfig};

fn main() -> gcnh::Result<()> {
    let ds = DataSource::synthetic(0.1, 1, 0).load()?;
    println!(
        "{}: {} nodes, {} edges, {} classes",
        ds.name,
        ds.num_nodes(),
        ds.graph.num_edges(),
        ds.num_classes()
    );
    let model = ModelConfig::gcnh(1, 32);
    let run = train(&ds, &ds.splits[0], &model, &TrainConfig::new(200, BatchSize::Nodes(300), 0))?;
    println!(
        "best epoch {}, val {:.3}, test {:.3}, beta {:.3}",
        run.best_epoch, run.best_val_accuracy, run.test_accuracy, run.final_betas[0]
    );
    Ok(())
}
