//! Accuracy of GCN and GCNH as depth grows on a homophilous graph.
//!
//! cargo run --release --example oversmoothing

use gcnh::experiments::{cmd_oversmoothing, DataSource, Options, OversmoothingPlan};
use gcnh::model::ModelConfig;
use gcnh::train::{BatchSize, HyperGrid, TrainConfig};

fn main() -> gcnh::Result<()> {
    let plan = OversmoothingPlan {
        depths: vec![1, 2, 4, 8],
        grid: HyperGrid::singleton(ModelConfig::gcnh(1, 32), TrainConfig::new(200, BatchSize::Nodes(300), 0)),
    };
    let rows = cmd_oversmoothing(&DataSource::synthetic(0.9, 2, 0), &plan, &Options::new("out/depth", 0))?;
    for r in rows {
        println!("{:<4} depth {}: {:.3} +- {:.3}", r.model, r.num_layers, r.test_mean, r.test_std);
    }
    Ok(())
}
