//! Validation-driven model selection over a small GCNH grid.
//!
//! cargo run --release --example grid_search

use gcnh::experiments::DataSource;
use gcnh::model::ModelConfig;
use gcnh::train::{grid_search, BatchSize, HyperGrid, TrainConfig};

fn main() -> gcnh::Result<()> {
    let ds = DataSource::synthetic(0.2, 3, 0).load()?;
    let grid = HyperGrid {
        num_layers: vec![1, 2],
        hidden_size: vec![16, 32],
        dropout_rate: vec![0.0, 0.5],
        ..HyperGrid::singleton(ModelConfig::gcnh(1, 16), TrainConfig::new(100, BatchSize::Nodes(300), 0))
    };
    let result = grid_search(&ds, &grid, 1)?;
    for e in &result.entries {
        println!(
            "layers {} hidden {:>2} dropout {:.1}: val {:.3} test {:.3} +- {:.3} ({} params)",
            e.model.num_layers,
            e.model.hidden_size,
            e.model.dropout_rate,
            e.result.val_mean,
            e.result.test_mean,
            e.result.test_std,
            e.param_count
        );
    }
    let best = result.best_entry();
    println!("selected: {:?}, test {:.3}", best.model, best.result.test_mean);
    Ok(())
}
