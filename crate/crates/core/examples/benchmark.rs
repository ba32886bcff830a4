//! Per-epoch training time of GCNH with each aggregator.
//!
//! cargo run --release --example benchmark -- [DATASET_DIR]

use gcnh::experiments::{cmd_bench, BenchPlan, DataSource, Options};

fn main() -> gcnh::Result<()> {
    let source = match std::env::args().nth(1) {
        Some(dir) => DataSource::Dir(dir.into()),
        None => DataSource::synthetic(0.5, 2, 0),
    };
    let plan = BenchPlan {
        epochs: 50,
        splits: 2,
        ..BenchPlan::default()
    };
    for r in cmd_bench(&source, &plan, &Options::new("out/bench", 0))? {
        println!(
            "{} {}: {} params, median epoch {:.2} ms, total {:.2} s",
            r.dataset, r.aggregation, r.param_count, r.median_epoch_ms, r.total_train_seconds
        );
    }
    Ok(())
}
