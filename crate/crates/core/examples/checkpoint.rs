//! Trains, saves the best checkpoint, reloads it and re-evaluates.
//!
//! cargo run --release --example checkpoint

use gcnh::experiments::DataSource;
use gcnh::model::{Model, ModelConfig};
use gcnh::train::{evaluate, train_model, BatchSize, TrainConfig};

fn main() -> gcnh::Result<()> {
    let ds = DataSource::synthetic(0.7, 1, 0).load()?;
    let split = &ds.splits[0];
    let (model, run) = train_model(&ds, split, &ModelConfig::gcnh(2, 16), &TrainConfig::new(100, BatchSize::Full, 0))?;
    let path = std::env::temp_dir().join("gcnh-example-checkpoint.json");
    model.save_checkpoint(&path)?;
    let restored = Model::load_checkpoint(&path)?;
    println!(
        "reported test {:.4}, restored test {:.4}, betas {:?}",
        run.test_accuracy,
        evaluate(&restored, &ds, &split.test)?,
        restored.extract_betas()?
    );
    Ok(())
}
