//! Learned mixing weight against edge homophily on synthetic graphs.
//!
//! cargo run --release --example beta_report

use gcnh::experiments::{cmd_beta_report, BetaPlan, Options, SweepSpec};
use gcnh::model::ModelConfig;
use gcnh::train::{BatchSize, TrainConfig};

fn main() -> gcnh::Result<()> {
    let plan = BetaPlan {
        sweep: SweepSpec {
            levels: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            graphs_per_h: 1,
            ..SweepSpec::default()
        },
        model: ModelConfig::gcnh(1, 32),
        train: TrainConfig::new(200, BatchSize::Nodes(300), 0),
    };
    let report = cmd_beta_report(&[], &plan, &Options::new("out/betas", 0))?;
    for row in &report.rows {
        println!("{:<16} h = {:.3}  beta = {:.3}", row.dataset, row.edge_homophily, row.beta);
    }
    println!("spearman(beta, 1 - h) = {:.3}", report.sweep_spearman);
    Ok(())
}
