//! Edge homophily and class-pair edge counts of a dataset directory, or of
//! synthetic graphs when no directory is given.
//!
//! cargo run --release --example homophily -- [DATASET_DIR]

use gcnh::data::load_dataset;
use gcnh::experiments::DataSource;
use gcnh::graph::{class_edge_matrix, edge_homophily};

fn main() -> gcnh::Result<()> {
    let datasets = match std::env::args().nth(1) {
        Some(dir) => vec![load_dataset(dir)?],
        None => [0.0, 0.5, 1.0]
            .iter()
            .map(|&h| DataSource::synthetic(h, 1, 0).load())
            .collect::<gcnh::Result<_>>()?,
    };
    for ds in datasets {
        let report = edge_homophily(&ds.graph, &ds.labels)?;
        println!(
            "{}: h = {:.4} ({} of {} edges)",
            ds.name, report.edge_homophily, report.same_label_edges, report.total_edges
        );
        for row in class_edge_matrix(&ds.graph, &ds.labels)? {
            println!("  {row:?}");
        }
    }
    Ok(())
}
