//! Datasets, the on-disk format, split generation and synthetic graphs.

mod io;
mod splits;
mod synth;

pub use io::{load_dataset, save_dataset, EDGES_FILE, NODES_FILE, SPLITS_FILE};
pub use splits::{generate_splits, BENCHMARK_SPLIT_RATIOS, SYNTH_SPLIT_RATIOS};
pub use synth::{
    generate_synthetic, homophily_sweep_generate, sweep_homophily_levels, FeaturePool,
    GenerationReport, SurrogatePoolConfig, SynthConfig,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, LabelVector};
use crate::tensor::Matrix;

/// Disjoint train/validation/test node index sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitMask {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

impl SplitMask {
    pub fn validate(&self, split: usize, num_nodes: usize) -> Result<()> {
        let mut seen = vec![false; num_nodes];
        for (part, name) in [(&self.train, "train"), (&self.val, "val"), (&self.test, "test")] {
            if part.is_empty() {
                return Err(Error::InvalidInput(format!("split {split}: {name} set is empty")));
            }
            for &u in part {
                if u >= num_nodes {
                    return Err(Error::SplitIndexOutOfRange {
                        split,
                        index: u,
                        num_nodes,
                    });
                }
                if std::mem::replace(&mut seen[u], true) {
                    return Err(Error::InvalidInput(format!(
                        "split {split}: node {u} appears twice"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A single graph with node features, labels and one or more splits.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub graph: Graph,
    pub features: Matrix,
    pub labels: LabelVector,
    pub splits: Vec<SplitMask>,
    /// External node identifiers; `node_ids[u]` names dense index `u`.
    pub node_ids: Vec<String>,
}

impl Dataset {
    /// Assembles a dataset whose node ids are the dense indices.
    pub fn new(
        name: impl Into<String>,
        graph: Graph,
        features: Matrix,
        labels: LabelVector,
        splits: Vec<SplitMask>,
    ) -> Result<Self> {
        let node_ids = (0..graph.num_nodes()).map(|u| u.to_string()).collect();
        let ds = Self {
            name: name.into(),
            graph,
            features,
            labels,
            splits,
            node_ids,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn num_nodes(&self) -> usize {
        self.graph.num_nodes()
    }

    pub fn num_features(&self) -> usize {
        self.features.cols()
    }

    pub fn num_classes(&self) -> usize {
        self.labels.num_classes()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.graph.num_nodes();
        if self.features.rows() != n || self.labels.len() != n || self.node_ids.len() != n {
            return Err(Error::InvalidInput(format!(
                "dataset `{}`: {} nodes, {} feature rows, {} labels, {} ids",
                self.name,
                n,
                self.features.rows(),
                self.labels.len(),
                self.node_ids.len()
            )));
        }
        if self.features.cols() == 0 {
            return Err(Error::InvalidInput(format!(
                "dataset `{}` has no feature columns",
                self.name
            )));
        }
        if self.splits.is_empty() {
            return Err(Error::InvalidInput(format!("dataset `{}` has no splits", self.name)));
        }
        for (i, s) in self.splits.iter().enumerate() {
            s.validate(i, n)?;
        }
        Ok(())
    }
}
