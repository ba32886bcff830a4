//! Synthetic graphs with a prescribed edge homophily and power-law degrees.
//!
//! Growth process: start from a clique holding one node per class; every new
//! node draws a class uniformly and attaches `m` edges to distinct existing
//! nodes picked with probability proportional to
//! `degree(v) * compat(class(u), class(v))`, where `compat` is `h` for equal
//! classes and `(1 - h) / (C - 1)` otherwise. When no candidate has positive
//! weight (e.g. `h = 1` and the only same-class node is already taken) the
//! edge falls back to plain degree-proportional sampling and is counted in
//! the [`GenerationReport`].
//!
//! Node classes, copied features and the split depend only on `seed`; the
//! edges depend on `(seed, h)`. A homophily sweep with a fixed seed therefore
//! keeps every node's label and features unchanged and only rewires edges.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::splits::{generate_splits, SYNTH_SPLIT_RATIOS};
use super::Dataset;
use crate::error::{Error, Result};
use crate::graph::{edge_homophily, Graph, HomophilyReport, LabelVector};
use crate::tensor::Matrix;

/// Donor rows that synthetic nodes copy their features from.
#[derive(Debug, Clone, PartialEq)]
pub struct FeaturePool {
    features: Matrix,
    labels: LabelVector,
    by_class: Vec<Vec<usize>>,
}

impl FeaturePool {
    pub fn new(features: Matrix, labels: LabelVector) -> Result<Self> {
        if features.rows() != labels.len() {
            return Err(Error::InvalidInput(format!(
                "{} pool rows for {} labels",
                features.rows(),
                labels.len()
            )));
        }
        let mut by_class = vec![Vec::new(); labels.num_classes()];
        for (u, &c) in labels.labels().iter().enumerate() {
            by_class[c].push(u);
        }
        if let Some(c) = by_class.iter().position(Vec::is_empty) {
            return Err(Error::InvalidInput(format!("feature pool has no node of class {c}")));
        }
        Ok(Self {
            features,
            labels,
            by_class,
        })
    }

    pub fn from_dataset(dataset: &Dataset) -> Result<Self> {
        Self::new(dataset.features.clone(), dataset.labels.clone())
    }

    /// Class-conditional binary bag-of-words rows, for use when no donor
    /// dataset is available.
    pub fn surrogate(config: &SurrogatePoolConfig) -> Result<Self> {
        let SurrogatePoolConfig {
            num_classes,
            nodes_per_class,
            num_features,
            topic_words,
            words_per_node,
            topic_probability,
            seed,
        } = *config;
        if num_classes < 2 || nodes_per_class == 0 || topic_words > num_features || words_per_node == 0 {
            return Err(Error::InvalidInput(format!("bad surrogate pool config {config:?}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vocabulary: Vec<usize> = (0..num_features).collect();
        let topics: Vec<Vec<usize>> = (0..num_classes)
            .map(|_| vocabulary.choose_multiple(&mut rng, topic_words).copied().collect())
            .collect();
        let n = num_classes * nodes_per_class;
        let mut features = Matrix::zeros(n, num_features);
        let mut labels = Vec::with_capacity(n);
        for u in 0..n {
            let c = u % num_classes;
            labels.push(c);
            for _ in 0..words_per_node {
                let word = if rng.gen::<f64>() < topic_probability {
                    *topics[c].choose(&mut rng).expect("nonempty topic")
                } else {
                    rng.gen_range(0..num_features)
                };
                features.set(u, word, 1.0);
            }
        }
        Self::new(features, LabelVector::new(labels, num_classes)?)
    }

    pub fn num_classes(&self) -> usize {
        self.labels.num_classes()
    }

    pub fn num_features(&self) -> usize {
        self.features.cols()
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &LabelVector {
        &self.labels
    }

    /// Pool row indices carrying label `class`.
    pub fn rows_of_class(&self, class: usize) -> &[usize] {
        &self.by_class[class]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurrogatePoolConfig {
    pub num_classes: usize,
    pub nodes_per_class: usize,
    pub num_features: usize,
    /// Size of each class's preferred vocabulary.
    pub topic_words: usize,
    /// Word draws per node (duplicates collapse).
    pub words_per_node: usize,
    /// Chance that a draw comes from the class vocabulary instead of the
    /// whole vocabulary.
    pub topic_probability: f64,
    pub seed: u64,
}

impl Default for SurrogatePoolConfig {
    fn default() -> Self {
        Self {
            num_classes: 5,
            nodes_per_class: 300,
            num_features: 256,
            topic_words: 24,
            words_per_node: 18,
            topic_probability: 0.15,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub num_nodes: usize,
    pub edges_per_new_node: usize,
    pub target_homophily: f64,
    pub num_classes: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    /// Same size as the syn-cora graphs: 1490 nodes, 5 classes.
    fn default() -> Self {
        Self {
            num_nodes: 1490,
            edges_per_new_node: 2,
            target_homophily: 0.5,
            num_classes: 5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationReport {
    pub target_homophily: f64,
    pub achieved: HomophilyReport,
    /// Edges drawn by degree alone because no compatible candidate remained.
    pub fallback_edges: usize,
}

/// Grows one synthetic graph and wraps it in a dataset with a single
/// 50/20/30 split.
pub fn generate_synthetic(config: &SynthConfig, pool: &FeaturePool) -> Result<(Dataset, GenerationReport)> {
    let SynthConfig {
        num_nodes: n,
        edges_per_new_node: m,
        target_homophily: h,
        num_classes: c,
        seed,
    } = *config;
    if m == 0 || c < 2 || n < c.max(10) || !(0.0..=1.0).contains(&h) {
        return Err(Error::InvalidInput(format!("bad synthetic config {config:?}")));
    }
    if pool.num_classes() != c {
        return Err(Error::InvalidInput(format!(
            "feature pool has {} classes, config asks for {c}",
            pool.num_classes()
        )));
    }

    let mut node_rng = stream(seed, 0);
    let mut edge_rng = stream(seed, 1 + (h * 1e6).round() as u64);

    let classes: Vec<usize> = (0..n)
        .map(|u| if u < c { u } else { node_rng.gen_range(0..c) })
        .collect();
    let mut features = Matrix::zeros(n, pool.num_features());
    for (u, &class) in classes.iter().enumerate() {
        let rows = pool.rows_of_class(class);
        let src = rows[node_rng.gen_range(0..rows.len())];
        features.row_mut(u).copy_from_slice(pool.features().row(src));
    }

    let compat = |a: usize, b: usize| if a == b { h } else { (1.0 - h) / (c - 1) as f64 };

    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(c * (c - 1) / 2 + (n - c) * m);
    let mut degree = vec![0usize; n];
    // endpoints[k] lists every edge endpoint of class k, so a uniform pick is
    // degree-proportional within the class
    let mut endpoints: Vec<Vec<usize>> = vec![Vec::new(); c];
    let mut add_edge = |u: usize, v: usize, degree: &mut Vec<usize>, endpoints: &mut Vec<Vec<usize>>| {
        edges.push((u, v));
        degree[u] += 1;
        degree[v] += 1;
        endpoints[classes[u]].push(u);
        endpoints[classes[v]].push(v);
    };
    for u in 0..c {
        for v in u + 1..c {
            add_edge(u, v, &mut degree, &mut endpoints);
        }
    }

    let mut fallback_edges = 0;
    let mut chosen: Vec<usize> = Vec::with_capacity(m);
    for u in c..n {
        chosen.clear();
        let cu = classes[u];
        for _ in 0..m.min(u) {
            let pick = sample_fast(&mut edge_rng, cu, &endpoints, &chosen, &compat)
                .or_else(|| sample_exact(&mut edge_rng, u, cu, &classes, &degree, &chosen, &compat))
                .or_else(|| {
                    fallback_edges += 1;
                    sample_exact(&mut edge_rng, u, cu, &classes, &degree, &chosen, &|_, _| 1.0)
                });
            match pick {
                Some(v) => chosen.push(v),
                None => break,
            }
        }
        for &v in &chosen {
            add_edge(u, v, &mut degree, &mut endpoints);
        }
    }

    let graph = Graph::from_edges(n, &edges)?;
    let labels = LabelVector::new(classes, c)?;
    let achieved = edge_homophily(&graph, &labels)?;
    let mut split_rng = stream(seed, 2);
    let splits = generate_splits(n, SYNTH_SPLIT_RATIOS, 1, split_rng.gen())?;
    let name = format!("syn-h{h:.2}-s{seed}");
    let dataset = Dataset::new(name, graph, features, labels, splits)?;
    Ok((
        dataset,
        GenerationReport {
            target_homophily: h,
            achieved,
            fallback_edges,
        },
    ))
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Class-then-endpoint rejection sampling; `None` after repeated collisions
/// or when every class has zero weight.
fn sample_fast(
    rng: &mut ChaCha8Rng,
    cu: usize,
    endpoints: &[Vec<usize>],
    chosen: &[usize],
    compat: &dyn Fn(usize, usize) -> f64,
) -> Option<usize> {
    let weights: Vec<f64> = endpoints
        .iter()
        .enumerate()
        .map(|(k, e)| compat(cu, k) * e.len() as f64)
        .collect();
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return None;
    }
    for _ in 0..32 {
        let mut r = rng.gen::<f64>() * total;
        let mut k = weights.len() - 1;
        for (i, &w) in weights.iter().enumerate() {
            if r < w {
                k = i;
                break;
            }
            r -= w;
        }
        if endpoints[k].is_empty() {
            continue;
        }
        let v = endpoints[k][rng.gen_range(0..endpoints[k].len())];
        if !chosen.contains(&v) {
            return Some(v);
        }
    }
    None
}

/// Exact weighted draw over all existing nodes not yet chosen.
fn sample_exact(
    rng: &mut ChaCha8Rng,
    u: usize,
    cu: usize,
    classes: &[usize],
    degree: &[usize],
    chosen: &[usize],
    compat: &dyn Fn(usize, usize) -> f64,
) -> Option<usize> {
    let weight = |v: usize| {
        if chosen.contains(&v) {
            0.0
        } else {
            degree[v] as f64 * compat(cu, classes[v])
        }
    };
    let total: f64 = (0..u).map(weight).sum();
    if total <= 0.0 {
        return None;
    }
    let mut r = rng.gen::<f64>() * total;
    let mut last = None;
    for v in 0..u {
        let w = weight(v);
        if w <= 0.0 {
            continue;
        }
        if r < w {
            return Some(v);
        }
        r -= w;
        last = Some(v);
    }
    last
}

/// `0.0, 0.1, ..., 1.0`.
pub fn sweep_homophily_levels() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

/// `graphs_per_h` graphs for every level in `levels`. Replicate `r` uses seed
/// `seed + r` at every level, so replicates differ in labels and features
/// while levels differ only in edges. Names encode `(h, r)`.
pub fn homophily_sweep_generate(
    levels: &[f64],
    graphs_per_h: usize,
    base: &SynthConfig,
    pool: &FeaturePool,
    seed: u64,
) -> Result<Vec<(Dataset, GenerationReport)>> {
    let mut out = Vec::with_capacity(levels.len() * graphs_per_h);
    for &h in levels {
        for r in 0..graphs_per_h {
            let config = SynthConfig {
                target_homophily: h,
                seed: seed + r as u64,
                ..*base
            };
            let (mut ds, report) = generate_synthetic(&config, pool)?;
            ds.name = format!("syn-h{h:.2}-r{r}");
            out.push((ds, report));
        }
    }
    Ok(out)
}
