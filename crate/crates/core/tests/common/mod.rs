#![allow(dead_code)]

use gcnh::graph::{Graph, LabelVector};
use gcnh::model::{DropoutStreams, GraphInput, Model, ModelConfig};
use gcnh::tensor::{AggregationMode, Matrix, Objective, Tape};
use gcnh::Result;
use rand::Rng;

/// Erdos-Renyi graph where each pair is joined with probability `p`.
pub fn random_graph(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

pub fn random_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> Matrix {
    Matrix::uniform(rows, cols, 1.0, rng)
}

/// Neighbor aggregation straight from the dense adjacency matrix.
pub fn dense_aggregate(graph: &Graph, x: &Matrix, mode: AggregationMode) -> Matrix {
    let n = graph.num_nodes();
    let mut adj = vec![vec![false; n]; n];
    for (u, v) in graph.edges() {
        adj[u][v] = true;
        adj[v][u] = true;
    }
    let mut out = Matrix::zeros(n, x.cols());
    for (u, row) in adj.iter().enumerate() {
        let nbrs: Vec<usize> = (0..n).filter(|&v| row[v]).collect();
        if nbrs.is_empty() {
            continue;
        }
        for j in 0..x.cols() {
            let vals = nbrs.iter().map(|&v| x.get(v, j));
            let value = match mode {
                AggregationMode::Sum => vals.sum(),
                AggregationMode::Mean => vals.sum::<f64>() / nbrs.len() as f64,
                AggregationMode::Max => vals.fold(f64::NEG_INFINITY, f64::max),
            };
            out.set(u, j, value);
        }
    }
    out
}

/// Training-mode masked NLL of a model with frozen dropout masks.
pub struct ModelObjective<'a> {
    pub model: &'a Model,
    pub input: &'a GraphInput<'a>,
    pub labels: &'a LabelVector,
    pub mask: &'a [usize],
    pub streams: DropoutStreams,
}

impl ModelObjective<'_> {
    /// Loss, LeakyReLU margin and max-aggregation gap at `params`.
    pub fn loss_and_margin(&self, params: &[Matrix]) -> Result<(f64, f64, f64)> {
        let mut tape = Tape::new();
        let f = self.model.forward_with(params, &mut tape, self.input, Some(&self.streams), false)?;
        let loss = tape.softmax_nll(f.logits, self.labels, self.mask)?;
        Ok((tape.value(loss).data()[0], tape.relu_margin(), tape.max_gap()))
    }
}

impl Objective for ModelObjective<'_> {
    fn loss(&mut self, params: &[Matrix]) -> Result<f64> {
        self.loss_and_margin(params).map(|(l, _, _)| l)
    }

    fn gradient(&mut self, params: &[Matrix]) -> Result<Vec<Matrix>> {
        self.model
            .loss_and_grads(params, self.input, self.labels, self.mask, Some(&self.streams))
            .map(|(_, g)| g)
    }
}

/// Random graph, features and labels for gradient checks.
pub struct Instance {
    pub graph: Graph,
    pub features: Matrix,
    pub labels: LabelVector,
}

pub fn random_instance(n: usize, f: usize, classes: usize, rng: &mut impl Rng) -> Instance {
    let graph = random_graph(n, 0.3, rng);
    let features = random_matrix(n, f, rng);
    let labels = LabelVector::new((0..n).map(|u| u % classes).collect(), classes).unwrap();
    Instance {
        graph,
        features,
        labels,
    }
}

/// Worst relative error of a central-difference check of `config` on a
/// random instance, redrawing instances (up to 200) until every LeakyReLU
/// input is at least 1e-3 from zero and every max-aggregation winner leads
/// the runner-up by at least 1e-4.
pub fn gradient_check(config: &ModelConfig, n: usize, f: usize, classes: usize, seed: u64) -> f64 {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..200 {
        let inst = random_instance(n, f, classes, &mut rng);
        let model = Model::new(config.clone(), f, classes, seed * 100 + attempt).unwrap();
        let mut params = model.params().to_vec();
        // move off the symmetric initial point (beta = 0.5, zero biases)
        for p in &mut params {
            for v in p.data_mut() {
                *v += rng.gen_range(-0.3..0.3);
            }
        }
        let input = GraphInput::new(&inst.graph, &inst.features).unwrap();
        let mask: Vec<usize> = (0..n).collect();
        let mut obj = ModelObjective {
            model: &model,
            input: &input,
            labels: &inst.labels,
            mask: &mask,
            streams: DropoutStreams::new(seed, attempt),
        };
        let (_, relu, gap) = obj.loss_and_margin(&params).unwrap();
        if relu < 1e-3 || gap < 1e-4 {
            continue;
        }
        let report = gcnh::tensor::finite_diff_check(&mut obj, &params, 1e-5, None, seed).unwrap();
        return report.max_rel_error;
    }
    panic!("no kink-free instance found for {config:?}");
}
