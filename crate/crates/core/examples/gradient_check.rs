//! Central-difference check of the analytic gradients of every model family.
//!
//! cargo run --release --example gradient_check

use gcnh::graph::{Graph, LabelVector};
use gcnh::model::{GraphInput, Model, ModelConfig};
use gcnh::tensor::{finite_diff_check, AggregationMode, Matrix, Objective};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Loss<'a> {
    model: &'a Model,
    input: &'a GraphInput<'a>,
    labels: &'a LabelVector,
    mask: Vec<usize>,
}

impl Objective for Loss<'_> {
    fn loss(&mut self, params: &[Matrix]) -> gcnh::Result<f64> {
        self.gradient_and_loss(params).map(|(l, _)| l)
    }

    fn gradient(&mut self, params: &[Matrix]) -> gcnh::Result<Vec<Matrix>> {
        self.gradient_and_loss(params).map(|(_, g)| g)
    }
}

impl Loss<'_> {
    fn gradient_and_loss(&self, params: &[Matrix]) -> gcnh::Result<(f64, Vec<Matrix>)> {
        self.model.loss_and_grads(params, self.input, self.labels, &self.mask, None)
    }
}

fn main() -> gcnh::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 12;
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|_| rng.gen::<f64>() < 0.3)
        .collect();
    let graph = Graph::from_edges(n, &edges)?;
    let features = Matrix::uniform(n, 8, 1.0, &mut rng);
    let labels = LabelVector::new((0..n).map(|u| u % 3).collect(), 3)?;
    let input = GraphInput::new(&graph, &features)?;

    let configs = [
        ModelConfig::gcnh(2, 6),
        ModelConfig::gcnh(2, 6).with_aggregation(AggregationMode::Mean),
        ModelConfig::gcnh(2, 6).with_aggregation(AggregationMode::Max),
        ModelConfig::gcn(2, 6),
        ModelConfig::mlp(2, 6),
    ];
    for config in configs {
        let model = Model::new(config.clone(), 8, 3, 5)?;
        let mut params = model.params().to_vec();
        for p in &mut params {
            p.data_mut().iter_mut().for_each(|v| *v += rng.gen_range(-0.3..0.3));
        }
        let mut objective = Loss {
            model: &model,
            input: &input,
            labels: &labels,
            mask: (0..n).collect(),
        };
        let report = finite_diff_check(&mut objective, &params, 1e-5, None, 0)?;
        println!(
            "{} L{} {}: max relative error {:.2e} over {} coordinates",
            config.architecture, config.num_layers, config.aggregation, report.max_rel_error, report.coords_checked
        );
    }
    Ok(())
}
