use gcnh::data::{Dataset, SplitMask};
use gcnh::experiments::DataSource;
use gcnh::graph::{Graph, LabelVector};
use gcnh::model::{GraphInput, Model, ModelConfig};
use gcnh::tensor::Matrix;
use gcnh::train::{evaluate, run_protocol, train, BatchSize, TrainConfig};

#[test]
fn gcn_is_near_perfect_on_fully_homophilous_graph() {
    let ds = DataSource::synthetic(1.0, 1, 0).load().unwrap();
    assert_eq!(ds.num_nodes(), 1490);
    let r = train(&ds, &ds.splits[0], &ModelConfig::gcn(2, 32), &TrainConfig::new(100, BatchSize::Full, 0)).unwrap();
    assert!(r.test_accuracy >= 0.95, "{}", r.test_accuracy);
}

#[test]
fn untrained_models_are_at_chance() {
    let ds = DataSource::synthetic(0.5, 1, 3).load().unwrap();
    let input = GraphInput::new(&ds.graph, &ds.features).unwrap();
    let mut total = 0.0;
    for seed in 0..10 {
        let model = Model::new(ModelConfig::gcnh(1, 16), ds.num_features(), 5, seed).unwrap();
        let acc = evaluate(&model, &ds, &ds.splits[0].test).unwrap();
        assert_eq!(acc, evaluate(&model, &ds, &ds.splits[0].test).unwrap());
        assert!(model.logits(&input).unwrap().all_finite());
        total += acc;
    }
    let mean = total / 10.0;
    assert!((mean - 0.2).abs() <= 0.1, "{mean}");
}

/// Features are the one-hot labels, so every seed reaches accuracy 1.
fn separable(n: usize, classes: usize) -> Dataset {
    let labels: Vec<usize> = (0..n).map(|u| u % classes).collect();
    let mut x = Matrix::zeros(n, classes);
    for (u, &c) in labels.iter().enumerate() {
        x.set(u, c, 1.0);
    }
    let edges: Vec<(usize, usize)> = (1..n).map(|u| (u - 1, u)).collect();
    let split = SplitMask {
        train: (0..n / 2).collect(),
        val: (n / 2..3 * n / 4).collect(),
        test: (3 * n / 4..n).collect(),
    };
    Dataset::new(
        "separable",
        Graph::from_edges(n, &edges).unwrap(),
        x,
        LabelVector::new(labels, classes).unwrap(),
        vec![split; 10],
    )
    .unwrap()
}

#[test]
fn identical_splits_give_zero_spread() {
    let ds = separable(60, 3);
    let t = TrainConfig {
        learning_rate: 0.05,
        ..TrainConfig::new(60, BatchSize::Full, 4)
    };
    let r = run_protocol(&ds, &ModelConfig::mlp(1, 8), &t, 2).unwrap();
    assert_eq!(r.runs.len(), 10);
    assert_eq!(r.test_mean, 1.0);
    assert_eq!(r.test_std, 0.0);

    let mut one = ds.clone();
    one.splits.truncate(1);
    assert_eq!(run_protocol(&one, &ModelConfig::gcnh(1, 8), &t, 1).unwrap().test_std, 0.0);
}
