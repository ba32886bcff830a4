mod common;

use gcnh::graph::Graph;
use gcnh::tensor::{AggregationMode, Tape};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn sparse_aggregation_matches_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..200 {
        let n = rng.gen_range(1..=50);
        let p = rng.gen_range(0.0..0.5);
        let graph = common::random_graph(n, p, &mut rng);
        let x = common::random_matrix(n, rng.gen_range(1..5), &mut rng);
        for mode in AggregationMode::ALL {
            let mut tape = Tape::new();
            let v = tape.leaf(x.clone(), false);
            let out = tape.neighbor_aggregate(&graph, v, mode).unwrap();
            let diff = tape.value(out).max_abs_diff(&common::dense_aggregate(&graph, &x, mode));
            assert!(diff <= 1e-12, "{mode} n={n}: {diff:e}");
        }
    }
}

#[test]
fn aggregation_backward_matches_dense_transpose() {
    let mut rng = ChaCha8Rng::seed_from_u64(78);
    let graph = common::random_graph(20, 0.25, &mut rng);
    let x = common::random_matrix(20, 3, &mut rng);
    let r = common::random_matrix(1, 20, &mut rng);
    let s = common::random_matrix(3, 1, &mut rng);
    let w = r.t_matmul(&s.transpose()).unwrap();
    for mode in [AggregationMode::Sum, AggregationMode::Mean] {
        // loss = r (A x) s, so d/dx = A^T (r^T s^T)
        let mut tape = Tape::new();
        let xv = tape.leaf(x.clone(), true);
        let agg = tape.neighbor_aggregate(&graph, xv, mode).unwrap();
        let (rv, sv) = (tape.constant(r.clone()), tape.constant(s.clone()));
        let right = tape.matmul(agg, sv).unwrap();
        let loss = tape.matmul(rv, right).unwrap();
        tape.backward(loss).unwrap();
        let grad = tape.grad(xv).unwrap().clone();
        for v in 0..20 {
            for j in 0..3 {
                let expected: f64 = graph
                    .neighbors(v)
                    .iter()
                    .map(|&u| {
                        let scale = match mode {
                            AggregationMode::Mean => 1.0 / graph.degree(u) as f64,
                            _ => 1.0,
                        };
                        scale * w.get(u, j)
                    })
                    .sum();
                assert!((grad.get(v, j) - expected).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn duplicate_and_reversed_edges_collapse() {
    let g = Graph::from_edges(2, &[(0, 1), (1, 0), (1, 1), (0, 1)]).unwrap();
    assert_eq!(g.num_edges(), 1);
    assert_eq!(g.neighbors(0), &[1]);
    assert_eq!(g.neighbors(1), &[0]);
}
