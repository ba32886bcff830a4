mod common;

use gcnh::model::ModelConfig;
use gcnh::tensor::AggregationMode;

const TOLERANCE: f64 = 1e-4;

#[test]
fn gcnh_gradients_match_finite_differences() {
    for mode in AggregationMode::ALL {
        for layers in [1, 2] {
            let config = ModelConfig::gcnh(layers, 6).with_aggregation(mode).with_dropout(0.2);
            let err = common::gradient_check(&config, 12, 8, 3, 31 + layers as u64);
            assert!(err <= TOLERANCE, "{mode} L{layers}: {err:e}");
        }
    }
}

#[test]
fn gcnh_fixed_beta_and_shared_mlps() {
    let pinned = ModelConfig::gcnh(2, 5).with_fixed_beta(0.3);
    assert!(common::gradient_check(&pinned, 12, 8, 3, 5) <= TOLERANCE);
    let mut shared = ModelConfig::gcnh(2, 5);
    shared.share_mlps = true;
    assert!(common::gradient_check(&shared, 12, 8, 3, 6) <= TOLERANCE);
}

#[test]
fn baseline_gradients_match_finite_differences() {
    for layers in [1, 2] {
        let gcn = ModelConfig::gcn(layers, 6).with_dropout(0.3);
        let mlp = ModelConfig::mlp(layers, 6).with_dropout(0.3);
        assert!(common::gradient_check(&gcn, 12, 8, 3, 11) <= TOLERANCE);
        assert!(common::gradient_check(&mlp, 12, 8, 3, 12) <= TOLERANCE);
    }
}
