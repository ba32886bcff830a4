use std::fs;

use gcnh::data::{load_dataset, save_dataset, Dataset, SplitMask, EDGES_FILE, NODES_FILE, SPLITS_FILE};
use gcnh::graph::{edge_homophily, Graph, LabelVector};
use gcnh::model::{Model, ModelConfig};
use gcnh::tensor::Matrix;

fn small_dataset() -> Dataset {
    let graph = Graph::from_edges(3, &[(1, 0), (2, 1)]).unwrap();
    let features = Matrix::from_rows(&[vec![0.5, -1.0], vec![2.0, 0.0], vec![0.25, 3.0]]).unwrap();
    let labels = LabelVector::new(vec![0, 1, 0], 2).unwrap();
    let split = SplitMask {
        train: vec![0],
        val: vec![1],
        test: vec![2],
    };
    Dataset::new("small", graph, features, labels, vec![split]).unwrap()
}

#[test]
fn golden_output_bytes() {
    let dir = tempfile::tempdir().unwrap();
    save_dataset(&small_dataset(), dir.path()).unwrap();
    let read = |name| fs::read_to_string(dir.path().join(name)).unwrap();
    assert_eq!(read(NODES_FILE), "0\t0\t0.5,-1.0\n1\t1\t2.0,0.0\n2\t0\t0.25,3.0\n");
    assert_eq!(read(EDGES_FILE), "0\t1\n1\t2\n");
    assert_eq!(read(SPLITS_FILE), "[{\"train\":[0],\"val\":[1],\"test\":[2]}]\n");

    let again = tempfile::tempdir().unwrap();
    save_dataset(&small_dataset(), again.path()).unwrap();
    for name in [NODES_FILE, EDGES_FILE, SPLITS_FILE] {
        assert_eq!(fs::read(dir.path().join(name)).unwrap(), fs::read(again.path().join(name)).unwrap());
    }
}

fn write_dir(nodes: &str, edges: &str, splits: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join(NODES_FILE), nodes).unwrap();
    fs::write(dir.path().join(EDGES_FILE), edges).unwrap();
    fs::write(dir.path().join(SPLITS_FILE), splits).unwrap();
    dir
}

const FOUR_NODES: &str = "a\t0\t1,0\nb\t0\t1,1\nc\t1\t0,1\nd\t1\t0,0\n";
const FOUR_SPLITS: &str = r#"[{"train":[0,2],"val":[1],"test":[3]}]"#;

#[test]
fn four_node_cycle_has_half_homophily() {
    // a-b and c-d join equal labels, b-c and d-a do not
    let dir = write_dir(FOUR_NODES, "a\tb\nb\tc\nc\td\nd\ta\n", FOUR_SPLITS);
    let ds = load_dataset(dir.path()).unwrap();
    let report = edge_homophily(&ds.graph, &ds.labels).unwrap();
    assert_eq!(report.edge_homophily, 0.5);
    assert_eq!(ds.graph.num_edges(), 4);
}

#[test]
fn duplicate_edge_lines_give_one_edge() {
    let dir = write_dir(FOUR_NODES, "a\tb\nb\ta\na\tb\nc\tc\n", FOUR_SPLITS);
    let ds = load_dataset(dir.path()).unwrap();
    assert_eq!(ds.graph.num_edges(), 1);
    assert_eq!(ds.graph.neighbors(0), &[1]);
    assert!(ds.graph.neighbors(2).is_empty());
}

fn closed_form(gcnh: bool, layers: usize, f: usize, hidden: usize, c: usize) -> usize {
    let layer = |fan_in: usize| if gcnh { 2 * (fan_in * hidden + hidden) + 1 } else { fan_in * hidden + hidden };
    (0..layers).map(|l| layer(if l == 0 { f } else { hidden })).sum::<usize>() + hidden * c + c
}

#[test]
fn parameter_counts_follow_closed_form() {
    let mut points = 0;
    for layers in [1, 2, 3] {
        for f in [5, 1433] {
            for hidden in [16, 64] {
                for c in [2, 7] {
                    points += 1;
                    let gcnh = Model::new(ModelConfig::gcnh(layers, hidden), f, c, 0).unwrap();
                    assert_eq!(gcnh.count_params(), closed_form(true, layers, f, hidden, c));
                    let gcn = Model::new(ModelConfig::gcn(layers, hidden), f, c, 0).unwrap();
                    assert_eq!(gcn.count_params(), closed_form(false, layers, f, hidden, c));
                    let mlp = Model::new(ModelConfig::mlp(layers, hidden), f, c, 0).unwrap();
                    assert_eq!(mlp.count_params(), gcn.count_params());
                }
            }
        }
    }
    assert_eq!(points, 24);
    assert_eq!(Model::new(ModelConfig::gcnh(1, 16), 1433, 7, 0).unwrap().count_params(), 46_008);
}
