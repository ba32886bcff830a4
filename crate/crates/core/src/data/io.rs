//! Directory format:
//!
//! - `nodes.tsv`: `node_id<TAB>label<TAB>comma-separated features`, one node
//!   per line. Line order defines the dense node index.
//! - `edges.tsv`: `src<TAB>dst` using node ids; duplicates and reversed
//!   copies collapse into one undirected edge.
//! - `splits.json`: `[{"train": [...], "val": [...], "test": [...]}, ...]`
//!   over dense indices.
//!
//! Files are UTF-8 with LF line endings. Features are written as the
//! shortest decimal that parses back to the same `f64`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{Dataset, SplitMask};
use crate::error::{Error, Result};
use crate::graph::{Graph, LabelVector};
use crate::tensor::Matrix;

pub const NODES_FILE: &str = "nodes.tsv";
pub const EDGES_FILE: &str = "edges.tsv";
pub const SPLITS_FILE: &str = "splits.json";

fn read(path: &Path) -> Result<String> {
    if !path.is_file() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn malformed(file: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Malformed {
        file: file.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Loads a dataset directory. The dataset name is the directory name.
pub fn load_dataset(dir: impl AsRef<Path>) -> Result<Dataset> {
    let dir = dir.as_ref();
    let nodes_path = dir.join(NODES_FILE);
    let edges_path = dir.join(EDGES_FILE);
    let splits_path = dir.join(SPLITS_FILE);
    let nodes_text = read(&nodes_path)?;
    let edges_text = read(&edges_path)?;
    let splits_text = read(&splits_path)?;

    let mut node_ids = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut raw_labels = Vec::new();
    let mut feature_data = Vec::new();
    let mut num_features = None;
    for (i, line) in nodes_text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let (Some(id), Some(label), Some(feats), None) =
            (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(malformed(&nodes_path, line_no, "expected 3 tab-separated fields"));
        };
        let label: i64 = label
            .trim()
            .parse()
            .map_err(|_| malformed(&nodes_path, line_no, format!("bad label `{label}`")))?;
        if label < 0 {
            return Err(Error::LabelOutOfRange {
                node: id.to_string(),
                label,
                num_classes: 0,
            });
        }
        let row: Vec<f64> = feats
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| malformed(&nodes_path, line_no, "bad feature value"))?;
        if row.iter().any(|v| !v.is_finite()) {
            return Err(malformed(&nodes_path, line_no, "non-finite feature value"));
        }
        match num_features {
            None => num_features = Some(row.len()),
            Some(f) if f != row.len() => {
                return Err(malformed(
                    &nodes_path,
                    line_no,
                    format!("{} features, expected {f}", row.len()),
                ))
            }
            _ => {}
        }
        if index.insert(id.to_string(), node_ids.len()).is_some() {
            return Err(malformed(&nodes_path, line_no, format!("duplicate node id `{id}`")));
        }
        node_ids.push(id.to_string());
        raw_labels.push(label as usize);
        feature_data.extend(row);
    }
    let n = node_ids.len();
    let labels = LabelVector::from_labels(raw_labels)?;
    let features = Matrix::new(n, num_features.unwrap_or(0), feature_data)?;

    let mut edges = Vec::new();
    for (i, line) in edges_text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let (Some(src), Some(dst), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(malformed(&edges_path, line_no, "expected 2 tab-separated fields"));
        };
        let lookup = |id: &str| {
            index
                .get(id.trim())
                .copied()
                .ok_or_else(|| malformed(&edges_path, line_no, format!("unknown node id `{id}`")))
        };
        edges.push((lookup(src)?, lookup(dst)?));
    }
    let graph = Graph::from_edges(n, &edges)?;

    let splits: Vec<SplitMask> = serde_json::from_str(&splits_text).map_err(|e| Error::Malformed {
        file: splits_path.clone(),
        line: e.line(),
        message: e.to_string(),
    })?;

    let name = dir
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let ds = Dataset {
        name,
        graph,
        features,
        labels,
        splits,
        node_ids,
    };
    ds.validate()?;
    Ok(ds)
}

/// Writes `dataset` into `dir` (created if needed). Output bytes depend only
/// on the dataset contents.
pub fn save_dataset(dataset: &Dataset, dir: impl AsRef<Path>) -> Result<()> {
    dataset.validate()?;
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let mut nodes = String::new();
    for u in 0..dataset.num_nodes() {
        let _ = write!(nodes, "{}\t{}\t", dataset.node_ids[u], dataset.labels.get(u));
        for (j, v) in dataset.features.row(u).iter().enumerate() {
            if j > 0 {
                nodes.push(',');
            }
            let _ = write!(nodes, "{v:?}");
        }
        nodes.push('\n');
    }

    let mut edges = String::new();
    for (u, v) in dataset.graph.edges() {
        let _ = writeln!(edges, "{}\t{}", dataset.node_ids[u], dataset.node_ids[v]);
    }

    let splits = serde_json::to_string(&dataset.splits)? + "\n";

    let write = |name: &str, contents: &str| {
        let path: PathBuf = dir.join(name);
        fs::write(&path, contents).map_err(|e| Error::io(path, e))
    };
    write(NODES_FILE, &nodes)?;
    write(EDGES_FILE, &edges)?;
    write(SPLITS_FILE, &splits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_fixture(dir: &Path, nodes: &str, edges: &str, splits: &str) {
        fs::write(dir.join(NODES_FILE), nodes).unwrap();
        fs::write(dir.join(EDGES_FILE), edges).unwrap();
        fs::write(dir.join(SPLITS_FILE), splits).unwrap();
    }

    const SPLITS: &str = r#"[{"train":[0],"val":[1],"test":[2,3]}]"#;

    #[test]
    fn ids_are_remapped_in_load_order() {
        let dir = tempfile::tempdir().unwrap();
        write_fixture(
            dir.path(),
            "p9\t1\t1,0\np3\t0\t0,1\nx\t1\t0.5,0.5\ny\t0\t1,1\n",
            "p9\tp3\np3\tp9\nx\ty\n",
            SPLITS,
        );
        let ds = load_dataset(dir.path()).unwrap();
        assert_eq!(ds.node_ids, vec!["p9", "p3", "x", "y"]);
        assert_eq!(ds.graph.num_edges(), 2);
        assert_eq!(ds.graph.neighbors(0), &[1]);
        assert_eq!(ds.features.row(2), &[0.5, 0.5]);
    }

    #[test]
    fn error_kinds() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path();
        assert!(matches!(load_dataset(p), Err(Error::MissingFile(_))));

        write_fixture(p, "a\t0\t1\nb\t1\nc\t0\t1\nd\t1\t1\n", "", SPLITS);
        assert!(matches!(load_dataset(p), Err(Error::Malformed { line: 2, .. })));

        write_fixture(p, "a\t0\t1\nb\t-1\t1\nc\t0\t1\nd\t1\t1\n", "", SPLITS);
        assert!(matches!(load_dataset(p), Err(Error::LabelOutOfRange { .. })));

        write_fixture(p, "a\t0\t1\nb\t1\t1\nc\t0\t1\nd\t1\t1\n", "a\tb\na\tzz\n", SPLITS);
        assert!(matches!(load_dataset(p), Err(Error::Malformed { line: 2, .. })));

        write_fixture(
            p,
            "a\t0\t1\nb\t1\t1\nc\t0\t1\nd\t1\t1\n",
            "a\tb\n",
            r#"[{"train":[0],"val":[1],"test":[9]}]"#,
        );
        assert!(matches!(load_dataset(p), Err(Error::SplitIndexOutOfRange { index: 9, .. })));
    }
}
