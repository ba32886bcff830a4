//! Undirected graphs in compressed sparse row form.
//!
//! A [`Graph`] stores every undirected edge twice (once per endpoint), with
//! sorted, duplicate-free neighbor lists and no self-loops. All derived
//! operators ([`NormalizedAdjacency`]) are immutable and can be shared between
//! worker threads.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Immutable undirected graph over dense node indices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    num_nodes: usize,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
}

impl Graph {
    /// Builds a graph from an arbitrary edge list.
    ///
    /// Edges are symmetrized and deduplicated; self-loops are dropped.
    pub fn from_edges(num_nodes: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut lists: Vec<Vec<usize>> = vec![Vec::new(); num_nodes];
        for &(u, v) in edges {
            if u >= num_nodes || v >= num_nodes {
                return Err(Error::InvalidInput(format!(
                    "edge ({u}, {v}) references a node outside 0..{num_nodes}"
                )));
            }
            if u == v {
                continue;
            }
            lists[u].push(v);
            lists[v].push(u);
        }

        let mut offsets = Vec::with_capacity(num_nodes + 1);
        let mut neighbors = Vec::new();
        offsets.push(0);
        for list in &mut lists {
            list.sort_unstable();
            list.dedup();
            neighbors.extend_from_slice(list);
            offsets.push(neighbors.len());
        }
        Ok(Self {
            num_nodes,
            offsets,
            neighbors,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// Number of undirected edges `|E|`.
    pub fn num_edges(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.neighbors[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn max_degree(&self) -> usize {
        (0..self.num_nodes).map(|u| self.degree(u)).max().unwrap_or(0)
    }

    pub fn mean_degree(&self) -> f64 {
        if self.num_nodes == 0 {
            0.0
        } else {
            self.neighbors.len() as f64 / self.num_nodes as f64
        }
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in CSR order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_nodes).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// Returns the graph with node `u` renamed to `perm[u]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.num_nodes {
            return Err(Error::InvalidInput(format!(
                "permutation has length {} for {} nodes",
                perm.len(),
                self.num_nodes
            )));
        }
        let edges: Vec<_> = self.edges().map(|(u, v)| (perm[u], perm[v])).collect();
        Graph::from_edges(self.num_nodes, &edges)
    }
}

/// Class label per node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelVector {
    labels: Vec<usize>,
    num_classes: usize,
}

impl LabelVector {
    pub fn new(labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        if num_classes < 2 {
            return Err(Error::InvalidInput(format!(
                "need at least 2 classes, got {num_classes}"
            )));
        }
        if let Some((node, &label)) = labels.iter().enumerate().find(|(_, &l)| l >= num_classes) {
            return Err(Error::LabelOutOfRange {
                node: node.to_string(),
                label: label as i64,
                num_classes,
            });
        }
        Ok(Self {
            labels,
            num_classes,
        })
    }

    /// Infers `num_classes` as `max(label) + 1`.
    pub fn from_labels(labels: Vec<usize>) -> Result<Self> {
        let num_classes = labels.iter().max().map_or(0, |&m| m + 1);
        Self::new(labels, num_classes.max(2))
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, u: usize) -> usize {
        self.labels[u]
    }
}

/// Edge homophily ratio together with the counts it was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomophilyReport {
    pub edge_homophily: f64,
    pub same_label_edges: usize,
    pub total_edges: usize,
}

/// Fraction of undirected edges whose endpoints share a label.
pub fn edge_homophily(graph: &Graph, labels: &LabelVector) -> Result<HomophilyReport> {
    check_label_len(graph, labels)?;
    let total_edges = graph.num_edges();
    if total_edges == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    let same_label_edges = graph
        .edges()
        .filter(|&(u, v)| labels.get(u) == labels.get(v))
        .count();
    Ok(HomophilyReport {
        edge_homophily: same_label_edges as f64 / total_edges as f64,
        same_label_edges,
        total_edges,
    })
}

/// Symmetric `|C| x |C|` matrix of undirected edge counts between classes.
/// Off-diagonal edges are counted in both `(a, b)` and `(b, a)`.
pub fn class_edge_matrix(graph: &Graph, labels: &LabelVector) -> Result<Vec<Vec<usize>>> {
    check_label_len(graph, labels)?;
    let c = labels.num_classes();
    let mut counts = vec![vec![0usize; c]; c];
    for (u, v) in graph.edges() {
        let (a, b) = (labels.get(u), labels.get(v));
        counts[a][b] += 1;
        if a != b {
            counts[b][a] += 1;
        }
    }
    Ok(counts)
}

fn check_label_len(graph: &Graph, labels: &LabelVector) -> Result<()> {
    if labels.len() != graph.num_nodes() {
        return Err(Error::InvalidInput(format!(
            "{} labels for {} nodes",
            labels.len(),
            graph.num_nodes()
        )));
    }
    Ok(())
}

/// Sparse `D^{-1/2} (A + I) D^{-1/2}` where `D` counts the self-loop.
///
/// Rows are stored in CSR form; each row holds its neighbors and the
/// diagonal entry, sorted by column.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedAdjacency {
    num_nodes: usize,
    offsets: Vec<usize>,
    columns: Vec<usize>,
    weights: Vec<f64>,
}

impl NormalizedAdjacency {
    pub fn new(graph: &Graph) -> Self {
        let n = graph.num_nodes();
        let inv_sqrt: Vec<f64> = (0..n)
            .map(|u| 1.0 / ((graph.degree(u) + 1) as f64).sqrt())
            .collect();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut columns = Vec::with_capacity(2 * graph.num_edges() + n);
        let mut weights = Vec::with_capacity(columns.capacity());
        offsets.push(0);
        for u in 0..n {
            let nbrs = graph.neighbors(u);
            let split = nbrs.partition_point(|&v| v < u);
            let row = nbrs[..split]
                .iter()
                .copied()
                .chain(std::iter::once(u))
                .chain(nbrs[split..].iter().copied());
            for v in row {
                columns.push(v);
                weights.push(inv_sqrt[u] * inv_sqrt[v]);
            }
            offsets.push(columns.len());
        }
        Self {
            num_nodes: n,
            offsets,
            columns,
            weights,
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// `(column, weight)` pairs of row `u`.
    pub fn row(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[u]..self.offsets[u + 1];
        self.columns[range.clone()]
            .iter()
            .copied()
            .zip(self.weights[range].iter().copied())
    }

    /// Entry `(u, v)`, zero when absent.
    pub fn get(&self, u: usize, v: usize) -> f64 {
        let range = self.offsets[u]..self.offsets[u + 1];
        match self.columns[range.clone()].binary_search(&v) {
            Ok(i) => self.weights[range.start + i],
            Err(_) => 0.0,
        }
    }
}

/// Shorthand for [`NormalizedAdjacency::new`].
pub fn normalized_adjacency(graph: &Graph) -> NormalizedAdjacency {
    NormalizedAdjacency::new(graph)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn dedupes_and_drops_self_loops() {
        let g = Graph::from_edges(2, &[(0, 1), (1, 0), (1, 1)]).unwrap();
        assert_eq!(g.num_edges(), 1);
        assert_eq!(g.neighbors(0), &[1]);
        assert_eq!(g.neighbors(1), &[0]);
    }

    #[test]
    fn empty_edge_list() {
        let g = Graph::from_edges(3, &[]).unwrap();
        assert_eq!(g.num_edges(), 0);
        assert!((0..3).all(|u| g.degree(u) == 0));
        assert_eq!(g.offsets(), &[0, 0, 0, 0]);
    }

    #[test]
    fn triangle_neighbors() {
        let g = triangle();
        assert_eq!(g.neighbors(0), &[1, 2]);
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert_eq!(g.neighbors(2), &[0, 1]);
        assert_eq!(g.degree(1), 2);
    }

    #[test]
    fn star_center_degree() {
        let k = 7;
        let edges: Vec<_> = (1..=k).map(|leaf| (0, leaf)).collect();
        let g = Graph::from_edges(k + 1, &edges).unwrap();
        assert_eq!(g.degree(0), k);
        assert!((1..=k).all(|leaf| g.degree(leaf) == 1));
    }

    #[test]
    fn out_of_range_edge_rejected() {
        assert!(matches!(
            Graph::from_edges(2, &[(0, 2)]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn homophily_fixtures() {
        let g = triangle();
        let same = LabelVector::new(vec![0, 0, 0], 2).unwrap();
        assert_eq!(edge_homophily(&g, &same).unwrap().edge_homophily, 1.0);

        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let alt = LabelVector::new(vec![0, 1, 0], 2).unwrap();
        let r = edge_homophily(&path, &alt).unwrap();
        assert_eq!(r.edge_homophily, 0.0);
        assert_eq!(r.total_edges, 2);
    }

    #[test]
    fn homophily_without_edges_is_an_error() {
        let g = Graph::from_edges(2, &[]).unwrap();
        let labels = LabelVector::new(vec![0, 1], 2).unwrap();
        assert!(matches!(edge_homophily(&g, &labels), Err(Error::EmptyEdgeSet)));
    }

    #[test]
    fn label_validation() {
        assert!(LabelVector::new(vec![0, 2], 2).is_err());
        assert!(LabelVector::new(vec![0, 0], 1).is_err());
    }

    #[test]
    fn class_matrix_counts_each_edge() {
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let labels = LabelVector::new(vec![0, 1, 1], 2).unwrap();
        let m = class_edge_matrix(&path, &labels).unwrap();
        assert_eq!(m, vec![vec![0, 1], vec![1, 1]]);
    }

    #[test]
    fn normalized_adjacency_entries() {
        let single = Graph::from_edges(1, &[]).unwrap();
        assert_eq!(normalized_adjacency(&single).get(0, 0), 1.0);

        let pair = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let a = normalized_adjacency(&pair);
        for u in 0..2 {
            for v in 0..2 {
                assert!((a.get(u, v) - 0.5).abs() < 1e-15);
            }
        }

        let a = normalized_adjacency(&triangle());
        for u in 0..3 {
            assert!((a.get(u, u) - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn normalized_adjacency_is_symmetric() {
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (3, 4)]).unwrap();
        let a = normalized_adjacency(&g);
        for u in 0..5 {
            for v in 0..5 {
                assert_eq!(a.get(u, v), a.get(v, u));
            }
        }
    }

    #[test]
    fn regular_graph_preserves_constants() {
        // 6-cycle is 2-regular
        let edges: Vec<_> = (0..6).map(|u| (u, (u + 1) % 6)).collect();
        let g = Graph::from_edges(6, &edges).unwrap();
        let a = normalized_adjacency(&g);
        for u in 0..6 {
            let s: f64 = a.row(u).map(|(_, w)| w).sum();
            assert!((s - 1.0).abs() < 1e-15);
        }
    }
}
