use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::matrix::{axpy, Matrix};
use crate::error::{Error, Result};
use crate::graph::{Graph, LabelVector, NormalizedAdjacency};

/// Negative slope of every LeakyReLU in the crate.
pub const LEAKY_RELU_SLOPE: f64 = 0.01;

/// Handle to a node recorded on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var(usize);

/// Permutation-invariant reduction over a node's neighbors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum AggregationMode {
    #[default]
    Sum,
    Mean,
    Max,
}

impl AggregationMode {
    pub const ALL: [AggregationMode; 3] = [Self::Sum, Self::Mean, Self::Max];
}

impl fmt::Display for AggregationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Sum => "sum",
            Self::Mean => "mean",
            Self::Max => "max",
        })
    }
}

impl FromStr for AggregationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sum" => Ok(Self::Sum),
            "mean" => Ok(Self::Mean),
            "max" => Ok(Self::Max),
            other => Err(Error::InvalidInput(format!(
                "unknown aggregation mode `{other}`"
            ))),
        }
    }
}

enum Op<'a> {
    Leaf,
    MatMul(Var, Var),
    AddRowBias(Var, Var),
    LeakyRelu(Var, f64),
    Sigmoid(Var),
    /// Scaled keep-mask, `0` or `1 / (1 - rate)` per entry.
    Dropout(Var, Matrix),
    Aggregate {
        input: Var,
        graph: &'a Graph,
        mode: AggregationMode,
        /// Source row per output entry for `Max`; `usize::MAX` when empty.
        argmax: Vec<usize>,
    },
    Propagate(Var, &'a NormalizedAdjacency),
    /// `(1 - beta) * neighborhood + beta * center`.
    Mix {
        neighborhood: Var,
        center: Var,
        beta: Var,
    },
    SoftmaxNll {
        logits: Var,
        labels: &'a LabelVector,
        mask: Vec<usize>,
        /// Softmax rows for `mask`, in mask order.
        probs: Matrix,
    },
}

struct Node<'a> {
    value: Cow<'a, Matrix>,
    grad: Option<Matrix>,
    requires_grad: bool,
    op: Op<'a>,
}

/// Record of a forward computation, replayed in reverse by [`Tape::backward`].
///
/// Nodes are appended in evaluation order, so the node list is already a
/// topological order of the computation.
pub struct Tape<'a> {
    nodes: Vec<Node<'a>>,
    relu_margin: f64,
    max_gap: f64,
}

impl Default for Tape<'_> {
    fn default() -> Self {
        Self::new()
    }
}

impl<'a> Tape<'a> {
    pub fn new() -> Self {
        Self {
            nodes: Vec::new(),
            relu_margin: f64::INFINITY,
            max_gap: f64::INFINITY,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Smallest distance to a non-differentiable point seen so far: the
    /// minimum `|x|` fed to a LeakyReLU and the minimum gap between the two
    /// largest candidates of any max-aggregation entry.
    pub fn kink_margin(&self) -> f64 {
        self.relu_margin.min(self.max_gap)
    }

    /// Smallest `|x|` fed to a LeakyReLU so far.
    pub fn relu_margin(&self) -> f64 {
        self.relu_margin
    }

    /// Smallest gap between the two largest candidates of a max-aggregation
    /// entry so far.
    pub fn max_gap(&self) -> f64 {
        self.max_gap
    }

    fn push(&mut self, value: Cow<'a, Matrix>, requires_grad: bool, op: Op<'a>) -> Var {
        self.nodes.push(Node {
            value,
            grad: None,
            requires_grad,
            op,
        });
        Var(self.nodes.len() - 1)
    }

    fn push_owned(&mut self, value: Matrix, inputs: &[Var], op: Op<'a>) -> Var {
        let requires_grad = inputs.iter().any(|&v| self.nodes[v.0].requires_grad);
        self.push(Cow::Owned(value), requires_grad, op)
    }

    pub fn leaf(&mut self, value: Matrix, requires_grad: bool) -> Var {
        self.push(Cow::Owned(value), requires_grad, Op::Leaf)
    }

    /// Leaf that borrows its value, e.g. the feature matrix or a parameter.
    pub fn leaf_ref(&mut self, value: &'a Matrix, requires_grad: bool) -> Var {
        self.push(Cow::Borrowed(value), requires_grad, Op::Leaf)
    }

    pub fn constant(&mut self, value: Matrix) -> Var {
        self.leaf(value, false)
    }

    pub fn value(&self, v: Var) -> &Matrix {
        &self.nodes[v.0].value
    }

    pub fn grad(&self, v: Var) -> Option<&Matrix> {
        self.nodes[v.0].grad.as_ref()
    }

    /// Gradient of `v`, or zeros of the right shape when nothing flowed into it.
    pub fn grad_or_zeros(&self, v: Var) -> Matrix {
        self.grad(v).cloned().unwrap_or_else(|| {
            let (r, c) = self.value(v).shape();
            Matrix::zeros(r, c)
        })
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let out = self.value(a).matmul(self.value(b))?;
        Ok(self.push_owned(out, &[a, b], Op::MatMul(a, b)))
    }

    pub fn add_row_bias(&mut self, x: Var, bias: Var) -> Result<Var> {
        let (xv, bv) = (self.value(x), self.value(bias));
        if bv.rows() != 1 || bv.cols() != xv.cols() {
            return Err(Error::shape(
                "add_row_bias",
                format!("{:?} + {:?}", xv.shape(), bv.shape()),
            ));
        }
        let mut out = xv.clone();
        let b = bv.data();
        for r in 0..out.rows() {
            for (o, bi) in out.row_mut(r).iter_mut().zip(b) {
                *o += bi;
            }
        }
        Ok(self.push_owned(out, &[x, bias], Op::AddRowBias(x, bias)))
    }

    pub fn leaky_relu(&mut self, x: Var, slope: f64) -> Var {
        let xv = self.value(x);
        let mut margin = self.relu_margin;
        let out = xv.map(|v| {
            margin = margin.min(v.abs());
            if v > 0.0 {
                v
            } else {
                slope * v
            }
        });
        self.relu_margin = margin;
        self.push_owned(out, &[x], Op::LeakyRelu(x, slope))
    }

    pub fn sigmoid_scalar(&mut self, raw: Var) -> Result<Var> {
        let rv = self.value(raw);
        if rv.shape() != (1, 1) {
            return Err(Error::shape("sigmoid_scalar", format!("{:?}", rv.shape())));
        }
        let out = Matrix::scalar(sigmoid(rv.data()[0]));
        Ok(self.push_owned(out, &[raw], Op::Sigmoid(raw)))
    }

    /// Inverted dropout. Identity when `training` is false or `rate == 0`.
    pub fn dropout(&mut self, x: Var, rate: f64, training: bool, rng: &mut impl Rng) -> Result<Var> {
        if !(0.0..1.0).contains(&rate) {
            return Err(Error::InvalidInput(format!(
                "dropout rate {rate} outside [0, 1)"
            )));
        }
        if !training || rate == 0.0 {
            return Ok(x);
        }
        let scale = 1.0 / (1.0 - rate);
        let xv = self.value(x);
        let mask = xv.map(|_| if rng.gen::<f64>() < rate { 0.0 } else { scale });
        let out = xv.zip_map(&mask, |v, m| v * m);
        Ok(self.push_owned(out, &[x], Op::Dropout(x, mask)))
    }

    /// Row `u` of the output reduces the rows of `x` indexed by `N(u)`.
    /// Nodes without neighbors get a zero row in every mode.
    pub fn neighbor_aggregate(
        &mut self,
        graph: &'a Graph,
        x: Var,
        mode: AggregationMode,
    ) -> Result<Var> {
        let xv = self.value(x);
        let n = graph.num_nodes();
        if xv.rows() != n {
            return Err(Error::shape(
                "neighbor_aggregate",
                format!("{} rows for {n} nodes", xv.rows()),
            ));
        }
        let d = xv.cols();
        let mut out = Matrix::zeros(n, d);
        let mut argmax = Vec::new();
        match mode {
            AggregationMode::Sum | AggregationMode::Mean => {
                for u in 0..n {
                    let nbrs = graph.neighbors(u);
                    let row = out.row_mut(u);
                    for &v in nbrs {
                        axpy(1.0, xv.row(v), row);
                    }
                    if mode == AggregationMode::Mean && !nbrs.is_empty() {
                        let inv = 1.0 / nbrs.len() as f64;
                        row.iter_mut().for_each(|o| *o *= inv);
                    }
                }
            }
            AggregationMode::Max => {
                argmax = vec![usize::MAX; n * d];
                let mut margin = self.max_gap;
                let mut second = vec![f64::NEG_INFINITY; d];
                for u in 0..n {
                    let nbrs = graph.neighbors(u);
                    let Some((&first, rest)) = nbrs.split_first() else {
                        continue;
                    };
                    let arg = &mut argmax[u * d..(u + 1) * d];
                    let row = out.row_mut(u);
                    row.copy_from_slice(xv.row(first));
                    arg.iter_mut().for_each(|a| *a = first);
                    second.iter_mut().for_each(|s| *s = f64::NEG_INFINITY);
                    for &v in rest {
                        for (j, &val) in xv.row(v).iter().enumerate() {
                            // strict comparison keeps the lowest index on ties
                            if val > row[j] {
                                second[j] = row[j];
                                row[j] = val;
                                arg[j] = v;
                            } else if val > second[j] {
                                second[j] = val;
                            }
                        }
                    }
                    if rest.is_empty() {
                        continue;
                    }
                    for j in 0..d {
                        margin = margin.min(row[j] - second[j]);
                    }
                }
                self.max_gap = margin;
            }
        }
        Ok(self.push_owned(
            out,
            &[x],
            Op::Aggregate {
                input: x,
                graph,
                mode,
                argmax,
            },
        ))
    }

    /// `adj * x` for the normalized adjacency of a GCN layer.
    pub fn propagate(&mut self, adj: &'a NormalizedAdjacency, x: Var) -> Result<Var> {
        let xv = self.value(x);
        let n = adj.num_nodes();
        if xv.rows() != n {
            return Err(Error::shape(
                "propagate",
                format!("{} rows for {n} nodes", xv.rows()),
            ));
        }
        let mut out = Matrix::zeros(n, xv.cols());
        for u in 0..n {
            let row = out.row_mut(u);
            for (v, w) in adj.row(u) {
                axpy(w, xv.row(v), row);
            }
        }
        Ok(self.push_owned(out, &[x], Op::Propagate(x, adj)))
    }

    /// `(1 - beta) * neighborhood + beta * center` with a `1x1` `beta`.
    pub fn mix(&mut self, neighborhood: Var, center: Var, beta: Var) -> Result<Var> {
        let (nv, cv, bv) = (self.value(neighborhood), self.value(center), self.value(beta));
        if nv.shape() != cv.shape() || bv.shape() != (1, 1) {
            return Err(Error::shape(
                "mix",
                format!("{:?}, {:?}, beta {:?}", nv.shape(), cv.shape(), bv.shape()),
            ));
        }
        let b = bv.data()[0];
        let out = nv.zip_map(cv, |zn, zc| (1.0 - b) * zn + b * zc);
        Ok(self.push_owned(
            out,
            &[neighborhood, center, beta],
            Op::Mix {
                neighborhood,
                center,
                beta,
            },
        ))
    }

    /// Mean negative log-likelihood of `labels` under row-wise softmax of
    /// `logits`, over the rows listed in `mask`.
    pub fn softmax_nll(
        &mut self,
        logits: Var,
        labels: &'a LabelVector,
        mask: &[usize],
    ) -> Result<Var> {
        if mask.is_empty() {
            return Err(Error::EmptyMask);
        }
        let lv = self.value(logits);
        if lv.rows() != labels.len() || lv.cols() != labels.num_classes() {
            return Err(Error::shape(
                "softmax_nll",
                format!(
                    "logits {:?} for {} labels over {} classes",
                    lv.shape(),
                    labels.len(),
                    labels.num_classes()
                ),
            ));
        }
        if let Some(&bad) = mask.iter().find(|&&u| u >= lv.rows()) {
            return Err(Error::InvalidInput(format!("mask index {bad} out of range")));
        }
        let c = lv.cols();
        let mut probs = Matrix::zeros(mask.len(), c);
        let mut total = 0.0;
        for (i, &u) in mask.iter().enumerate() {
            let row = lv.row(u);
            let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let p = probs.row_mut(i);
            let mut sum = 0.0;
            for (pj, &l) in p.iter_mut().zip(row) {
                *pj = (l - max).exp();
                sum += *pj;
            }
            p.iter_mut().for_each(|pj| *pj /= sum);
            total += sum.ln() - (row[labels.get(u)] - max);
        }
        let out = Matrix::scalar(total / mask.len() as f64);
        Ok(self.push_owned(
            out,
            &[logits],
            Op::SoftmaxNll {
                logits,
                labels,
                mask: mask.to_vec(),
                probs,
            },
        ))
    }

    /// Backpropagates from a `1x1` node, filling gradients of every node that
    /// requires them. Gradients from earlier calls are discarded.
    pub fn backward(&mut self, loss: Var) -> Result<()> {
        let lv = self.value(loss);
        if lv.shape() != (1, 1) {
            return Err(Error::shape("backward", format!("loss {:?}", lv.shape())));
        }
        if !lv.all_finite() {
            return Err(Error::NonFinite("loss".into()));
        }
        for node in &mut self.nodes {
            node.grad = None;
        }
        if !self.nodes[loss.0].requires_grad {
            return Ok(());
        }
        self.nodes[loss.0].grad = Some(Matrix::scalar(1.0));

        for idx in (0..=loss.0).rev() {
            let node = &self.nodes[idx];
            if !node.requires_grad || matches!(node.op, Op::Leaf) {
                continue;
            }
            let Some(g) = node.grad.as_ref() else {
                continue;
            };
            let contributions = self.input_grads(idx, g)?;
            for (input, contrib) in contributions {
                let target = &mut self.nodes[input.0];
                if !target.requires_grad {
                    continue;
                }
                match target.grad.as_mut() {
                    Some(acc) => acc.add_assign(&contrib),
                    None => target.grad = Some(contrib),
                }
            }
        }
        for (idx, node) in self.nodes.iter().enumerate() {
            if let Some(g) = &node.grad {
                if !g.all_finite() {
                    return Err(Error::NonFinite(format!("gradient of tape node {idx}")));
                }
            }
        }
        Ok(())
    }

    fn needs(&self, v: Var) -> bool {
        self.nodes[v.0].requires_grad
    }

    fn input_grads(&self, idx: usize, g: &Matrix) -> Result<Vec<(Var, Matrix)>> {
        let node = &self.nodes[idx];
        let mut out = Vec::with_capacity(2);
        match &node.op {
            Op::Leaf => {}
            Op::MatMul(a, b) => {
                if self.needs(*a) {
                    out.push((*a, g.matmul_t(self.value(*b))?));
                }
                if self.needs(*b) {
                    out.push((*b, self.value(*a).t_matmul(g)?));
                }
            }
            Op::AddRowBias(x, b) => {
                if self.needs(*x) {
                    out.push((*x, g.clone()));
                }
                if self.needs(*b) {
                    let mut gb = Matrix::zeros(1, g.cols());
                    for r in 0..g.rows() {
                        axpy(1.0, g.row(r), gb.data_mut());
                    }
                    out.push((*b, gb));
                }
            }
            Op::LeakyRelu(x, slope) => {
                let gx = g.zip_map(self.value(*x), |gi, xi| if xi > 0.0 { gi } else { slope * gi });
                out.push((*x, gx));
            }
            Op::Sigmoid(raw) => {
                let s = node.value.data()[0];
                out.push((*raw, Matrix::scalar(g.data()[0] * s * (1.0 - s))));
            }
            Op::Dropout(x, mask) => {
                out.push((*x, g.zip_map(mask, |gi, m| gi * m)));
            }
            Op::Aggregate {
                input,
                graph,
                mode,
                argmax,
            } => {
                let d = g.cols();
                let mut gx = Matrix::zeros(g.rows(), d);
                match mode {
                    AggregationMode::Sum | AggregationMode::Mean => {
                        for u in 0..graph.num_nodes() {
                            let nbrs = graph.neighbors(u);
                            if nbrs.is_empty() {
                                continue;
                            }
                            let scale = if *mode == AggregationMode::Mean {
                                1.0 / nbrs.len() as f64
                            } else {
                                1.0
                            };
                            for &v in nbrs {
                                axpy(scale, g.row(u), gx.row_mut(v));
                            }
                        }
                    }
                    AggregationMode::Max => {
                        let gd = g.data();
                        let gxd = gx.data_mut();
                        for (i, &src) in argmax.iter().enumerate() {
                            if src != usize::MAX {
                                gxd[src * d + i % d] += gd[i];
                            }
                        }
                    }
                }
                out.push((*input, gx));
            }
            Op::Propagate(x, adj) => {
                let mut gx = Matrix::zeros(g.rows(), g.cols());
                for u in 0..adj.num_nodes() {
                    for (v, w) in adj.row(u) {
                        axpy(w, g.row(u), gx.row_mut(v));
                    }
                }
                out.push((*x, gx));
            }
            Op::Mix {
                neighborhood,
                center,
                beta,
            } => {
                let b = self.value(*beta).data()[0];
                if self.needs(*neighborhood) {
                    out.push((*neighborhood, g.map(|gi| (1.0 - b) * gi)));
                }
                if self.needs(*center) {
                    out.push((*center, g.map(|gi| b * gi)));
                }
                if self.needs(*beta) {
                    let (nv, cv) = (self.value(*neighborhood), self.value(*center));
                    let gb: f64 = g
                        .data()
                        .iter()
                        .zip(nv.data().iter().zip(cv.data()))
                        .map(|(gi, (zn, zc))| gi * (zc - zn))
                        .sum();
                    out.push((*beta, Matrix::scalar(gb)));
                }
            }
            Op::SoftmaxNll {
                logits,
                labels,
                mask,
                probs,
            } => {
                let lv = self.value(*logits);
                let scale = g.data()[0] / mask.len() as f64;
                let mut gl = Matrix::zeros(lv.rows(), lv.cols());
                for (i, &u) in mask.iter().enumerate() {
                    let row = gl.row_mut(u);
                    axpy(scale, probs.row(i), row);
                    row[labels.get(u)] -= scale;
                }
                out.push((*logits, gl));
            }
        }
        Ok(out)
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn path3() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
    }

    fn column(values: &[f64]) -> Matrix {
        Matrix::new(values.len(), 1, values.to_vec()).unwrap()
    }

    fn aggregate(graph: &Graph, x: &Matrix, mode: AggregationMode) -> Matrix {
        let mut tape = Tape::new();
        let xv = tape.leaf(x.clone(), false);
        let out = tape.neighbor_aggregate(graph, xv, mode).unwrap();
        tape.value(out).clone()
    }

    #[test]
    fn path_aggregation_by_hand() {
        let g = path3();
        let x = column(&[1.0, 2.0, 3.0]);
        assert_eq!(aggregate(&g, &x, AggregationMode::Sum).data(), &[2.0, 4.0, 2.0]);
        assert_eq!(aggregate(&g, &x, AggregationMode::Mean).data(), &[2.0, 2.0, 2.0]);
        assert_eq!(aggregate(&g, &x, AggregationMode::Max).data(), &[2.0, 3.0, 2.0]);
    }

    #[test]
    fn isolated_node_gets_zero_row() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        let x = column(&[-1.0, -2.0, 5.0]);
        for mode in AggregationMode::ALL {
            assert_eq!(aggregate(&g, &x, mode).get(2, 0), 0.0, "{mode}");
        }
    }

    #[test]
    fn max_ties_route_to_lowest_neighbor() {
        let g = Graph::from_edges(3, &[(0, 1), (0, 2)]).unwrap();
        let mut tape = Tape::new();
        let x = tape.leaf(column(&[0.0, 4.0, 4.0]), true);
        let agg = tape.neighbor_aggregate(&g, x, AggregationMode::Max).unwrap();
        let w = tape.constant(Matrix::scalar(1.0));
        let s = tape.matmul(agg, w).unwrap();
        // reduce to a scalar through node 0 only
        let picker = tape.constant(Matrix::new(1, 3, vec![1.0, 0.0, 0.0]).unwrap());
        let loss = tape.matmul(picker, s).unwrap();
        tape.backward(loss).unwrap();
        assert_eq!(tape.grad(x).unwrap().data(), &[0.0, 1.0, 0.0]);
        assert_eq!(tape.kink_margin(), 0.0);
        assert_eq!(tape.max_gap(), 0.0);
        assert_eq!(tape.relu_margin(), f64::INFINITY);
    }

    #[test]
    fn leaky_relu_values() {
        let mut tape = Tape::new();
        let x = tape.leaf(column(&[-1.0, 2.0]), false);
        let y = tape.leaky_relu(x, LEAKY_RELU_SLOPE);
        assert_eq!(tape.value(y).data(), &[-0.01, 2.0]);
    }

    #[test]
    fn sigmoid_values() {
        let mut tape = Tape::new();
        let raw = tape.leaf(Matrix::scalar(0.0), false);
        let s = tape.sigmoid_scalar(raw).unwrap();
        assert_eq!(tape.value(s).data(), &[0.5]);
        let mut prev = 0.5;
        for r in [1.0, 5.0, 20.0, 40.0] {
            let v = sigmoid(r);
            assert!(v >= prev && v <= 1.0);
            prev = v;
        }
        assert!(sigmoid(-800.0) >= 0.0 && sigmoid(800.0) <= 1.0);
    }

    #[test]
    fn dropout_identity_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut tape = Tape::new();
        let x = tape.leaf(column(&[1.0, 2.0, 3.0]), true);
        assert_eq!(tape.dropout(x, 0.0, true, &mut rng).unwrap(), x);
        assert_eq!(tape.dropout(x, 0.5, false, &mut rng).unwrap(), x);
        assert!(tape.dropout(x, 1.0, true, &mut rng).is_err());
    }

    #[test]
    fn dropout_preserves_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let mut tape = Tape::new();
        let x = tape.leaf(Matrix::filled(n, 1, 2.0), false);
        let y = tape.dropout(x, 0.3, true, &mut rng).unwrap();
        let mean = tape.value(y).data().iter().sum::<f64>() / n as f64;
        assert!((mean - 2.0).abs() / 2.0 < 0.02, "{mean}");
    }

    #[test]
    fn softmax_nll_uniform_and_confident() {
        let labels = LabelVector::new(vec![0, 3, 4], 5).unwrap();
        let mut tape = Tape::new();
        let logits = tape.leaf(Matrix::filled(3, 5, 0.7), false);
        let loss = tape.softmax_nll(logits, &labels, &[0, 1, 2]).unwrap();
        assert!((tape.value(loss).data()[0] - 5f64.ln()).abs() < 1e-12);

        let mut confident = Matrix::zeros(3, 5);
        for u in 0..3 {
            confident.set(u, labels.get(u), 1000.0);
        }
        let logits = tape.leaf(confident, false);
        let loss = tape.softmax_nll(logits, &labels, &[0, 1, 2]).unwrap();
        assert!(tape.value(loss).data()[0].abs() < 1e-12);
    }

    #[test]
    fn softmax_nll_rejects_empty_mask() {
        let labels = LabelVector::new(vec![0, 1], 2).unwrap();
        let mut tape = Tape::new();
        let logits = tape.leaf(Matrix::zeros(2, 2), false);
        assert!(matches!(
            tape.softmax_nll(logits, &labels, &[]),
            Err(Error::EmptyMask)
        ));
    }

    #[test]
    fn shape_errors_are_reported() {
        let g = path3();
        let mut tape = Tape::new();
        let a = tape.leaf(Matrix::zeros(2, 3), true);
        let b = tape.leaf(Matrix::zeros(2, 3), true);
        assert!(tape.matmul(a, b).is_err());
        assert!(tape.add_row_bias(a, b).is_err());
        assert!(tape.neighbor_aggregate(&g, a, AggregationMode::Sum).is_err());
        assert!(tape.sigmoid_scalar(a).is_err());
    }

    #[test]
    fn mix_endpoints() {
        let mut tape = Tape::new();
        let n = tape.leaf(column(&[1.0, 2.0]), false);
        let c = tape.leaf(column(&[5.0, -3.0]), false);
        let one = tape.constant(Matrix::scalar(1.0));
        let zero = tape.constant(Matrix::scalar(0.0));
        let m1 = tape.mix(n, c, one).unwrap();
        let m0 = tape.mix(n, c, zero).unwrap();
        assert_eq!(tape.value(m1).data(), &[5.0, -3.0]);
        assert_eq!(tape.value(m0).data(), &[1.0, 2.0]);
    }
}
