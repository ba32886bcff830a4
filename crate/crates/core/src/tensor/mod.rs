//! Dense matrices and a small reverse-mode differentiation engine.
//!
//! Computations are recorded on a [`Tape`] as they run; [`Tape::backward`]
//! then walks the record in reverse and accumulates gradients into every node
//! that requires them. The op set is exactly what the models in this crate
//! need: matrix products, bias broadcast, LeakyReLU, scalar sigmoid, dropout,
//! neighbor aggregation over a [`Graph`](crate::graph::Graph), propagation by
//! a normalized adjacency, the convex mix used by GCNH layers, and a masked
//! softmax cross-entropy.

mod gradcheck;
mod matrix;
mod optim;
mod tape;

pub use gradcheck::{finite_diff_check, relative_error, GradCheckReport, Objective};
pub use matrix::Matrix;
pub use optim::{AdamConfig, AdamState};
pub use tape::{sigmoid, AggregationMode, Tape, Var, LEAKY_RELU_SLOPE};
