//! Small dense networks with hand-written gradients, Huber loss, Adam and
//! Polyak target updates. Everything is `f64`.

mod checkpoint;
mod loss;
mod mlp;
mod optim;

pub use checkpoint::{load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint};
pub use loss::huber_loss;
pub use mlp::{GradientSet, Head, LayerGrad, Mlp, Trace};
pub use optim::{soft_update, Adam, AdamConfig};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NeuralError {
    #[error("input has {got} values, network expects {expected}")]
    InputDim { expected: usize, got: usize },
    #[error("upstream gradient has {got} values, network outputs {expected}")]
    OutputDim { expected: usize, got: usize },
    #[error("architecture mismatch: {0}")]
    Shape(String),
    #[error("forward trace was not produced by this network")]
    TraceMismatch,
    #[error("bad layer dimensions {0:?}")]
    BadDims(Vec<usize>),
    #[error("checkpoint line {line}: {msg}")]
    Checkpoint { line: usize, msg: String },
}
