//! Dense tensors, a reverse-mode autodiff tape and the seeded generator
//! used for parameter initialization.

mod rng;
mod tape;
mod tensor;

use thiserror::Error;

pub use rng::{fill_uniform, SeedStream, PRNG_ID};
pub use tape::{log_softmax, sigmoid, Gradients, Tape, Var};
pub use tensor::Tensor;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("index {index} out of range for length {len}")]
    Index { index: usize, len: usize },
    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),
}
