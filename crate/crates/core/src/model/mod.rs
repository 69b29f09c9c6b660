//! The language model: per-word embedding (syllable CNN and/or morpheme
//! triple, or the word/jamo baselines) → highway → single-layer LSTM →
//! frequency-banded low-rank softmax over the word vocabulary.

mod config;
mod forward;
mod params;

use thiserror::Error;

use crate::config::ConfigError;
use crate::numerics::NumericsError;
use crate::vocab::VocabError;

pub use config::{EmbeddingMode, FilterSpec, HighwayCarry, ModelConfig, VocabSizes, MODEL_KEYS};
pub use forward::{
    forward_sentence, sentence_io, step, Graph, LstmState, SentenceForward, StateVars, WindowOut,
};
pub use params::{
    full_softmax_count, param_breakdown, param_count, tensor_specs, BandIdx, ConvIdx,
    HighwayIdx, Layout, ModelParams, ParamBreakdown, TensorSpec, FORGET_BIAS, INIT_SCALE,
};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Vocab(#[from] VocabError),
    #[error("parameter layout: {0}")]
    Layout(String),
    #[error("empty sentence")]
    EmptySentence,
}

#[cfg(test)]
mod tests;
