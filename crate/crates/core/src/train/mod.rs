//! Truncated-BPTT training with SGD, global-norm clipping and step decay;
//! perplexity evaluation; binary checkpoints.

mod checkpoint;
mod config;
mod eval;

use rand::seq::SliceRandom;
use thiserror::Error;

use crate::config::ConfigError;
use crate::corpus::Corpus;
use crate::model::{sentence_io, Graph, LstmState, ModelConfig, ModelError, ModelParams};
use crate::numerics::{NumericsError, SeedStream, Tensor};
use crate::vocab::{VocabBundle, WordFeatures};

pub use checkpoint::{Checkpoint, CheckpointError, FORMAT_VERSION, MAGIC};
pub use config::{TrainConfig, TRAIN_KEYS};
pub use eval::{perplexity, Perplexity, SentenceScorer};

/// Offset mixed into the seed for the shuffling stream so it never shares
/// draws with parameter initialization.
const SHUFFLE_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("training corpus has no usable sentences")]
    EmptyCorpus,
    #[error("loss became non-finite in epoch {epoch} at update {update}")]
    Diverged {
        epoch: usize,
        update: usize,
        /// Parameters before the failing update.
        last_good: Box<ModelParams>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub lr: f64,
    /// Mean per-token NLL over the epoch's updates.
    pub train_nll: f64,
    pub valid_ppl: Option<f64>,
}

impl EpochMetrics {
    /// `epoch<TAB>train_nll<TAB>valid_ppl`
    pub fn tsv_line(&self) -> String {
        format!(
            "{}\t{:.6}\t{:.6}",
            self.epoch,
            self.train_nll,
            self.valid_ppl.unwrap_or(f64::NAN)
        )
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: ModelParams,
    pub metrics: Vec<EpochMetrics>,
    /// Empty sentences left out of training.
    pub skipped: usize,
}

/// Encodes every sentence of `corpus` against `bundle`.
pub fn encode_corpus(corpus: &Corpus, bundle: &VocabBundle, config: &ModelConfig) -> Vec<Vec<WordFeatures>> {
    corpus
        .sentences
        .iter()
        .map(|s| {
            s.words
                .iter()
                .map(|w| bundle.encode(w, config.max_syllables, config.max_jamo))
                .collect()
        })
        .collect()
}

/// Scales `grads` so their global L2 norm is at most `max_norm`. Returns
/// the norm before clipping.
pub fn clip_gradients(grads: &mut [Tensor], max_norm: f64) -> f64 {
    let norm = grads.iter().map(Tensor::sq_norm).sum::<f64>().sqrt();
    if norm > max_norm {
        let s = max_norm / norm;
        for g in grads.iter_mut() {
            g.scale(s);
        }
    }
    norm
}

/// Runs one sentence window by window, carrying the LSTM state and adding
/// the summed-loss gradients onto `acc`. Returns the summed NLL.
pub fn sentence_gradients(
    params: &ModelParams,
    words: &[WordFeatures],
    bptt_len: usize,
    acc: &mut [Tensor],
) -> Result<f64, ModelError> {
    if words.is_empty() {
        return Err(ModelError::EmptySentence);
    }
    let cfg = params.config();
    let (inputs, targets) = sentence_io(words, cfg.max_syllables, cfg.max_jamo);
    let mut state = LstmState::zeros(cfg.lstm_hidden);
    let mut nll = 0.0;
    for start in (0..inputs.len()).step_by(bptt_len) {
        let end = (start + bptt_len).min(inputs.len());
        let mut graph = Graph::new(params);
        let out = graph.window(&inputs[start..end], &targets[start..end], &state)?;
        nll += graph.value(out.loss).item();
        let grads = graph.tape.backward(out.loss)?;
        graph.accumulate_grads(grads, acc);
        state = graph.state_value(out.state);
    }
    Ok(nll)
}

fn is_non_finite(e: &ModelError) -> bool {
    matches!(e, ModelError::Numerics(NumericsError::NonFinite(_)))
}

/// Trains a freshly initialized model.
pub fn train(
    model_config: &ModelConfig,
    config: &TrainConfig,
    train_set: &[Vec<WordFeatures>],
    valid_set: &[Vec<WordFeatures>],
    on_epoch: impl FnMut(&EpochMetrics),
) -> Result<TrainOutcome, TrainError> {
    config.validate()?;
    let params = ModelParams::init(model_config, config.seed)?;
    train_from(params, config, train_set, valid_set, on_epoch)
}

/// Continues training `params`. Each epoch visits the sentences in a
/// seeded shuffle, batch by batch; every batch yields one update from the
/// per-sentence summed loss averaged over the batch.
pub fn train_from(
    mut params: ModelParams,
    config: &TrainConfig,
    train_set: &[Vec<WordFeatures>],
    valid_set: &[Vec<WordFeatures>],
    mut on_epoch: impl FnMut(&EpochMetrics),
) -> Result<TrainOutcome, TrainError> {
    config.validate()?;
    let usable: Vec<&Vec<WordFeatures>> = train_set.iter().filter(|s| !s.is_empty()).collect();
    let skipped = train_set.len() - usable.len();
    if usable.is_empty() {
        return Err(TrainError::EmptyCorpus);
    }
    let mut shuffler = SeedStream::new(config.seed ^ SHUFFLE_STREAM).split();
    let mut order: Vec<usize> = (0..usable.len()).collect();
    let mut acc: Vec<Tensor> = params.tensors().iter().map(|t| Tensor::zeros(t.shape())).collect();
    let mut metrics = Vec::with_capacity(config.epochs);

    for epoch in 1..=config.epochs {
        let lr = config.lr_at(epoch);
        order.shuffle(&mut shuffler);
        let (mut epoch_nll, mut epoch_tokens) = (0.0, 0usize);
        for (update, batch) in order.chunks(config.batch_size).enumerate() {
            for a in acc.iter_mut() {
                a.fill(0.0);
            }
            let diverged = |params: &ModelParams| TrainError::Diverged {
                epoch,
                update,
                last_good: Box::new(params.clone()),
            };
            let mut batch_nll = 0.0;
            let mut tokens = 0;
            for &i in batch {
                match sentence_gradients(&params, usable[i], config.bptt_len, &mut acc) {
                    Ok(nll) => batch_nll += nll,
                    Err(e) if is_non_finite(&e) => return Err(diverged(&params)),
                    Err(e) => return Err(e.into()),
                }
                tokens += usable[i].len() + 1;
            }
            if !batch_nll.is_finite() || acc.iter().any(|g| !g.is_finite()) {
                return Err(diverged(&params));
            }
            let inv = 1.0 / batch.len() as f64;
            for a in acc.iter_mut() {
                a.scale(inv);
            }
            clip_gradients(&mut acc, config.clip_norm);
            // Checkpoints store f32, so leaving its range counts as divergence.
            let overflows = params
                .tensors()
                .iter()
                .zip(&acc)
                .any(|(p, g)| p.data().iter().zip(g.data()).any(|(x, d)| !((x - lr * d).abs() <= f32::MAX as f64)));
            if overflows {
                return Err(diverged(&params));
            }
            for (p, g) in params.tensors_mut().iter_mut().zip(&acc) {
                p.add_scaled(g, -lr);
            }
            epoch_nll += batch_nll;
            epoch_tokens += tokens;
        }
        let valid_ppl = if valid_set.iter().any(|s| !s.is_empty()) {
            Some(perplexity(&params, valid_set)?.value())
        } else {
            None
        };
        let m = EpochMetrics {
            epoch,
            lr,
            train_nll: epoch_nll / epoch_tokens as f64,
            valid_ppl,
        };
        on_epoch(&m);
        metrics.push(m);
    }
    Ok(TrainOutcome {
        params,
        metrics,
        skipped,
    })
}

#[cfg(test)]
mod tests;
