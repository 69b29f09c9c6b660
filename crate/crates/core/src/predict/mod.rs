//! Context-conditioned word completion, the keystroke-savings simulator and
//! a line-oriented completion REPL.

mod kss;
mod scripted;

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::hangul::{keystrokes, split_words, Word};
use crate::model::{step, LstmState, ModelError, ModelParams, VocabSizes};
use crate::numerics::Tensor;
use crate::vocab::{VocabBundle, Vocabulary, WordFeatures};

pub use kss::{kss_evaluate, KssOptions, KssReport, SentenceKss};
pub use scripted::{ScriptRule, ScriptedPredictor};

#[derive(Debug, Error)]
pub enum PredictError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("vocabularies do not fit the model: {0}")]
    Mismatch(String),
    #[error("script line {line}: {msg}")]
    Script { line: usize, msg: String },
    #[error("corpus has no sentences")]
    EmptyCorpus,
}

/// Source of suggestion lists for the typing simulator.
pub trait Predictor {
    type Context: Clone;

    /// Context at the start of the sentence on corpus line `line`.
    fn start(&self, line: usize) -> Result<Self::Context, PredictError>;

    /// Context after `word` has been committed.
    fn advance(&self, ctx: &Self::Context, word: &Word) -> Result<Self::Context, PredictError>;

    /// Up to `n` suggested words given the keys typed so far.
    fn suggest(&self, ctx: &Self::Context, typed: &[char], n: usize) -> Vec<String>;
}

/// Never suggests anything.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroPredictor;

impl Predictor for ZeroPredictor {
    type Context = ();

    fn start(&self, _line: usize) -> Result<(), PredictError> {
        Ok(())
    }

    fn advance(&self, _ctx: &(), _word: &Word) -> Result<(), PredictError> {
        Ok(())
    }

    fn suggest(&self, _ctx: &(), _typed: &[char], _n: usize) -> Vec<String> {
        Vec::new()
    }
}

/// LSTM state after the words seen so far plus the next-word distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionContext {
    pub state: LstmState,
    pub log_probs: Tensor,
    /// Words committed since BOS.
    pub words: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub word: String,
    pub id: u32,
    pub log_prob: f64,
}

/// A trained model bound to its vocabularies.
pub struct ModelPredictor<'a> {
    params: &'a ModelParams,
    bundle: &'a VocabBundle,
    /// Key expansion of every word id.
    keys: Vec<Vec<char>>,
}

impl<'a> ModelPredictor<'a> {
    pub fn new(params: &'a ModelParams, bundle: &'a VocabBundle) -> Result<Self, PredictError> {
        let have = VocabSizes::of(&bundle.vocabs);
        if have != params.config().vocab {
            return Err(PredictError::Mismatch(format!(
                "model expects {:?}, vocabularies have {:?}",
                params.config().vocab,
                have
            )));
        }
        let keys = bundle
            .vocabs
            .word
            .entries()
            .iter()
            .map(|(s, _)| keystrokes(s))
            .collect();
        Ok(ModelPredictor { params, bundle, keys })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.bundle.vocabs.word
    }

    fn feed(&self, state: &LstmState, input: &WordFeatures, words: usize) -> Result<PredictionContext, PredictError> {
        let (state, log_probs) = step(self.params, state, input)?;
        Ok(PredictionContext { state, log_probs, words })
    }

    /// Context after BOS.
    pub fn begin(&self) -> Result<PredictionContext, PredictError> {
        let cfg = self.params.config();
        let bos = WordFeatures::bos(cfg.max_syllables, cfg.max_jamo);
        self.feed(&LstmState::zeros(cfg.lstm_hidden), &bos, 0)
    }

    pub fn push(&self, ctx: &PredictionContext, word: &Word) -> Result<PredictionContext, PredictError> {
        let cfg = self.params.config();
        let f = self.bundle.encode(word, cfg.max_syllables, cfg.max_jamo);
        self.feed(&ctx.state, &f, ctx.words + 1)
    }

    /// Context after BOS and each word of `text`.
    pub fn context_for(&self, text: &str) -> Result<PredictionContext, PredictError> {
        let mut ctx = self.begin()?;
        for w in split_words(text) {
            ctx = self.push(&ctx, &w)?;
        }
        Ok(ctx)
    }

    pub fn next_word_dist<'c>(&self, ctx: &'c PredictionContext) -> &'c Tensor {
        &ctx.log_probs
    }

    /// Words whose key expansion starts with `typed`, most probable first,
    /// ties by id. Reserved entries never appear.
    pub fn complete_keys(&self, ctx: &PredictionContext, typed: &[char], n: usize) -> Vec<Candidate> {
        let lp = ctx.log_probs.data();
        let mut cands: Vec<(u32, f64)> = self
            .keys
            .iter()
            .enumerate()
            .filter(|(id, k)| !Vocabulary::is_special(*id as u32) && k.starts_with(typed))
            .map(|(id, _)| (id as u32, lp[id]))
            .collect();
        cands.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        cands.truncate(n);
        cands
            .into_iter()
            .map(|(id, log_prob)| Candidate {
                word: self.vocab().surface(id).unwrap_or_default().to_string(),
                id,
                log_prob,
            })
            .collect()
    }

    /// [`Self::complete_keys`] on the key expansion of a partially typed
    /// word, so an incomplete syllable still matches.
    pub fn complete(&self, ctx: &PredictionContext, typed_prefix: &str, n: usize) -> Vec<Candidate> {
        self.complete_keys(ctx, &keystrokes(typed_prefix), n)
    }
}

impl Predictor for ModelPredictor<'_> {
    type Context = PredictionContext;

    fn start(&self, _line: usize) -> Result<PredictionContext, PredictError> {
        self.begin()
    }

    fn advance(&self, ctx: &PredictionContext, word: &Word) -> Result<PredictionContext, PredictError> {
        self.push(ctx, word)
    }

    fn suggest(&self, ctx: &PredictionContext, typed: &[char], n: usize) -> Vec<String> {
        self.complete_keys(ctx, typed, n).into_iter().map(|c| c.word).collect()
    }
}

/// Reads lines in progress and prints the top `n` completions of the last,
/// unfinished word given the finished words before it. A line ending in
/// whitespace asks for the next word. Stops at end of input.
pub fn repl<R: BufRead, W: Write>(
    predictor: &ModelPredictor<'_>,
    input: R,
    mut output: W,
    n: usize,
) -> Result<(), ReplError> {
    for line in input.lines() {
        let line = line?;
        let (context, prefix) = match line.rfind(char::is_whitespace) {
            _ if line.is_empty() || line.ends_with(char::is_whitespace) => (line.as_str(), ""),
            Some(p) => line.split_at(p),
            None => ("", line.as_str()),
        };
        let ctx = predictor.context_for(context)?;
        let words: Vec<String> = predictor
            .complete(&ctx, prefix.trim(), n)
            .into_iter()
            .map(|c| c.word)
            .collect();
        writeln!(output, "{}", words.join("\t"))?;
        output.flush()?;
    }
    Ok(())
}

#[derive(Debug, Error)]
pub enum ReplError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Predict(#[from] PredictError),
}
