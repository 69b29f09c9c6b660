use crate::numerics::{Gradients, Tape, Tensor, Var};
use crate::vocab::{WordFeatures, BOS, EOS};

use super::{EmbeddingMode, HighwayCarry, ModelError, ModelParams};

/// Recurrent state carried between words of a sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmState {
    pub h: Tensor,
    pub c: Tensor,
}

impl LstmState {
    pub fn zeros(hidden: usize) -> Self {
        LstmState {
            h: Tensor::zeros(&[hidden]),
            c: Tensor::zeros(&[hidden]),
        }
    }
}

/// LSTM state as tape variables.
#[derive(Debug, Clone, Copy)]
pub struct StateVars {
    pub h: Var,
    pub c: Var,
}

/// Result of running a window of steps.
#[derive(Debug)]
pub struct WindowOut {
    /// Sum of per-step negative log-likelihoods.
    pub loss: Var,
    pub log_probs: Vec<Var>,
    pub state: StateVars,
}

/// A tape with every model parameter bound as a leaf.
pub struct Graph<'a> {
    pub tape: Tape<'a>,
    params: &'a ModelParams,
    vars: Vec<Var>,
}

impl<'a> Graph<'a> {
    pub fn new(params: &'a ModelParams) -> Self {
        let mut tape = Tape::new();
        let vars = params.tensors().iter().map(|t| tape.param(t)).collect();
        Graph { tape, params, vars }
    }

    pub fn param_var(&self, index: usize) -> Var {
        self.vars[index]
    }

    pub fn value(&self, v: Var) -> &Tensor {
        self.tape.value(v)
    }

    /// Gradients for every parameter tensor, zero where unused.
    pub fn param_grads(&self, mut grads: Gradients) -> Vec<Tensor> {
        self.vars
            .iter()
            .zip(self.params.tensors())
            .map(|(v, t)| grads.take(*v).unwrap_or_else(|| Tensor::zeros(t.shape())))
            .collect()
    }

    /// Adds each parameter gradient present in `grads` onto `acc`.
    pub fn accumulate_grads(&self, mut grads: Gradients, acc: &mut [Tensor]) {
        for (v, a) in self.vars.iter().zip(acc.iter_mut()) {
            if let Some(g) = grads.take(*v) {
                a.add_scaled(&g, 1.0);
            }
        }
    }

    fn conv_stack(
        &mut self,
        table: usize,
        convs: &[super::params::ConvIdx],
        ids: &[u32],
    ) -> Result<Var, ModelError> {
        let rows: Vec<usize> = ids.iter().map(|&i| i as usize).collect();
        let seq = self.tape.gather(self.vars[table], &rows)?;
        let mut pooled = Vec::with_capacity(convs.len());
        for conv in convs {
            let out = self
                .tape
                .conv1d(seq, self.vars[conv.filters], self.vars[conv.bias])?;
            let act = self.tape.tanh(out)?;
            pooled.push(self.tape.max_over_time(act)?);
        }
        Ok(self.tape.concat(&pooled)?)
    }

    /// Syllable CNN: lookup, per-width convolution, tanh, max over time,
    /// concatenation of all filter groups.
    pub fn embed_syllables(&mut self, features: &WordFeatures) -> Result<Var, ModelError> {
        let layout = self.params.layout();
        let table = layout
            .syllable_emb
            .ok_or_else(|| ModelError::Layout("model has no syllable embedding".into()))?;
        self.conv_stack(table, &layout.syllable_conv, &features.syllable_ids)
    }

    /// Jamo CNN for the character-level mode.
    pub fn embed_jamo(&mut self, features: &WordFeatures) -> Result<Var, ModelError> {
        let layout = self.params.layout();
        let table = layout
            .jamo_emb
            .ok_or_else(|| ModelError::Layout("model has no jamo embedding".into()))?;
        self.conv_stack(table, &layout.jamo_conv, &features.jamo_ids)
    }

    /// Concatenated start, middle and end morpheme embeddings.
    pub fn embed_morphs(&mut self, features: &WordFeatures) -> Result<Var, ModelError> {
        let table = self
            .params
            .layout()
            .morph_emb
            .ok_or_else(|| ModelError::Layout("model has no morpheme embedding".into()))?;
        let rows = features.morphs.ids().map(|i| i as usize);
        let stacked = self.tape.gather(self.vars[table], &rows)?;
        let width = 3 * self.params.config().morph_emb_dim;
        Ok(self.tape.reshape(stacked, &[width])?)
    }

    pub fn embed_word(&mut self, features: &WordFeatures) -> Result<Var, ModelError> {
        let table = self
            .params
            .layout()
            .word_emb
            .ok_or_else(|| ModelError::Layout("model has no word embedding".into()))?;
        let row = self.tape.gather(self.vars[table], &[features.word_id as usize])?;
        let width = self.params.config().word_emb_dim;
        Ok(self.tape.reshape(row, &[width])?)
    }

    /// Input representation for the configured embedding mode.
    pub fn embed(&mut self, features: &WordFeatures) -> Result<Var, ModelError> {
        match self.params.config().embedding_mode {
            EmbeddingMode::Word => self.embed_word(features),
            EmbeddingMode::Morph => self.embed_morphs(features),
            EmbeddingMode::Char => self.embed_jamo(features),
            EmbeddingMode::Syllable => self.embed_syllables(features),
            EmbeddingMode::SyllableMorph => {
                let s = self.embed_syllables(features)?;
                let m = self.embed_morphs(features)?;
                Ok(self.tape.concat(&[s, m])?)
            }
        }
    }

    fn affine(&mut self, x: Var, w: usize, b: usize) -> Result<Var, ModelError> {
        let xw = self.tape.matmul(x, self.vars[w])?;
        Ok(self.tape.add_bias(xw, self.vars[b])?)
    }

    /// One highway layer: `T = σ(x·W_T + b_T)`, `H = tanh(x·W_H + b_H)`,
    /// output `T⊙H + C⊙x` where `C = 1 - T` unless the carry gate is
    /// independent.
    pub fn highway_layer(&mut self, layer: usize, x: Var) -> Result<Var, ModelError> {
        let idx = self.params.layout().highway[layer];
        let t_pre = self.affine(x, idx.transform_w, idx.transform_b)?;
        let t = self.tape.sigmoid(t_pre)?;
        let h_pre = self.affine(x, idx.hidden_w, idx.hidden_b)?;
        let h = self.tape.tanh(h_pre)?;
        match (self.params.config().highway_carry, idx.carry) {
            (HighwayCarry::Independent, Some((cw, cb))) => {
                let c_pre = self.affine(x, cw, cb)?;
                let c = self.tape.sigmoid(c_pre)?;
                let th = self.tape.mul(t, h)?;
                let cx = self.tape.mul(c, x)?;
                Ok(self.tape.add(th, cx)?)
            }
            _ => {
                // x + T⊙(H - x) == T⊙H + (1 - T)⊙x
                let diff = self.tape.sub(h, x)?;
                let gated = self.tape.mul(t, diff)?;
                Ok(self.tape.add(x, gated)?)
            }
        }
    }

    pub fn highway(&mut self, mut x: Var) -> Result<Var, ModelError> {
        for layer in 0..self.params.config().highway_layers {
            x = self.highway_layer(layer, x)?;
        }
        Ok(x)
    }

    /// Standard LSTM step with gate blocks ordered input, forget, candidate,
    /// output.
    pub fn lstm_step(&mut self, state: StateVars, x: Var) -> Result<StateVars, ModelError> {
        let layout = self.params.layout();
        let (wi, wr, b) = (layout.lstm_input, layout.lstm_recurrent, layout.lstm_bias);
        let h = self.params.config().lstm_hidden;
        let xw = self.tape.matmul(x, self.vars[wi])?;
        let hw = self.tape.matmul(state.h, self.vars[wr])?;
        let sum = self.tape.add(xw, hw)?;
        let z = self.tape.add_bias(sum, self.vars[b])?;
        let block = |tape: &mut Tape<'a>, k: usize| tape.slice(z, k * h, h);
        let i_pre = block(&mut self.tape, 0)?;
        let f_pre = block(&mut self.tape, 1)?;
        let g_pre = block(&mut self.tape, 2)?;
        let o_pre = block(&mut self.tape, 3)?;
        let i = self.tape.sigmoid(i_pre)?;
        let f = self.tape.sigmoid(f_pre)?;
        let g = self.tape.tanh(g_pre)?;
        let o = self.tape.sigmoid(o_pre)?;
        let keep = self.tape.mul(f, state.c)?;
        let write = self.tape.mul(i, g)?;
        let c = self.tape.add(keep, write)?;
        let c_act = self.tape.tanh(c)?;
        let h_new = self.tape.mul(o, c_act)?;
        Ok(StateVars { h: h_new, c })
    }

    /// Banded low-rank output layer: per band `(h·A_b)·B_b + bias_b`, all
    /// bands concatenated in id order, one log-softmax over the vocabulary.
    pub fn dsoftmax_log_probs(&mut self, h: Var) -> Result<Var, ModelError> {
        let mut logits = Vec::with_capacity(self.params.layout().bands.len());
        for band in self.params.layout().bands.clone() {
            let low = self.tape.matmul(h, self.vars[band.a])?;
            let full = self.tape.matmul(low, self.vars[band.b])?;
            logits.push(self.tape.add_bias(full, self.vars[band.bias])?);
        }
        let all = self.tape.concat(&logits)?;
        Ok(self.tape.log_softmax(all)?)
    }

    pub fn state_constant(&mut self, state: &LstmState) -> StateVars {
        StateVars {
            h: self.tape.constant(state.h.clone()),
            c: self.tape.constant(state.c.clone()),
        }
    }

    pub fn state_value(&self, state: StateVars) -> LstmState {
        LstmState {
            h: self.value(state.h).clone(),
            c: self.value(state.c).clone(),
        }
    }

    /// Embeds, gates and feeds one word; returns the new state and the
    /// next-word log-probabilities.
    pub fn step(&mut self, state: StateVars, input: &WordFeatures) -> Result<(StateVars, Var), ModelError> {
        let e = self.embed(input)?;
        let x = self.highway(e)?;
        let next = self.lstm_step(state, x)?;
        let lp = self.dsoftmax_log_probs(next.h)?;
        Ok((next, lp))
    }

    /// Teacher-forced run over `inputs`, scoring `targets[t]` after
    /// `inputs[t]`.
    pub fn window(
        &mut self,
        inputs: &[WordFeatures],
        targets: &[u32],
        init: &LstmState,
    ) -> Result<WindowOut, ModelError> {
        if inputs.is_empty() || inputs.len() != targets.len() {
            return Err(ModelError::Layout(format!(
                "window needs matching non-empty inputs and targets ({} vs {})",
                inputs.len(),
                targets.len()
            )));
        }
        let mut state = self.state_constant(init);
        let mut nlls = Vec::with_capacity(inputs.len());
        let mut log_probs = Vec::with_capacity(inputs.len());
        for (input, &target) in inputs.iter().zip(targets) {
            let (next, lp) = self.step(state, input)?;
            nlls.push(self.tape.nll(lp, target as usize)?);
            log_probs.push(lp);
            state = next;
        }
        let loss = self.tape.add_n(&nlls)?;
        Ok(WindowOut {
            loss,
            log_probs,
            state,
        })
    }
}

/// Teacher-forced sentence pass.
#[derive(Debug, Clone)]
pub struct SentenceForward {
    /// One distribution per prediction target (words then EOS).
    pub log_probs: Vec<Tensor>,
    pub nll: f64,
}

/// Wraps `words` as BOS w1..wn EOS; the model reads BOS..wn and predicts
/// w1..EOS, starting from a zero state.
pub fn sentence_io(words: &[WordFeatures], max_syllables: usize, max_jamo: usize) -> (Vec<WordFeatures>, Vec<u32>) {
    let mut inputs = Vec::with_capacity(words.len() + 1);
    inputs.push(WordFeatures::bos(max_syllables, max_jamo));
    inputs.extend(words.iter().cloned());
    let mut targets: Vec<u32> = words.iter().map(|w| w.word_id).collect();
    targets.push(EOS);
    debug_assert_ne!(inputs[0].word_id, EOS);
    debug_assert_eq!(inputs[0].word_id, BOS);
    (inputs, targets)
}

pub fn forward_sentence(params: &ModelParams, words: &[WordFeatures]) -> Result<SentenceForward, ModelError> {
    if words.is_empty() {
        return Err(ModelError::EmptySentence);
    }
    let cfg = params.config();
    let (inputs, targets) = sentence_io(words, cfg.max_syllables, cfg.max_jamo);
    let mut graph = Graph::new(params);
    let out = graph.window(&inputs, &targets, &LstmState::zeros(cfg.lstm_hidden))?;
    Ok(SentenceForward {
        log_probs: out.log_probs.iter().map(|v| graph.value(*v).clone()).collect(),
        nll: graph.value(out.loss).item(),
    })
}

/// Single inference step outside any training graph.
pub fn step(params: &ModelParams, state: &LstmState, input: &WordFeatures) -> Result<(LstmState, Tensor), ModelError> {
    let mut graph = Graph::new(params);
    let s = graph.state_constant(state);
    let (next, lp) = graph.step(s, input)?;
    Ok((graph.state_value(next), graph.value(lp).clone()))
}
