use crate::numerics::{fill_uniform, SeedStream, Tensor};
use crate::vocab::band_partition;

use super::{EmbeddingMode, HighwayCarry, ModelConfig, ModelError};

pub const INIT_SCALE: f64 = 0.05;
pub const FORGET_BIAS: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Init {
    Uniform,
    Zero,
    /// Zero except the forget-gate quarter, which starts at [`FORGET_BIAS`].
    LstmBias,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorSpec {
    pub name: String,
    pub shape: Vec<usize>,
    init: Init,
}

impl TensorSpec {
    fn new(name: String, shape: Vec<usize>, init: Init) -> Self {
        TensorSpec { name, shape, init }
    }

    pub fn size(&self) -> usize {
        self.shape.iter().product()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvIdx {
    pub width: usize,
    pub filters: usize,
    pub bias: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HighwayIdx {
    pub transform_w: usize,
    pub transform_b: usize,
    pub hidden_w: usize,
    pub hidden_b: usize,
    pub carry: Option<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BandIdx {
    pub start: usize,
    pub len: usize,
    pub rank: usize,
    pub a: usize,
    pub b: usize,
    pub bias: usize,
}

/// Positions of each role inside the flat tensor list.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Layout {
    pub syllable_emb: Option<usize>,
    pub syllable_conv: Vec<ConvIdx>,
    pub jamo_emb: Option<usize>,
    pub jamo_conv: Vec<ConvIdx>,
    pub morph_emb: Option<usize>,
    pub word_emb: Option<usize>,
    pub highway: Vec<HighwayIdx>,
    pub lstm_input: usize,
    pub lstm_recurrent: usize,
    pub lstm_bias: usize,
    pub bands: Vec<BandIdx>,
}

/// Tensor names, shapes and role layout implied by `config`.
pub fn tensor_specs(config: &ModelConfig) -> Result<(Vec<TensorSpec>, Layout), ModelError> {
    config.validate()?;
    let mut specs = Vec::new();
    let mut layout = Layout::default();
    let push = |specs: &mut Vec<TensorSpec>, name: String, shape: Vec<usize>, init| {
        specs.push(TensorSpec::new(name, shape, init));
        specs.len() - 1
    };
    let mode = config.embedding_mode;
    if mode.uses_syllables() {
        let d = config.syll_emb_dim;
        layout.syllable_emb = Some(push(
            &mut specs,
            "syllable.embedding".into(),
            vec![config.vocab.syllable, d],
            Init::Uniform,
        ));
        for (i, &(w, c)) in config.filters.0.iter().enumerate() {
            let filters = push(&mut specs, format!("syllable.conv{i}.filters"), vec![w, d, c], Init::Uniform);
            let bias = push(&mut specs, format!("syllable.conv{i}.bias"), vec![c], Init::Zero);
            layout.syllable_conv.push(ConvIdx { width: w, filters, bias });
        }
    }
    if mode == EmbeddingMode::Char {
        let d = config.char_emb_dim;
        layout.jamo_emb = Some(push(
            &mut specs,
            "jamo.embedding".into(),
            vec![config.vocab.jamo, d],
            Init::Uniform,
        ));
        for (i, &(w, c)) in config.char_filters.0.iter().enumerate() {
            let filters = push(&mut specs, format!("jamo.conv{i}.filters"), vec![w, d, c], Init::Uniform);
            let bias = push(&mut specs, format!("jamo.conv{i}.bias"), vec![c], Init::Zero);
            layout.jamo_conv.push(ConvIdx { width: w, filters, bias });
        }
    }
    if mode.uses_morphs() {
        layout.morph_emb = Some(push(
            &mut specs,
            "morph.embedding".into(),
            vec![config.vocab.morph, config.morph_emb_dim],
            Init::Uniform,
        ));
    }
    if mode == EmbeddingMode::Word {
        layout.word_emb = Some(push(
            &mut specs,
            "word.embedding".into(),
            vec![config.vocab.word, config.word_emb_dim],
            Init::Uniform,
        ));
    }
    let d = config.input_width();
    for l in 0..config.highway_layers {
        let mut pair = |part: &str| {
            (
                push(&mut specs, format!("highway{l}.{part}.weight"), vec![d, d], Init::Uniform),
                push(&mut specs, format!("highway{l}.{part}.bias"), vec![d], Init::Zero),
            )
        };
        let (transform_w, transform_b) = pair("transform");
        let (hidden_w, hidden_b) = pair("hidden");
        let carry = match config.highway_carry {
            HighwayCarry::Coupled => None,
            HighwayCarry::Independent => Some(pair("carry")),
        };
        layout.highway.push(HighwayIdx {
            transform_w,
            transform_b,
            hidden_w,
            hidden_b,
            carry,
        });
    }
    let h = config.lstm_hidden;
    layout.lstm_input = push(&mut specs, "lstm.input.weight".into(), vec![d, 4 * h], Init::Uniform);
    layout.lstm_recurrent = push(&mut specs, "lstm.recurrent.weight".into(), vec![h, 4 * h], Init::Uniform);
    layout.lstm_bias = push(&mut specs, "lstm.bias".into(), vec![4 * h], Init::LstmBias);
    for (b, band) in band_partition(config.vocab.word, &config.bands)?.into_iter().enumerate() {
        let r = band.rank;
        let n = band.len();
        let a = push(&mut specs, format!("softmax.band{b}.a"), vec![h, r], Init::Uniform);
        let bm = push(&mut specs, format!("softmax.band{b}.b"), vec![r, n], Init::Uniform);
        let bias = push(&mut specs, format!("softmax.band{b}.bias"), vec![n], Init::Zero);
        layout.bands.push(BandIdx {
            start: band.ids.start,
            len: n,
            rank: r,
            a,
            b: bm,
            bias,
        });
    }
    Ok((specs, layout))
}

/// Parameter totals split by component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ParamBreakdown {
    pub embedding: usize,
    pub highway: usize,
    pub lstm: usize,
    pub softmax: usize,
}

impl ParamBreakdown {
    pub fn total(&self) -> usize {
        self.embedding + self.highway + self.lstm + self.softmax
    }
}

/// Closed-form parameter count.
///
/// With `d` the highway width, `H` the LSTM size and bands `(n_b, r_b)`:
///
/// * syllable CNN: `|V_syl|·e_s + Σ_groups (w·e_s·c + c)`; the jamo CNN of
///   character mode is the same with `|V_jamo|` and `e_c`
/// * morphemes: `|V_morph|·e_m`; words: `|V_word|·e_w`
/// * highway: `2(d² + d)` per layer, `3(d² + d)` with an independent carry
/// * LSTM: `4H(d + H + 1)`
/// * banded softmax: `Σ_b (H·r_b + r_b·n_b + n_b)`
pub fn param_breakdown(config: &ModelConfig) -> Result<ParamBreakdown, ModelError> {
    config.validate()?;
    let conv = |vocab: usize, dim: usize, spec: &super::FilterSpec| {
        vocab * dim + spec.0.iter().map(|(w, c)| w * dim * c + c).sum::<usize>()
    };
    let v = config.vocab;
    let mode = config.embedding_mode;
    let mut embedding = 0;
    if mode.uses_syllables() {
        embedding += conv(v.syllable, config.syll_emb_dim, &config.filters);
    }
    if mode == EmbeddingMode::Char {
        embedding += conv(v.jamo, config.char_emb_dim, &config.char_filters);
    }
    if mode.uses_morphs() {
        embedding += v.morph * config.morph_emb_dim;
    }
    if mode == EmbeddingMode::Word {
        embedding += v.word * config.word_emb_dim;
    }
    let d = config.input_width();
    let gates = match config.highway_carry {
        HighwayCarry::Coupled => 2,
        HighwayCarry::Independent => 3,
    };
    let h = config.lstm_hidden;
    let softmax = band_partition(v.word, &config.bands)?
        .iter()
        .map(|b| h * b.rank + b.rank * b.len() + b.len())
        .sum();
    Ok(ParamBreakdown {
        embedding,
        highway: config.highway_layers * gates * (d * d + d),
        lstm: 4 * h * (d + h + 1),
        softmax,
    })
}

pub fn param_count(config: &ModelConfig) -> Result<usize, ModelError> {
    Ok(param_breakdown(config)?.total())
}

/// Parameters of an unfactorized softmax layer over the same vocabulary.
pub fn full_softmax_count(config: &ModelConfig) -> usize {
    config.lstm_hidden * config.vocab.word + config.vocab.word
}

/// All learned weights of a model, stored as named tensors in a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    config: ModelConfig,
    specs: Vec<TensorSpec>,
    layout: Layout,
    tensors: Vec<Tensor>,
}

impl ModelParams {
    pub fn zeros(config: &ModelConfig) -> Result<Self, ModelError> {
        let (specs, layout) = tensor_specs(config)?;
        let tensors = specs.iter().map(|s| Tensor::zeros(&s.shape)).collect();
        Ok(ModelParams {
            config: config.clone(),
            specs,
            layout,
            tensors,
        })
    }

    /// Uniform(-0.05, 0.05) weights, zero biases, forget-gate bias 1. Each
    /// tensor draws from its own stream split off `seed` in tensor order.
    pub fn init(config: &ModelConfig, seed: u64) -> Result<Self, ModelError> {
        let mut params = Self::zeros(config)?;
        let mut seeds = SeedStream::new(seed);
        let h = config.lstm_hidden;
        for (spec, t) in params.specs.iter().zip(params.tensors.iter_mut()) {
            let mut rng = seeds.split();
            match spec.init {
                Init::Uniform => fill_uniform(t, &mut rng, INIT_SCALE),
                Init::Zero => {}
                Init::LstmBias => t.data_mut()[h..2 * h].fill(FORGET_BIAS),
            }
        }
        Ok(params)
    }

    /// Reassembles parameters from tensors in [`tensor_specs`] order.
    pub fn from_tensors(config: &ModelConfig, tensors: Vec<Tensor>) -> Result<Self, ModelError> {
        let mut params = Self::zeros(config)?;
        if tensors.len() != params.tensors.len() {
            return Err(ModelError::Layout(format!(
                "expected {} tensors, got {}",
                params.tensors.len(),
                tensors.len()
            )));
        }
        for (spec, t) in params.specs.iter().zip(&tensors) {
            if t.shape() != spec.shape.as_slice() {
                return Err(ModelError::Layout(format!(
                    "{} has shape {:?}, expected {:?}",
                    spec.name,
                    t.shape(),
                    spec.shape
                )));
            }
        }
        params.tensors = tensors;
        Ok(params)
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn specs(&self) -> &[TensorSpec] {
        &self.specs
    }

    pub fn tensors(&self) -> &[Tensor] {
        &self.tensors
    }

    pub fn tensors_mut(&mut self) -> &mut [Tensor] {
        &mut self.tensors
    }

    pub fn tensor(&self, i: usize) -> &Tensor {
        &self.tensors[i]
    }

    pub fn tensor_mut(&mut self, i: usize) -> &mut Tensor {
        &mut self.tensors[i]
    }

    pub fn named(&self, name: &str) -> Option<&Tensor> {
        self.specs
            .iter()
            .position(|s| s.name == name)
            .map(|i| &self.tensors[i])
    }

    pub fn named_mut(&mut self, name: &str) -> Option<&mut Tensor> {
        let i = self.specs.iter().position(|s| s.name == name)?;
        Some(&mut self.tensors[i])
    }

    /// Sum of allocated tensor sizes.
    pub fn allocated(&self) -> usize {
        self.tensors.iter().map(Tensor::len).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.tensors.iter().all(Tensor::is_finite)
    }

    /// Rounds every value through `f32`, matching what a checkpoint stores.
    pub fn quantize_f32(&mut self) {
        for t in &mut self.tensors {
            for v in t.data_mut() {
                *v = f64::from(*v as f32);
            }
        }
    }
}
