//! Compares backpropagated gradients with central finite differences on a
//! tiny model.
//!
//! cargo run --release --example gradient_check

use aglm::model::{EmbeddingMode, FilterSpec, HighwayCarry, ModelConfig, ModelParams, VocabSizes};
use aglm::numerics::Tensor;
use aglm::train::{sentence_gradients, SentenceScorer};
use aglm::vocab::{BandSpec, MorphTriple, WordFeatures};

fn word(id: u32, syl: [u32; 2], m: [u32; 3]) -> WordFeatures {
    WordFeatures {
        syllable_ids: syl.to_vec(),
        jamo_ids: vec![4, 5, 6, 1],
        morphs: MorphTriple {
            start: m[0],
            middle: m[1],
            end: m[2],
        },
        word_id: id,
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ModelConfig {
        embedding_mode: EmbeddingMode::SyllableMorph,
        syll_emb_dim: 3,
        morph_emb_dim: 4,
        char_emb_dim: 2,
        word_emb_dim: 3,
        filters: FilterSpec(vec![(1, 2), (2, 2)]),
        char_filters: FilterSpec(vec![(1, 2)]),
        highway_layers: 1,
        highway_carry: HighwayCarry::Coupled,
        lstm_hidden: 8,
        bands: "6:3,*:2".parse::<BandSpec>()?,
        max_syllables: 2,
        max_jamo: 4,
        vocab: VocabSizes {
            word: 12,
            morph: 10,
            syllable: 9,
            jamo: 8,
        },
    };
    let mut params = ModelParams::init(&cfg, 5)?;
    let sentence = vec![word(5, [4, 7], [4, 1, 6]), word(11, [8, 1], [5, 1, 1]), word(7, [6, 5], [9, 8, 7])];

    let mut grads: Vec<Tensor> = params.tensors().iter().map(|t| Tensor::zeros(t.shape())).collect();
    sentence_gradients(&params, &sentence, 35, &mut grads)?;

    let eps = 1e-6;
    for ti in 0..params.tensors().len() {
        let mut worst: f64 = 0.0;
        for k in 0..params.tensor(ti).len() {
            let orig = params.tensor(ti).data()[k];
            params.tensor_mut(ti).data_mut()[k] = orig + eps;
            let up = params.sentence_nll(&sentence)?;
            params.tensor_mut(ti).data_mut()[k] = orig - eps;
            let down = params.sentence_nll(&sentence)?;
            params.tensor_mut(ti).data_mut()[k] = orig;
            let numeric = (up - down) / (2.0 * eps);
            let analytic = grads[ti].data()[k];
            worst = worst.max((numeric - analytic).abs() / numeric.abs().max(analytic.abs()).max(1e-8));
        }
        println!("{:24} max relative error {worst:.2e}", params.specs()[ti].name);
    }
    Ok(())
}
