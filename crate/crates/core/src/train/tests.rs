use super::*;
use crate::corpus::{build_vocabs, Corpus, VocabLimits};
use crate::model::{EmbeddingMode, VocabSizes};
use crate::toy::MEMORIZE;
use crate::vocab::{BandSpec, SegmenterLexicon};

fn memorize_setup() -> (ModelConfig, Vec<Vec<WordFeatures>>) {
    let corpus = Corpus::parse(MEMORIZE).unwrap();
    let vocabs = build_vocabs(&corpus, &corpus.annotations, VocabLimits::default()).unwrap();
    let bundle = VocabBundle {
        vocabs,
        lexicon: corpus.annotations.clone(),
    };
    let mut cfg = ModelConfig::small(VocabSizes::of(&bundle.vocabs));
    cfg.lstm_hidden = 16;
    cfg.bands = BandSpec::single(16);
    let data = encode_corpus(&corpus, &bundle, &cfg);
    (cfg, data)
}

#[test]
fn windows_match_full_sentence_forward() {
    let (cfg, data) = memorize_setup();
    let params = ModelParams::init(&cfg, 5).unwrap();
    let zeros = || -> Vec<Tensor> { params.tensors().iter().map(|t| Tensor::zeros(t.shape())).collect() };
    let mut full = zeros();
    let mut cut = zeros();
    let a = sentence_gradients(&params, &data[2], 100, &mut full).unwrap();
    let b = sentence_gradients(&params, &data[2], 3, &mut cut).unwrap();
    assert!((a - b).abs() < 1e-9);
    let expected = crate::model::forward_sentence(&params, &data[2]).unwrap().nll;
    assert!((a - expected).abs() < 1e-9);
    // Truncation drops cross-window terms, so recurrent gradients differ.
    assert_ne!(full, cut);
}

#[test]
fn near_zero_model_is_near_uniform() {
    let corpus = Corpus::parse(MEMORIZE).unwrap();
    let vocabs = build_vocabs(&corpus, &SegmenterLexicon::new(), VocabLimits::default()).unwrap();
    let bundle = VocabBundle {
        vocabs,
        lexicon: SegmenterLexicon::new(),
    };
    let mut sizes = VocabSizes::of(&bundle.vocabs);
    sizes.word = 100;
    let mut cfg = ModelConfig::small(sizes);
    cfg.embedding_mode = EmbeddingMode::SyllableMorph;
    let mut params = ModelParams::init(&cfg, 1).unwrap();
    for t in params.tensors_mut() {
        t.scale(0.01);
    }
    let data = encode_corpus(&corpus, &bundle, &cfg);
    let ppl = perplexity(&params, &data).unwrap().value();
    assert!((ppl - 100.0).abs() < 5.0, "{ppl}");
}

#[test]
fn memorizes_and_is_deterministic() {
    let (cfg, data) = memorize_setup();
    let tc = TrainConfig {
        epochs: 100,
        batch_size: 1,
        lr: 0.5,
        lr_decay: 1.0,
        seed: 3,
        ..TrainConfig::default()
    };
    let mut lines = Vec::new();
    let a = train(&cfg, &tc, &data, &[], |m| lines.push(m.tsv_line())).unwrap();
    let b = train(&cfg, &tc, &data, &[], |_| {}).unwrap();
    assert_eq!(a.params, b.params);
    assert_eq!(lines.len(), 100);
    assert!(lines[0].starts_with("1\t") && lines[0].ends_with("\tNaN"));
    let first = a.metrics[0].train_nll;
    let last = a.metrics.last().unwrap().train_nll;
    assert!(last < first * 0.5, "{first} -> {last}");
}

#[test]
fn divergence_keeps_last_good() {
    let (cfg, data) = memorize_setup();
    let tc = TrainConfig {
        epochs: 3,
        batch_size: 1,
        lr: 1e308,
        clip_norm: 1e300,
        ..TrainConfig::default()
    };
    match train(&cfg, &tc, &data, &[], |_| {}) {
        Err(TrainError::Diverged { last_good, .. }) => assert!(last_good.is_finite()),
        other => panic!("expected divergence, got {other:?}"),
    }
}

#[test]
fn clipping_bounds_norm() {
    let mut g = vec![Tensor::vector(vec![3.0, 4.0]), Tensor::vector(vec![12.0])];
    let before = clip_gradients(&mut g, 5.0);
    assert_eq!(before, 13.0);
    let after: f64 = g.iter().map(Tensor::sq_norm).sum::<f64>().sqrt();
    assert!((after - 5.0).abs() < 1e-12);
}
