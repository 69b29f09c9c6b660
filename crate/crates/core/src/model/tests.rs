use super::*;
use crate::numerics::{log_softmax, sigmoid, Tensor};
use crate::vocab::{BandSpec, MorphTriple, WordFeatures};

fn tiny(mode: EmbeddingMode, carry: HighwayCarry) -> ModelConfig {
    ModelConfig {
        embedding_mode: mode,
        syll_emb_dim: 3,
        morph_emb_dim: 2,
        char_emb_dim: 2,
        word_emb_dim: 3,
        filters: FilterSpec(vec![(1, 2), (2, 2)]),
        char_filters: FilterSpec(vec![(1, 1), (3, 2)]),
        highway_layers: 1,
        highway_carry: carry,
        lstm_hidden: 4,
        bands: "6:3,*:2".parse::<BandSpec>().unwrap(),
        max_syllables: 3,
        max_jamo: 5,
        vocab: VocabSizes {
            word: 12,
            morph: 9,
            syllable: 10,
            jamo: 8,
        },
    }
}

fn feats(word: u32, syl: [u32; 3], morphs: [u32; 3], jamo: [u32; 5]) -> WordFeatures {
    WordFeatures {
        syllable_ids: syl.to_vec(),
        jamo_ids: jamo.to_vec(),
        morphs: MorphTriple {
            start: morphs[0],
            middle: morphs[1],
            end: morphs[2],
        },
        word_id: word,
    }
}

fn sample_sentence() -> Vec<WordFeatures> {
    vec![
        feats(5, [4, 7, 1], [4, 1, 6], [4, 5, 6, 1, 1]),
        feats(9, [8, 1, 1], [5, 1, 1], [7, 4, 1, 1, 1]),
        feats(0, [6, 9, 5], [4, 8, 7], [6, 6, 5, 4, 7]),
    ]
}

/// Parameters large enough that every nonlinearity is off its linear region.
fn spread_params(config: &ModelConfig, seed: u64) -> ModelParams {
    let mut p = ModelParams::init(config, seed).unwrap();
    let mut stream = crate::numerics::SeedStream::new(seed ^ 0x5eed);
    for t in p.tensors_mut() {
        let mut rng = stream.split();
        crate::numerics::fill_uniform(t, &mut rng, 0.6);
    }
    p
}

fn sentence_nll(p: &ModelParams, words: &[WordFeatures]) -> f64 {
    forward_sentence(p, words).unwrap().nll
}

fn analytic_grads(p: &ModelParams, words: &[WordFeatures]) -> Vec<Tensor> {
    let cfg = p.config();
    let (inputs, targets) = sentence_io(words, cfg.max_syllables, cfg.max_jamo);
    let mut g = Graph::new(p);
    let out = g
        .window(&inputs, &targets, &LstmState::zeros(cfg.lstm_hidden))
        .unwrap();
    let grads = g.tape.backward(out.loss).unwrap();
    g.param_grads(grads)
}

fn check_gradients(config: &ModelConfig) {
    let mut p = spread_params(config, 11);
    let words = sample_sentence();
    let grads = analytic_grads(&p, &words);
    let eps = 1e-6;
    let mut touched = 0;
    for ti in 0..p.tensors().len() {
        for k in 0..p.tensor(ti).len() {
            let orig = p.tensor(ti).data()[k];
            p.tensor_mut(ti).data_mut()[k] = orig + eps;
            let up = sentence_nll(&p, &words);
            p.tensor_mut(ti).data_mut()[k] = orig - eps;
            let down = sentence_nll(&p, &words);
            p.tensor_mut(ti).data_mut()[k] = orig;
            let numeric = (up - down) / (2.0 * eps);
            let analytic = grads[ti].data()[k];
            let err = (numeric - analytic).abs() / (1.0 + numeric.abs().max(analytic.abs()));
            assert!(
                err < 1e-6,
                "{} [{k}]: numeric {numeric} analytic {analytic}",
                p.specs()[ti].name
            );
            if analytic != 0.0 {
                touched += 1;
            }
        }
    }
    assert!(touched > 0);
}

#[test]
fn gradients_syllable_morph() {
    check_gradients(&tiny(EmbeddingMode::SyllableMorph, HighwayCarry::Coupled));
}

#[test]
fn gradients_independent_carry() {
    check_gradients(&tiny(EmbeddingMode::SyllableMorph, HighwayCarry::Independent));
}

#[test]
fn gradients_baselines() {
    for mode in [
        EmbeddingMode::Word,
        EmbeddingMode::Morph,
        EmbeddingMode::Char,
        EmbeddingMode::Syllable,
    ] {
        check_gradients(&tiny(mode, HighwayCarry::Coupled));
    }
}

#[test]
fn log_probs_normalize() {
    let cfg = tiny(EmbeddingMode::SyllableMorph, HighwayCarry::Coupled);
    let p = spread_params(&cfg, 3);
    let out = forward_sentence(&p, &sample_sentence()).unwrap();
    assert_eq!(out.log_probs.len(), 4);
    for lp in &out.log_probs {
        assert_eq!(lp.len(), 12);
        let total: f64 = lp.data().iter().map(|v| v.exp()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}

#[test]
fn empty_sentence_rejected() {
    let cfg = tiny(EmbeddingMode::Word, HighwayCarry::Coupled);
    let p = ModelParams::init(&cfg, 0).unwrap();
    assert!(matches!(forward_sentence(&p, &[]), Err(ModelError::EmptySentence)));
}

fn vec_mat(x: &[f64], w: &Tensor) -> Vec<f64> {
    let (rows, cols) = (w.rows(), w.cols());
    assert_eq!(x.len(), rows);
    let mut out = vec![0.0; cols];
    for (i, xi) in x.iter().enumerate() {
        for (j, o) in out.iter_mut().enumerate() {
            *o += xi * w.data()[i * cols + j];
        }
    }
    out
}

#[test]
fn dsoftmax_matches_materialized_matrix() {
    let cfg = tiny(EmbeddingMode::Word, HighwayCarry::Coupled);
    let p = spread_params(&cfg, 5);
    let h = [0.3, -0.7, 0.1, 0.9];

    // Materialize the full H×V matrix band by band, then one softmax.
    let mut w = vec![vec![0.0; 12]; 4];
    let mut bias = [0.0; 12];
    for band in &p.layout().bands {
        let a = p.tensor(band.a);
        let b = p.tensor(band.b);
        for i in 0..4 {
            for j in 0..band.len {
                let mut s = 0.0;
                for r in 0..band.rank {
                    s += a.data()[i * band.rank + r] * b.data()[r * band.len + j];
                }
                w[i][band.start + j] = s;
            }
        }
        for j in 0..band.len {
            bias[band.start + j] = p.tensor(band.bias).data()[j];
        }
    }
    let logits: Vec<f64> = (0..12)
        .map(|j| bias[j] + (0..4).map(|i| h[i] * w[i][j]).sum::<f64>())
        .collect();
    let expected = log_softmax(&logits);

    let mut g = Graph::new(&p);
    let hv = g.tape.constant(Tensor::vector(h.to_vec()));
    let lp = g.dsoftmax_log_probs(hv).unwrap();
    for (a, b) in g.value(lp).data().iter().zip(&expected) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn lstm_and_highway_match_loops() {
    let cfg = tiny(EmbeddingMode::Word, HighwayCarry::Coupled);
    let p = spread_params(&cfg, 9);
    let x = [0.2, -0.4, 0.8];
    let h0 = [0.1, 0.0, -0.3, 0.5];
    let c0 = [0.6, -0.2, 0.0, 0.4];

    let hw = p.layout().highway[0];
    let t: Vec<f64> = vec_mat(&x, p.tensor(hw.transform_w))
        .iter()
        .zip(p.tensor(hw.transform_b).data())
        .map(|(z, b)| sigmoid(z + b))
        .collect();
    let hh: Vec<f64> = vec_mat(&x, p.tensor(hw.hidden_w))
        .iter()
        .zip(p.tensor(hw.hidden_b).data())
        .map(|(z, b)| (z + b).tanh())
        .collect();
    let y: Vec<f64> = (0..3).map(|k| t[k] * hh[k] + (1.0 - t[k]) * x[k]).collect();

    let l = p.layout();
    let zx = vec_mat(&y, p.tensor(l.lstm_input));
    let zh = vec_mat(&h0, p.tensor(l.lstm_recurrent));
    let z: Vec<f64> = (0..16)
        .map(|k| zx[k] + zh[k] + p.tensor(l.lstm_bias).data()[k])
        .collect();
    let mut h1 = [0.0; 4];
    let mut c1 = [0.0; 4];
    for k in 0..4 {
        let i = sigmoid(z[k]);
        let f = sigmoid(z[4 + k]);
        let g = z[8 + k].tanh();
        let o = sigmoid(z[12 + k]);
        c1[k] = f * c0[k] + i * g;
        h1[k] = o * c1[k].tanh();
    }

    let mut g = Graph::new(&p);
    let xv = g.tape.constant(Tensor::vector(x.to_vec()));
    let yv = g.highway(xv).unwrap();
    for (a, b) in g.value(yv).data().iter().zip(&y) {
        assert!((a - b).abs() < 1e-12);
    }
    let s = g.state_constant(&LstmState {
        h: Tensor::vector(h0.to_vec()),
        c: Tensor::vector(c0.to_vec()),
    });
    let next = g.lstm_step(s, yv).unwrap();
    let st = g.state_value(next);
    for k in 0..4 {
        assert!((st.h.data()[k] - h1[k]).abs() < 1e-12);
        assert!((st.c.data()[k] - c1[k]).abs() < 1e-12);
    }
}

#[test]
fn syllable_cnn_matches_loops() {
    let cfg = tiny(EmbeddingMode::Syllable, HighwayCarry::Coupled);
    let p = spread_params(&cfg, 21);
    let f = feats(5, [4, 7, 1], [4, 1, 6], [4, 5, 6, 1, 1]);
    let emb = p.tensor(p.layout().syllable_emb.unwrap());
    let d = 3;
    let row = |id: u32, k: usize| emb.data()[id as usize * d + k];
    let mut expected = Vec::new();
    for conv in &p.layout().syllable_conv {
        let w = conv.width;
        let filt = p.tensor(conv.filters);
        let c = filt.shape()[2];
        for ch in 0..c {
            let mut best = f64::NEG_INFINITY;
            for start in 0..=3 - w {
                let mut s = p.tensor(conv.bias).data()[ch];
                for o in 0..w {
                    for k in 0..d {
                        s += row(f.syllable_ids[start + o], k) * filt.data()[(o * d + k) * c + ch];
                    }
                }
                best = best.max(s.tanh());
            }
            expected.push(best);
        }
    }
    let mut g = Graph::new(&p);
    let v = g.embed_syllables(&f).unwrap();
    assert_eq!(g.value(v).data().len(), expected.len());
    for (a, b) in g.value(v).data().iter().zip(&expected) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn step_matches_teacher_forced_pass() {
    let cfg = tiny(EmbeddingMode::SyllableMorph, HighwayCarry::Coupled);
    let p = spread_params(&cfg, 4);
    let words = sample_sentence();
    let full = forward_sentence(&p, &words).unwrap();
    let (inputs, _) = sentence_io(&words, cfg.max_syllables, cfg.max_jamo);
    let mut state = LstmState::zeros(4);
    for (t, input) in inputs.iter().enumerate() {
        let (next, lp) = step(&p, &state, input).unwrap();
        assert_eq!(lp, full.log_probs[t]);
        state = next;
    }
}
