use crate::model::{forward_sentence, ModelError, ModelParams};
use crate::vocab::WordFeatures;

/// Anything that can score a sentence as BOS w1..wn EOS.
pub trait SentenceScorer {
    /// Total negative log-likelihood of the n+1 targets.
    fn sentence_nll(&self, words: &[WordFeatures]) -> Result<f64, ModelError>;
}

impl SentenceScorer for ModelParams {
    fn sentence_nll(&self, words: &[WordFeatures]) -> Result<f64, ModelError> {
        Ok(forward_sentence(self, words)?.nll)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perplexity {
    pub nll: f64,
    /// Prediction targets, EOS and UNK included.
    pub tokens: usize,
    pub skipped: usize,
}

impl Perplexity {
    pub fn value(&self) -> f64 {
        (self.nll / self.tokens as f64).exp()
    }

    pub fn mean_nll(&self) -> f64 {
        self.nll / self.tokens as f64
    }
}

/// `exp(Σ NLL / tokens)`, summed in sentence order. Empty sentences are
/// skipped and counted.
pub fn perplexity<M: SentenceScorer + ?Sized>(
    model: &M,
    sentences: &[Vec<WordFeatures>],
) -> Result<Perplexity, ModelError> {
    let mut out = Perplexity {
        nll: 0.0,
        tokens: 0,
        skipped: 0,
    };
    for s in sentences {
        if s.is_empty() {
            out.skipped += 1;
            continue;
        }
        out.nll += model.sentence_nll(s)?;
        out.tokens += s.len() + 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use super::*;
    use crate::vocab::{BOS, EOS};

    /// Maximum-likelihood bigram table over word ids.
    struct Bigram(HashMap<(u32, u32), f64>);

    impl SentenceScorer for Bigram {
        fn sentence_nll(&self, words: &[WordFeatures]) -> Result<f64, ModelError> {
            let mut ids = vec![BOS];
            ids.extend(words.iter().map(|w| w.word_id));
            ids.push(EOS);
            Ok(ids.windows(2).map(|p| -self.0[&(p[0], p[1])].ln()).sum())
        }
    }

    fn w(id: u32) -> WordFeatures {
        let mut f = WordFeatures::bos(1, 1);
        f.word_id = id;
        f
    }

    #[test]
    fn bigram_oracle() {
        // Sentences: "a b", "a c", "b". Ids a=4, b=5, c=6.
        // P(a|BOS)=2/3 P(b|BOS)=1/3 P(b|a)=1/2 P(c|a)=1/2 P(EOS|b)=1 P(EOS|c)=1
        let table: HashMap<(u32, u32), f64> = [
            ((BOS, 4), 2.0 / 3.0),
            ((BOS, 5), 1.0 / 3.0),
            ((4, 5), 0.5),
            ((4, 6), 0.5),
            ((5, EOS), 1.0),
            ((6, EOS), 1.0),
        ]
        .into_iter()
        .collect();
        let corpus = vec![vec![w(4), w(5)], vec![w(4), w(6)], vec![w(5)], vec![]];
        let p = perplexity(&Bigram(table), &corpus).unwrap();
        assert_eq!(p.tokens, 8);
        assert_eq!(p.skipped, 1);
        // log-likelihood = 2 ln(2/3) + 2 ln(1/2) + ln(1/3)
        let ll = 2.0 * (2.0f64 / 3.0).ln() + 2.0 * 0.5f64.ln() + (1.0f64 / 3.0).ln();
        let expected = (-ll / 8.0).exp();
        assert!((p.value() - expected).abs() < 1e-9);
    }
}
