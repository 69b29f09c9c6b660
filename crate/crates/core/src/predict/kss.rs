use std::fmt::Write as _;

use super::{PredictError, Predictor};
use crate::corpus::Corpus;
use crate::hangul::keystrokes;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KssOptions {
    /// Length of the suggestion list the typist reads.
    pub suggestions: usize,
    /// Keystrokes charged for picking a suggestion.
    pub selection_cost: usize,
    /// Whether the space after each word is a keystroke.
    pub count_separators: bool,
}

impl Default for KssOptions {
    fn default() -> Self {
        KssOptions {
            suggestions: 3,
            selection_cost: 0,
            count_separators: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SentenceKss {
    pub line: usize,
    pub total: usize,
    pub pressed: usize,
    pub saved: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KssReport {
    pub total: usize,
    pub pressed: usize,
    pub saved: usize,
    pub sentences: Vec<SentenceKss>,
}

impl KssReport {
    pub fn kss_percent(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            100.0 * self.saved as f64 / self.total as f64
        }
    }

    pub fn summary(&self) -> String {
        format!(
            "sentences\t{}\ntotal\t{}\npressed\t{}\nsaved\t{}\nkss\t{:.2}\n",
            self.sentences.len(),
            self.total,
            self.pressed,
            self.saved,
            self.kss_percent()
        )
    }

    /// `line<TAB>total<TAB>pressed<TAB>saved` per sentence.
    pub fn tsv(&self) -> String {
        let mut out = String::new();
        for s in &self.sentences {
            let _ = writeln!(out, "{}\t{}\t{}\t{}", s.line, s.total, s.pressed, s.saved);
        }
        out
    }
}

/// Replays every sentence as a typist. Before each key of a word (and
/// before its separator) the typist reads the suggestion list for the keys
/// typed so far; if the intended word is listed and picking it beats typing
/// the rest, the remaining keys and the separator are saved. Otherwise the
/// next key is pressed. The context then advances with the true word.
pub fn kss_evaluate<P: Predictor>(
    predictor: &P,
    corpus: &Corpus,
    options: KssOptions,
) -> Result<KssReport, PredictError> {
    if corpus.sentences.is_empty() {
        return Err(PredictError::EmptyCorpus);
    }
    let sep = usize::from(options.count_separators);
    let mut report = KssReport::default();
    for sentence in &corpus.sentences {
        let mut row = SentenceKss {
            line: sentence.line,
            total: 0,
            pressed: 0,
            saved: 0,
        };
        let mut ctx = predictor.start(sentence.line)?;
        for word in &sentence.words {
            let keys = keystrokes(word.as_str());
            row.total += keys.len() + sep;
            let mut picked = false;
            for typed in 0..=keys.len() {
                let gain = keys.len() - typed + sep;
                if gain > options.selection_cost {
                    let list = predictor.suggest(&ctx, &keys[..typed], options.suggestions);
                    if list.iter().take(options.suggestions).any(|s| s == word.as_str()) {
                        row.pressed += typed + options.selection_cost;
                        row.saved += gain - options.selection_cost;
                        picked = true;
                        break;
                    }
                }
            }
            if !picked {
                row.pressed += keys.len() + sep;
            }
            ctx = predictor.advance(&ctx, word)?;
        }
        debug_assert_eq!(row.pressed + row.saved, row.total);
        report.total += row.total;
        report.pressed += row.pressed;
        report.saved += row.saved;
        report.sentences.push(row);
    }
    Ok(report)
}
