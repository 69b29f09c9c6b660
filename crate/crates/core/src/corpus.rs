//! Corpus files: UTF-8, one sentence per line, words separated by spaces.
//!
//! A word may carry a gold segmentation as `surface|m1+m2+m3`. Inside the
//! surface `||` stands for a literal `|`; inside a morpheme `++` stands for a
//! literal `+`. Annotated morphemes must concatenate back to the surface.

use std::path::Path;

use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::hangul::{keystrokes, normalize_bytes, syllabify, HangulError, Word};
use crate::vocab::{
    segment_morphemes, SegmenterLexicon, VocabError, VocabKind, Vocabs, Vocabulary,
};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Decode(#[from] HangulError),
    #[error("line {line}: {msg}")]
    Annotation { line: usize, msg: String },
    #[error(transparent)]
    Vocab(#[from] VocabError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub line: usize,
    pub words: Vec<Word>,
}

#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub sentences: Vec<Sentence>,
    /// Gold segmentations found in the text.
    pub annotations: SegmenterLexicon,
    /// Lines that were empty after normalization.
    pub blank_lines: usize,
}

impl Corpus {
    pub fn parse(text: &str) -> Result<Self, CorpusError> {
        let mut corpus = Corpus::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let mut words = Vec::new();
            for token in raw.split_whitespace() {
                let (surface, morphs) = parse_token(token).map_err(|msg| CorpusError::Annotation { line, msg })?;
                let word = Word::new(&surface).map_err(|e| CorpusError::Annotation {
                    line,
                    msg: e.to_string(),
                })?;
                if let Some(morphs) = morphs {
                    corpus.annotations.add_annotation(word.as_str(), &morphs);
                }
                words.push(word);
            }
            if words.is_empty() {
                corpus.blank_lines += 1;
            } else {
                corpus.sentences.push(Sentence { line, words });
            }
        }
        Ok(corpus)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, CorpusError> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
        // validates UTF-8 and reports the failing byte offset
        normalize_bytes(&bytes)?;
        Self::parse(std::str::from_utf8(&bytes).expect("validated above"))
    }

    pub fn word_count(&self) -> usize {
        self.sentences.iter().map(|s| s.words.len()).sum()
    }

    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.sentences.iter().flat_map(|s| s.words.iter())
    }

    /// Splits off the last `fraction` of sentences (by line order) as a
    /// held-out set.
    pub fn split_tail(&self, fraction: f64) -> (Corpus, Corpus) {
        let n = self.sentences.len();
        let held = ((n as f64) * fraction).floor() as usize;
        let held = held.min(n.saturating_sub(1));
        let (head, tail) = self.sentences.split_at(n - held);
        let part = |s: &[Sentence]| Corpus {
            sentences: s.to_vec(),
            annotations: self.annotations.clone(),
            blank_lines: 0,
        };
        (part(head), part(tail))
    }
}

fn parse_token(token: &str) -> Result<(String, Option<Vec<String>>), String> {
    let mut surface = String::new();
    let mut chars = token.chars().peekable();
    let mut annotation = None;
    while let Some(c) = chars.next() {
        if c == '|' {
            if chars.peek() == Some(&'|') {
                chars.next();
                surface.push('|');
            } else {
                annotation = Some(chars.collect::<String>());
                break;
            }
        } else {
            surface.push(c);
        }
    }
    let surface: String = surface.nfc().collect();
    let Some(annotation) = annotation else {
        return Ok((surface, None));
    };
    let morphs: Vec<String> = crate::vocab::split_plus(&annotation)
        .ok_or_else(|| format!("empty morpheme in annotation of {surface:?}"))?
        .into_iter()
        .map(|m| m.nfc().collect())
        .collect();
    if morphs.concat() != surface {
        return Err(format!(
            "morphemes {morphs:?} do not concatenate to {surface:?}"
        ));
    }
    Ok((surface, Some(morphs)))
}

/// Size caps for [`build_vocabs`], counted including the reserved entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VocabLimits {
    pub max_words: usize,
    pub max_morphs: usize,
    pub max_syllables: usize,
    pub max_jamo: usize,
}

impl Default for VocabLimits {
    fn default() -> Self {
        VocabLimits {
            max_words: 200_000,
            max_morphs: 20_000,
            max_syllables: 3_000,
            max_jamo: 200,
        }
    }
}

/// Builds all four vocabularies. Morphemes are counted from gold
/// annotations where present and from greedy segmentation against
/// `lexicon` elsewhere.
pub fn build_vocabs(
    corpus: &Corpus,
    lexicon: &SegmenterLexicon,
    limits: VocabLimits,
) -> Result<Vocabs, VocabError> {
    let word = Vocabulary::build(corpus.words().map(Word::as_str), VocabKind::Word, limits.max_words)?;
    let morph = Vocabulary::build(
        corpus.words().flat_map(|w| segment_morphemes(w, lexicon)),
        VocabKind::Morpheme,
        limits.max_morphs,
    )?;
    let syllable = Vocabulary::build(
        corpus.words().flat_map(|w| syllabify(w).into_iter().map(|s| s.0.to_string())),
        VocabKind::Syllable,
        limits.max_syllables,
    )?;
    let jamo = Vocabulary::build(
        corpus.words().flat_map(|w| keystrokes(w.as_str()).into_iter().map(|k| k.to_string())),
        VocabKind::Jamo,
        limits.max_jamo,
    )?;
    Ok(Vocabs {
        word,
        morph,
        syllable,
        jamo,
    })
}
