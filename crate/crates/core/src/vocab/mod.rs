//! Frequency-ordered vocabularies, morpheme segmentation, output-vocabulary
//! frequency bands and per-word input features.

mod bands;
mod features;
mod lexicon;
mod store;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use bands::{band_partition, Band, BandSize, BandSpec};
pub use features::{encode_word, to_morph_triple, MorphTriple, Vocabs, WordFeatures};
pub use lexicon::{segment_morphemes, SegmenterLexicon};
pub(crate) use lexicon::split_plus;
pub use store::{VocabBundle, LEXICON_FILE, ANNOTATIONS_FILE};

pub const UNK: u32 = 0;
pub const PAD: u32 = 1;
pub const BOS: u32 = 2;
pub const EOS: u32 = 3;
/// Empty morpheme slot. Shares the PAD id, which morpheme inputs never use
/// otherwise.
pub const NONE: u32 = PAD;
pub const SPECIAL_COUNT: usize = 4;
pub const SPECIALS: [&str; SPECIAL_COUNT] = ["<unk>", "<pad>", "<bos>", "<eos>"];

#[derive(Debug, Error)]
pub enum VocabError {
    #[error("cannot build a vocabulary from an empty corpus")]
    EmptyCorpus,
    #[error("max_size {0} must exceed the {SPECIAL_COUNT} reserved entries")]
    MaxSizeTooSmall(usize),
    #[error("band spec covers {needed} words but the vocabulary has {size}")]
    BandOverflow { needed: usize, size: usize },
    #[error("invalid band spec: {0}")]
    InvalidBands(String),
    #[error("malformed vocabulary file at line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("malformed lexicon at line {line}: {msg}")]
    Lexicon { line: usize, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    File {
        path: String,
        source: Box<VocabError>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VocabKind {
    Word,
    Morpheme,
    Syllable,
    Jamo,
}

impl VocabKind {
    pub const ALL: [VocabKind; 4] = [
        VocabKind::Word,
        VocabKind::Morpheme,
        VocabKind::Syllable,
        VocabKind::Jamo,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            VocabKind::Word => "word",
            VocabKind::Morpheme => "morpheme",
            VocabKind::Syllable => "syllable",
            VocabKind::Jamo => "jamo",
        }
    }
}

impl fmt::Display for VocabKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VocabKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        VocabKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown vocabulary kind {s:?}"))
    }
}

/// Dense id map. Ids `0..4` are the reserved specials, the rest are sorted
/// by descending frequency with ties in first-occurrence order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    kind: VocabKind,
    entries: Vec<(String, u64)>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    /// Counts `tokens` and keeps the `max_size - 4` most frequent units.
    pub fn build<I, S>(tokens: I, kind: VocabKind, max_size: usize) -> Result<Self, VocabError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        if max_size <= SPECIAL_COUNT {
            return Err(VocabError::MaxSizeTooSmall(max_size));
        }
        let mut counts: IndexMap<String, u64> = IndexMap::new();
        for tok in tokens {
            *counts.entry(tok.as_ref().to_string()).or_default() += 1;
        }
        if counts.is_empty() {
            return Err(VocabError::EmptyCorpus);
        }
        let mut ranked: Vec<(String, u64)> = counts
            .into_iter()
            .filter(|(s, _)| !SPECIALS.contains(&s.as_str()))
            .collect();
        // stable sort keeps first-occurrence order among equal counts
        ranked.sort_by_key(|e| std::cmp::Reverse(e.1));
        ranked.truncate(max_size - SPECIAL_COUNT);
        Ok(Self::from_ranked(kind, ranked))
    }

    fn from_ranked(kind: VocabKind, ranked: Vec<(String, u64)>) -> Self {
        let mut entries: Vec<(String, u64)> = SPECIALS.iter().map(|s| (s.to_string(), 0)).collect();
        entries.extend(ranked);
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, (s, _))| (s.clone(), i as u32))
            .collect();
        Vocabulary {
            kind,
            entries,
            index,
        }
    }

    pub fn kind(&self) -> VocabKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, surface: &str) -> Option<u32> {
        self.index.get(surface).copied()
    }

    /// Id of `surface`, or UNK.
    pub fn id_of(&self, surface: &str) -> u32 {
        self.get(surface).unwrap_or(UNK)
    }

    pub fn surface(&self, id: u32) -> Option<&str> {
        self.entries.get(id as usize).map(|(s, _)| s.as_str())
    }

    pub fn frequency(&self, id: u32) -> Option<u64> {
        self.entries.get(id as usize).map(|(_, f)| *f)
    }

    pub fn entries(&self) -> &[(String, u64)] {
        &self.entries
    }

    pub fn is_special(id: u32) -> bool {
        (id as usize) < SPECIAL_COUNT
    }

    /// Serialized form: `#vocab <kind> <size>` then `surface<TAB>frequency`
    /// per id.
    pub fn to_text(&self) -> String {
        let mut out = format!("#vocab {} {}\n", self.kind, self.len());
        for (s, f) in &self.entries {
            out.push_str(s);
            out.push('\t');
            out.push_str(&f.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, VocabError> {
        let fmt_err = |line: usize, msg: &str| VocabError::Format {
            line,
            msg: msg.to_string(),
        };
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| fmt_err(1, "missing header"))?;
        let parts: Vec<&str> = header.split(' ').collect();
        let (kind, size) = match parts.as_slice() {
            ["#vocab", kind, size] => (
                kind.parse::<VocabKind>().map_err(|e| fmt_err(1, &e))?,
                size.parse::<usize>().map_err(|_| fmt_err(1, "bad size"))?,
            ),
            _ => return Err(fmt_err(1, "expected `#vocab <kind> <size>`")),
        };
        let mut entries = Vec::with_capacity(size);
        for (i, line) in lines.enumerate() {
            let (s, f) = line
                .split_once('\t')
                .ok_or_else(|| fmt_err(i + 2, "expected surface<TAB>frequency"))?;
            let f = f.parse::<u64>().map_err(|_| fmt_err(i + 2, "bad frequency"))?;
            entries.push((s.to_string(), f));
        }
        if entries.len() != size {
            return Err(fmt_err(0, &format!("header says {size} entries, found {}", entries.len())));
        }
        if entries.len() < SPECIAL_COUNT || entries.iter().zip(SPECIALS).any(|((s, _), sp)| s != sp) {
            return Err(fmt_err(2, "reserved entries missing or out of order"));
        }
        let ranked = entries.split_off(SPECIAL_COUNT);
        let vocab = Self::from_ranked(kind, ranked);
        if vocab.index.len() != vocab.len() {
            return Err(fmt_err(0, "duplicate surface"));
        }
        Ok(vocab)
    }

    /// SHA-256 of the serialized form.
    pub fn hash(&self) -> [u8; 32] {
        Sha256::digest(self.to_text().as_bytes()).into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(s: &str) -> Vec<&str> {
        s.split_whitespace().collect()
    }

    #[test]
    fn counts_and_orders_by_frequency() {
        let v = Vocabulary::build(words("그가 그가 갔다"), VocabKind::Word, 10).unwrap();
        assert_eq!(
            &v.entries()[SPECIAL_COUNT..],
            &[("그가".to_string(), 2), ("갔다".to_string(), 1)]
        );
        let v = Vocabulary::build(words("a b a"), VocabKind::Word, 10).unwrap();
        assert!(v.id_of("a") < v.id_of("b"));
    }

    #[test]
    fn ties_keep_first_occurrence() {
        let v = Vocabulary::build(words("c b a b c a"), VocabKind::Word, 10).unwrap();
        let order: Vec<&str> = (4..7).map(|i| v.surface(i).unwrap()).collect();
        assert_eq!(order, ["c", "b", "a"]);
    }

    #[test]
    fn truncates_to_max_size() {
        let v = Vocabulary::build(words("a a a b b c"), VocabKind::Word, 6).unwrap();
        assert_eq!(v.len(), 6);
        assert_eq!(v.id_of("c"), UNK);
        assert!(v.get("b").is_some());
    }

    #[test]
    fn errors() {
        assert!(matches!(
            Vocabulary::build(Vec::<&str>::new(), VocabKind::Word, 10),
            Err(VocabError::EmptyCorpus)
        ));
        assert!(matches!(
            Vocabulary::build(words("a"), VocabKind::Word, 4),
            Err(VocabError::MaxSizeTooSmall(4))
        ));
    }

    #[test]
    fn text_round_trip() {
        let v = Vocabulary::build(words("그 가 그 는"), VocabKind::Morpheme, 100).unwrap();
        let text = v.to_text();
        assert!(text.starts_with("#vocab morpheme 7\n<unk>\t0\n"));
        let back = Vocabulary::from_text(&text).unwrap();
        assert_eq!(back, v);
        assert_eq!(back.hash(), v.hash());
    }

    #[test]
    fn rejects_malformed_text() {
        assert!(Vocabulary::from_text("").is_err());
        assert!(Vocabulary::from_text("#vocab word 5\n<unk>\t0\n").is_err());
        assert!(Vocabulary::from_text("#vocab noun 0\n").is_err());
        let v = Vocabulary::build(words("a"), VocabKind::Word, 10).unwrap();
        let broken = v.to_text().replace("a\t1", "a 1");
        assert!(Vocabulary::from_text(&broken).is_err());
    }
}
