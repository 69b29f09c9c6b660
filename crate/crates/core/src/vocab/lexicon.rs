use std::collections::{BTreeMap, HashMap};

use super::VocabError;
use crate::hangul::Word;

/// Morpheme inventory used by the greedy segmenter, plus gold segmentations
/// harvested from annotated corpora.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SegmenterLexicon {
    entries: BTreeMap<String, u64>,
    annotations: HashMap<String, Vec<String>>,
    longest: usize,
}

impl SegmenterLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `count` occurrences of a morpheme. Empty surfaces and zero
    /// counts are ignored.
    pub fn add_morpheme(&mut self, morpheme: &str, count: u64) {
        if morpheme.is_empty() || count == 0 {
            return;
        }
        *self.entries.entry(morpheme.to_string()).or_default() += count;
        self.longest = self.longest.max(morpheme.chars().count());
    }

    /// Records a gold segmentation for `surface` and counts its morphemes.
    pub fn add_annotation(&mut self, surface: &str, morphemes: &[String]) {
        for m in morphemes {
            self.add_morpheme(m, 1);
        }
        self.annotations
            .entry(surface.to_string())
            .or_insert_with(|| morphemes.to_vec());
    }

    /// Adds every entry and annotation of `other`; existing annotations win.
    pub fn merge(&mut self, other: &SegmenterLexicon) {
        for (m, f) in &other.entries {
            self.add_morpheme(m, *f);
        }
        for (s, ms) in &other.annotations {
            self.annotations.entry(s.clone()).or_insert_with(|| ms.clone());
        }
    }

    pub fn contains(&self, morpheme: &str) -> bool {
        self.entries.contains_key(morpheme)
    }

    pub fn frequency(&self, morpheme: &str) -> Option<u64> {
        self.entries.get(morpheme).copied()
    }

    pub fn annotation(&self, surface: &str) -> Option<&[String]> {
        self.annotations.get(surface).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `morpheme<TAB>frequency` lines, most frequent first, ties by surface.
    pub fn to_text(&self) -> String {
        let mut rows: Vec<(&String, &u64)> = self.entries.iter().collect();
        rows.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
        rows.iter().map(|(m, f)| format!("{m}\t{f}\n")).collect()
    }

    pub fn from_text(text: &str) -> Result<Self, VocabError> {
        let mut lex = SegmenterLexicon::new();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| VocabError::Lexicon {
                line: i + 1,
                msg: msg.to_string(),
            };
            let (m, f) = line.split_once('\t').ok_or_else(|| err("expected morpheme<TAB>frequency"))?;
            let f: u64 = f.parse().map_err(|_| err("bad frequency"))?;
            if m.is_empty() || f == 0 {
                return Err(err("entries need a non-empty morpheme and a positive frequency"));
            }
            lex.add_morpheme(m, f);
        }
        Ok(lex)
    }

    /// Gold segmentations as `surface<TAB>m1+m2+...` lines sorted by surface,
    /// with `+` inside a morpheme written as `++`.
    pub fn annotations_to_text(&self) -> String {
        let mut rows: Vec<_> = self.annotations.iter().collect();
        rows.sort();
        rows.iter()
            .map(|(s, ms)| {
                let joined: Vec<String> = ms.iter().map(|m| m.replace('+', "++")).collect();
                format!("{s}\t{}\n", joined.join("+"))
            })
            .collect()
    }

    /// Loads annotation lines written by [`Self::annotations_to_text`]
    /// without touching morpheme counts.
    pub fn load_annotations(&mut self, text: &str) -> Result<(), VocabError> {
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| VocabError::Lexicon {
                line: i + 1,
                msg: msg.to_string(),
            };
            let (s, ms) = line.split_once('\t').ok_or_else(|| err("expected surface<TAB>morphemes"))?;
            let morphs = split_plus(ms).ok_or_else(|| err("empty morpheme"))?;
            if morphs.concat() != s {
                return Err(err("morphemes do not concatenate to the surface"));
            }
            self.annotations.insert(s.to_string(), morphs);
        }
        Ok(())
    }
}

/// Splits on single `+`, reading `++` as a literal plus.
pub(crate) fn split_plus(s: &str) -> Option<Vec<String>> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        if c == '+' {
            if chars.peek() == Some(&'+') {
                chars.next();
                cur.push('+');
            } else {
                out.push(std::mem::take(&mut cur));
            }
        } else {
            cur.push(c);
        }
    }
    out.push(cur);
    if out.iter().any(String::is_empty) {
        return None;
    }
    Some(out)
}

/// Splits `word` into morphemes: a gold annotation if one exists, otherwise
/// greedy longest match from the left, falling back to one syllable at a
/// time where nothing matches.
pub fn segment_morphemes(word: &Word, lexicon: &SegmenterLexicon) -> Vec<String> {
    if let Some(gold) = lexicon.annotation(word.as_str()) {
        return gold.to_vec();
    }
    let chars: Vec<char> = word.as_str().chars().collect();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < chars.len() {
        let max = lexicon.longest.min(chars.len() - pos);
        let take = (1..=max)
            .rev()
            .find(|&n| lexicon.contains(&chars[pos..pos + n].iter().collect::<String>()))
            .unwrap_or(1);
        out.push(chars[pos..pos + take].iter().collect());
        pos += take;
    }
    out
}
