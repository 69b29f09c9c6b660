use super::{segment_morphemes, SegmenterLexicon, VocabKind, Vocabulary, BOS, NONE, PAD, UNK};
use crate::hangul::{keystrokes, syllabify, Word};

/// The four vocabularies a model is built against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabs {
    pub word: Vocabulary,
    pub morph: Vocabulary,
    pub syllable: Vocabulary,
    pub jamo: Vocabulary,
}

impl Vocabs {
    pub fn get(&self, kind: VocabKind) -> &Vocabulary {
        match kind {
            VocabKind::Word => &self.word,
            VocabKind::Morpheme => &self.morph,
            VocabKind::Syllable => &self.syllable,
            VocabKind::Jamo => &self.jamo,
        }
    }

    /// Hashes in [`VocabKind::ALL`] order.
    pub fn hashes(&self) -> [[u8; 32]; 4] {
        VocabKind::ALL.map(|k| self.get(k).hash())
    }
}

/// Start/middle/end morpheme ids; empty slots hold [`NONE`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MorphTriple {
    pub start: u32,
    pub middle: u32,
    pub end: u32,
}

impl MorphTriple {
    pub fn ids(&self) -> [u32; 3] {
        [self.start, self.middle, self.end]
    }
}

/// Everything the input layer needs to embed one word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordFeatures {
    /// Syllable ids, tail-padded with PAD to a fixed length.
    pub syllable_ids: Vec<u32>,
    /// Jamo-key ids for the character-level baseline, tail-padded.
    pub jamo_ids: Vec<u32>,
    pub morphs: MorphTriple,
    /// Output-vocabulary id (UNK when absent).
    pub word_id: u32,
}

impl WordFeatures {
    /// Features of the sentence-start marker.
    pub fn bos(max_syllables: usize, max_jamo: usize) -> Self {
        WordFeatures {
            syllable_ids: padded(std::iter::once(BOS), max_syllables),
            jamo_ids: padded(std::iter::once(BOS), max_jamo),
            morphs: MorphTriple {
                start: BOS,
                middle: NONE,
                end: NONE,
            },
            word_id: BOS,
        }
    }
}

fn padded(ids: impl Iterator<Item = u32>, len: usize) -> Vec<u32> {
    let mut out: Vec<u32> = ids.take(len).collect();
    out.resize(len, PAD);
    out
}

/// Maps a segmentation onto the three morpheme slots.
///
/// One unit fills `start`; two units fill `start` and `end`; three fill all
/// slots; longer segmentations keep the first and last units and look up the
/// concatenated interior as a single middle surface.
pub fn to_morph_triple(morphemes: &[String], morph_vocab: &Vocabulary) -> MorphTriple {
    let id = |s: &str| morph_vocab.id_of(s);
    match morphemes {
        [] => MorphTriple {
            start: UNK,
            middle: NONE,
            end: NONE,
        },
        [a] => MorphTriple {
            start: id(a),
            middle: NONE,
            end: NONE,
        },
        [a, b] => MorphTriple {
            start: id(a),
            middle: NONE,
            end: id(b),
        },
        [a, mid @ .., z] => MorphTriple {
            start: id(a),
            middle: id(&mid.concat()),
            end: id(z),
        },
    }
}

/// Builds input features for `word`. Syllable and jamo sequences keep their
/// leading units when longer than the limits.
pub fn encode_word(
    word: &Word,
    vocabs: &Vocabs,
    lexicon: &SegmenterLexicon,
    max_syllables: usize,
    max_jamo: usize,
) -> WordFeatures {
    let syllable_ids = padded(
        syllabify(word).into_iter().map(|s| vocabs.syllable.id_of(&s.0.to_string())),
        max_syllables,
    );
    let jamo_ids = padded(
        keystrokes(word.as_str()).into_iter().map(|k| vocabs.jamo.id_of(&k.to_string())),
        max_jamo,
    );
    let morphs = to_morph_triple(&segment_morphemes(word, lexicon), &vocabs.morph);
    WordFeatures {
        syllable_ids,
        jamo_ids,
        morphs,
        word_id: vocabs.word.id_of(word.as_str()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab(kind: VocabKind, tokens: &[&str]) -> Vocabulary {
        Vocabulary::build(tokens.iter().copied(), kind, 100).unwrap()
    }

    fn strings(items: &[&str]) -> Vec<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn morph_triple_slot_rules() {
        let v = vocab(VocabKind::Morpheme, &["그", "가", "a", "b", "c", "d", "e", "bc"]);
        let t = to_morph_triple(&strings(&["그", "가"]), &v);
        assert_eq!(t.ids(), [v.id_of("그"), NONE, v.id_of("가")]);
        let t = to_morph_triple(&strings(&["그"]), &v);
        assert_eq!(t.ids(), [v.id_of("그"), NONE, NONE]);
        let t = to_morph_triple(&strings(&["a", "b", "c"]), &v);
        assert_eq!(t.ids(), [v.id_of("a"), v.id_of("b"), v.id_of("c")]);
        let t = to_morph_triple(&strings(&["a", "b", "c", "d"]), &v);
        assert_eq!(t.ids(), [v.id_of("a"), v.id_of("bc"), v.id_of("d")]);
        // "bcd" is not in the vocabulary
        let t = to_morph_triple(&strings(&["a", "b", "c", "d", "e"]), &v);
        assert_eq!(t.ids(), [v.id_of("a"), UNK, v.id_of("e")]);
        let t = to_morph_triple(&strings(&["zz"]), &v);
        assert_eq!(t.ids(), [UNK, NONE, NONE]);
    }

    fn toy_vocabs() -> (Vocabs, SegmenterLexicon) {
        let mut lex = SegmenterLexicon::new();
        lex.add_annotation("그가", &strings(&["그", "가"]));
        let vocabs = Vocabs {
            word: vocab(VocabKind::Word, &["그가", "갔다"]),
            morph: vocab(VocabKind::Morpheme, &["그", "가", "갔", "다"]),
            syllable: vocab(VocabKind::Syllable, &["그", "가", "갔", "다"]),
            jamo: vocab(VocabKind::Jamo, &["ㄱ", "ㅡ", "ㅏ", "ㅆ", "ㄷ"]),
        };
        (vocabs, lex)
    }

    #[test]
    fn encode_pads_and_segments() {
        let (v, lex) = toy_vocabs();
        let f = encode_word(&Word::new("그가").unwrap(), &v, &lex, 8, 10);
        let s = |c: &str| v.syllable.id_of(c);
        assert_eq!(f.syllable_ids, [s("그"), s("가"), PAD, PAD, PAD, PAD, PAD, PAD]);
        assert_eq!(f.morphs.ids(), [v.morph.id_of("그"), NONE, v.morph.id_of("가")]);
        assert_eq!(f.word_id, v.word.id_of("그가"));
        assert_eq!(f.jamo_ids.len(), 10);
        assert_eq!(&f.jamo_ids[4..], &[PAD; 6]);
    }

    #[test]
    fn oov_word_still_has_syllables() {
        let (v, lex) = toy_vocabs();
        let f = encode_word(&Word::new("가다").unwrap(), &v, &lex, 8, 10);
        assert_eq!(f.word_id, UNK);
        assert_eq!(f.syllable_ids[0], v.syllable.id_of("가"));
        assert_eq!(f.syllable_ids[1], v.syllable.id_of("다"));
    }

    #[test]
    fn long_words_truncate_tail() {
        let (v, lex) = toy_vocabs();
        let word = Word::new("가그가그가그가그다다").unwrap();
        let f = encode_word(&word, &v, &lex, 8, 6);
        let s = |c: &str| v.syllable.id_of(c);
        assert_eq!(
            f.syllable_ids,
            [s("가"), s("그"), s("가"), s("그"), s("가"), s("그"), s("가"), s("그")]
        );
        assert_eq!(f.jamo_ids.len(), 6);
        assert!(!f.jamo_ids.contains(&PAD));
    }

    #[test]
    fn bos_features() {
        let f = WordFeatures::bos(4, 6);
        assert_eq!(f.syllable_ids, [BOS, PAD, PAD, PAD]);
        assert_eq!(f.word_id, BOS);
    }
}
