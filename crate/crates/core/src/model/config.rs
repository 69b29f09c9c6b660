use std::fmt;
use std::str::FromStr;

use crate::config::{ConfigError, KvConfig};
use crate::vocab::{BandSpec, Vocabs};

/// Which input representation feeds the highway layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EmbeddingMode {
    /// One learned vector per output-vocabulary word.
    Word,
    /// Start/middle/end morpheme embeddings, concatenated.
    Morph,
    /// Convolution over jamo keys.
    Char,
    /// Convolution over syllables.
    Syllable,
    /// Syllable convolution concatenated with the morpheme triple.
    SyllableMorph,
}

impl EmbeddingMode {
    pub const ALL: [EmbeddingMode; 5] = [
        EmbeddingMode::Word,
        EmbeddingMode::Morph,
        EmbeddingMode::Char,
        EmbeddingMode::Syllable,
        EmbeddingMode::SyllableMorph,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EmbeddingMode::Word => "word",
            EmbeddingMode::Morph => "morph",
            EmbeddingMode::Char => "char",
            EmbeddingMode::Syllable => "syl",
            EmbeddingMode::SyllableMorph => "syl+morph",
        }
    }

    pub fn uses_syllables(self) -> bool {
        matches!(self, EmbeddingMode::Syllable | EmbeddingMode::SyllableMorph)
    }

    pub fn uses_morphs(self) -> bool {
        matches!(self, EmbeddingMode::Morph | EmbeddingMode::SyllableMorph)
    }
}

impl fmt::Display for EmbeddingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EmbeddingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "word" => EmbeddingMode::Word,
            "morph" | "morpheme" => EmbeddingMode::Morph,
            "char" | "character" | "jamo" => EmbeddingMode::Char,
            "syl" | "syllable" => EmbeddingMode::Syllable,
            "syl+morph" | "syllable+morph" => EmbeddingMode::SyllableMorph,
            _ => {
                return Err(format!(
                    "unknown embedding mode {s:?} (word, morph, char, syl, syl+morph)"
                ))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HighwayCarry {
    /// Carry gate is `1 - T`.
    Coupled,
    /// Carry gate has its own weights.
    Independent,
}

impl fmt::Display for HighwayCarry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HighwayCarry::Coupled => "coupled",
            HighwayCarry::Independent => "independent",
        })
    }
}

impl FromStr for HighwayCarry {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "coupled" => Ok(HighwayCarry::Coupled),
            "independent" => Ok(HighwayCarry::Independent),
            _ => Err(format!("unknown highway carry {s:?} (coupled, independent)")),
        }
    }
}

/// Convolution filter groups as `(width, count)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterSpec(pub Vec<(usize, usize)>);

impl FilterSpec {
    /// Widths 1-4 with 30/40/40/40 filters.
    pub fn full_size() -> Self {
        FilterSpec(vec![(1, 30), (2, 40), (3, 40), (4, 40)])
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|(_, c)| c).sum()
    }

    pub fn max_width(&self) -> usize {
        self.0.iter().map(|(w, _)| *w).max().unwrap_or(0)
    }
}

impl fmt::Display for FilterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(w, c)| format!("{w}:{c}")).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for FilterSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|part| {
                let (w, c) = part
                    .trim()
                    .split_once(':')
                    .ok_or_else(|| format!("bad filter group {part:?}; expected width:count"))?;
                let w = w.trim().parse().map_err(|_| format!("bad width in {part:?}"))?;
                let c = c.trim().parse().map_err(|_| format!("bad count in {part:?}"))?;
                Ok((w, c))
            })
            .collect::<Result<Vec<_>, String>>()
            .map(FilterSpec)
    }
}

/// Vocabulary sizes the parameter shapes depend on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VocabSizes {
    pub word: usize,
    pub morph: usize,
    pub syllable: usize,
    pub jamo: usize,
}

impl VocabSizes {
    pub fn of(vocabs: &Vocabs) -> Self {
        VocabSizes {
            word: vocabs.word.len(),
            morph: vocabs.morph.len(),
            syllable: vocabs.syllable.len(),
            jamo: vocabs.jamo.len(),
        }
    }
}

/// Keys written by [`ModelConfig::write_kv`] other than the vocabulary
/// sizes, which come from the vocabulary files.
pub const MODEL_KEYS: [&str; 13] = [
    "embedding_mode",
    "syll_emb_dim",
    "morph_emb_dim",
    "char_emb_dim",
    "word_emb_dim",
    "filters",
    "char_filters",
    "highway_layers",
    "highway_carry",
    "lstm_hidden",
    "bands",
    "max_syllables",
    "max_jamo",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub embedding_mode: EmbeddingMode,
    pub syll_emb_dim: usize,
    pub morph_emb_dim: usize,
    pub char_emb_dim: usize,
    pub word_emb_dim: usize,
    pub filters: FilterSpec,
    pub char_filters: FilterSpec,
    pub highway_layers: usize,
    pub highway_carry: HighwayCarry,
    pub lstm_hidden: usize,
    pub bands: BandSpec,
    pub max_syllables: usize,
    pub max_jamo: usize,
    pub vocab: VocabSizes,
}

impl ModelConfig {
    /// Full-size configuration: 15-dim syllables, 52-dim morphemes, 150
    /// filters, one highway layer, 500 LSTM units and 5K/20K/rest bands.
    pub fn full_size(vocab: VocabSizes) -> Self {
        ModelConfig {
            embedding_mode: EmbeddingMode::SyllableMorph,
            syll_emb_dim: 15,
            morph_emb_dim: 52,
            char_emb_dim: 15,
            word_emb_dim: 52,
            filters: FilterSpec::full_size(),
            char_filters: FilterSpec::full_size(),
            highway_layers: 1,
            highway_carry: HighwayCarry::Coupled,
            lstm_hidden: 500,
            bands: BandSpec::full_size(),
            max_syllables: 8,
            max_jamo: 24,
            vocab,
        }
    }

    /// Desk-scale configuration for toy corpora.
    pub fn small(vocab: VocabSizes) -> Self {
        ModelConfig {
            embedding_mode: EmbeddingMode::SyllableMorph,
            syll_emb_dim: 8,
            morph_emb_dim: 32,
            char_emb_dim: 8,
            word_emb_dim: 32,
            filters: FilterSpec(vec![(1, 10), (2, 15), (3, 15)]),
            char_filters: FilterSpec(vec![(1, 10), (2, 15), (3, 15)]),
            highway_layers: 1,
            highway_carry: HighwayCarry::Coupled,
            lstm_hidden: 48,
            bands: BandSpec::single(32),
            max_syllables: 8,
            max_jamo: 24,
            vocab,
        }
    }

    /// Width of the embedding fed to the highway layer.
    pub fn input_width(&self) -> usize {
        match self.embedding_mode {
            EmbeddingMode::Word => self.word_emb_dim,
            EmbeddingMode::Morph => 3 * self.morph_emb_dim,
            EmbeddingMode::Char => self.char_filters.total(),
            EmbeddingMode::Syllable => self.filters.total(),
            EmbeddingMode::SyllableMorph => self.filters.total() + 3 * self.morph_emb_dim,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        let dims = [
            ("syll_emb_dim", self.syll_emb_dim),
            ("morph_emb_dim", self.morph_emb_dim),
            ("char_emb_dim", self.char_emb_dim),
            ("word_emb_dim", self.word_emb_dim),
            ("highway_layers", self.highway_layers),
            ("lstm_hidden", self.lstm_hidden),
            ("max_syllables", self.max_syllables),
            ("max_jamo", self.max_jamo),
        ];
        if let Some((name, _)) = dims.iter().find(|(_, v)| *v == 0) {
            return bad(format!("{name} must be positive"));
        }
        for (name, spec, limit) in [
            ("filters", &self.filters, self.max_syllables),
            ("char_filters", &self.char_filters, self.max_jamo),
        ] {
            if spec.0.is_empty() || spec.0.iter().any(|(w, c)| *w == 0 || *c == 0) {
                return bad(format!("{name} needs positive widths and counts"));
            }
            if spec.max_width() > limit {
                return bad(format!(
                    "{name} width {} exceeds the padded sequence length {limit}",
                    spec.max_width()
                ));
            }
        }
        let v = self.vocab;
        if [v.word, v.morph, v.syllable, v.jamo].iter().any(|&n| n <= crate::vocab::SPECIAL_COUNT) {
            return bad("vocabulary sizes must exceed the reserved entries".to_string());
        }
        self.bands
            .resolve(v.word)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(())
    }

    pub fn write_kv(&self, kv: &mut KvConfig) {
        kv.set("embedding_mode", self.embedding_mode);
        kv.set("syll_emb_dim", self.syll_emb_dim);
        kv.set("morph_emb_dim", self.morph_emb_dim);
        kv.set("char_emb_dim", self.char_emb_dim);
        kv.set("word_emb_dim", self.word_emb_dim);
        kv.set("filters", &self.filters);
        kv.set("char_filters", &self.char_filters);
        kv.set("highway_layers", self.highway_layers);
        kv.set("highway_carry", self.highway_carry);
        kv.set("lstm_hidden", self.lstm_hidden);
        kv.set("bands", &self.bands);
        kv.set("max_syllables", self.max_syllables);
        kv.set("max_jamo", self.max_jamo);
        kv.set("word_vocab", self.vocab.word);
        kv.set("morph_vocab", self.vocab.morph);
        kv.set("syllable_vocab", self.vocab.syllable);
        kv.set("jamo_vocab", self.vocab.jamo);
    }

    pub fn from_kv(kv: &KvConfig) -> Result<Self, ConfigError> {
        let cfg = ModelConfig {
            embedding_mode: kv.require("embedding_mode")?,
            syll_emb_dim: kv.require("syll_emb_dim")?,
            morph_emb_dim: kv.require("morph_emb_dim")?,
            char_emb_dim: kv.require("char_emb_dim")?,
            word_emb_dim: kv.require("word_emb_dim")?,
            filters: kv.require("filters")?,
            char_filters: kv.require("char_filters")?,
            highway_layers: kv.require("highway_layers")?,
            highway_carry: kv.require("highway_carry")?,
            lstm_hidden: kv.require("lstm_hidden")?,
            bands: kv.require("bands")?,
            max_syllables: kv.require("max_syllables")?,
            max_jamo: kv.require("max_jamo")?,
            vocab: VocabSizes {
                word: kv.require("word_vocab")?,
                morph: kv.require("morph_vocab")?,
                syllable: kv.require("syllable_vocab")?,
                jamo: kv.require("jamo_vocab")?,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
