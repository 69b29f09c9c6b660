//! Small built-in corpora for tests, examples and desk-scale experiments.

use rand::{RngExt, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::corpus::{build_vocabs, Corpus, CorpusError, VocabLimits};
use crate::hangul::{compose_jamo, decompose_jamo, JamoTriple, Syllable};
use crate::model::{EmbeddingMode, ModelConfig, VocabSizes};
use crate::train::{encode_corpus, perplexity, train, EpochMetrics, TrainConfig, TrainError};
use crate::vocab::{BandSpec, VocabBundle};

/// Five annotated sentences. `오늘` is the most frequent first word, and
/// the word after `많이` is fixed by the word before it.
pub const MEMORIZE: &str = "\
비가|비+가 많이 와서|와+서 오늘 집에|집+에 있었다|있+었+다
밥을|밥+을 많이 먹어서|먹+어서 배가|배+가 불렀다|불렀+다
오늘 저녁 그는|그+는 친구를|친구+를 만나러|만나+러 학교에|학교+에 갔다|갔+다
오늘 그가|그+가 책을|책+을 읽고|읽+고 나서 잠을|잠+을 잤다|잤+다
우리는|우리+는 내일 아침 바다에|바다+에 가서|가+서 수영을|수영+을 한다|한+다
";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Class {
    Food,
    Thing,
    Person,
    Place,
}

const CLASSES: [Class; 4] = [Class::Food, Class::Thing, Class::Person, Class::Place];

fn verbs(class: Class) -> &'static [&'static str] {
    match class {
        Class::Food => &["먹", "만들", "좋아하", "씻", "나누"],
        Class::Thing => &["읽", "찾", "고치", "보내", "잃어버리"],
        Class::Person => &["만나", "돕", "부르", "기다리", "믿"],
        Class::Place => &["가", "오", "도착하", "들르", "떠나"],
    }
}

const LINKS: [&str; 5] = ["고", "면서", "는데", "지만", "다가"];
const FINALS: [&str; 4] = ["다", "지요", "네요", "었다"];
const TIMES: [&str; 6] = ["오늘", "어제", "내일", "아침에", "저녁에", "주말에"];

/// Syllables that start stems of each class, so stems carry a class cue
/// in their spelling.
fn class_onset(class: Class) -> &'static [char] {
    match class {
        Class::Food => &['과', '떡', '밥', '국'],
        Class::Thing => &['책', '물', '옷', '종'],
        Class::Person => &['선', '친', '아', '형'],
        Class::Place => &['시', '산', '강', '역'],
    }
}

fn has_tail(word: &str) -> bool {
    word.chars()
        .last()
        .and_then(|c| decompose_jamo(Syllable(c)).ok())
        .is_some_and(|t| t.tail != 0)
}

/// Picks the particle allomorph matching the stem's final consonant.
fn particle(stem: &str, with_tail: &'static str, without: &'static str) -> &'static str {
    if has_tail(stem) {
        with_tail
    } else {
        without
    }
}

struct Zipf {
    cumulative: Vec<f64>,
}

impl Zipf {
    fn new(n: usize, exponent: f64) -> Self {
        let mut total = 0.0;
        let cumulative = (0..n)
            .map(|r| {
                total += 1.0 / ((r + 1) as f64).powf(exponent);
                total
            })
            .collect();
        Zipf { cumulative }
    }

    fn sample(&self, rng: &mut SplitMix64) -> usize {
        let u = rng.random_range(0.0..*self.cumulative.last().unwrap());
        self.cumulative.partition_point(|&c| c <= u)
    }
}

/// Settings for [`synthetic_corpus`].
#[derive(Debug, Clone, Copy)]
pub struct SyntheticSpec {
    pub words: usize,
    pub stems_per_class: usize,
    pub zipf_exponent: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            words: 50_000,
            stems_per_class: 120,
            zipf_exponent: 1.0,
            seed: 2017,
        }
    }
}

// Plain-lead syllable slots and common final consonants (ㄱ ㄴ ㄹ ㅁ ㅇ);
// zero means no final.
const STEM_LEADS: [u8; 14] = [0, 2, 3, 5, 6, 7, 9, 11, 12, 14, 15, 16, 17, 18];
const STEM_TAILS: [u8; 8] = [0, 0, 0, 1, 4, 8, 16, 21];

fn make_stems(rng: &mut SplitMix64, class: Class, n: usize) -> Vec<String> {
    let firsts = class_onset(class);
    let mut out: Vec<String> = Vec::with_capacity(n);
    while out.len() < n {
        let mut stem = firsts[rng.random_range(0..firsts.len())].to_string();
        for _ in 0..rng.random_range(1..3) {
            let triple = JamoTriple {
                lead: STEM_LEADS[rng.random_range(0..STEM_LEADS.len())],
                vowel: rng.random_range(0..21),
                tail: STEM_TAILS[rng.random_range(0..STEM_TAILS.len())],
            };
            stem.push(compose_jamo(triple).expect("in-range jamo").0);
        }
        if !out.contains(&stem) {
            out.push(stem);
        }
    }
    out
}

/// `surface|stem+suffix`
fn token(stem: &str, suffix: &str) -> String {
    format!("{stem}{suffix}|{stem}+{suffix}")
}

/// Generated annotated corpus of subject/object/location clauses. The verb
/// class is fixed by the class of the preceding noun and its particle; the
/// particle allomorph follows the stem's final consonant.
pub fn synthetic_corpus(spec: SyntheticSpec) -> String {
    let mut rng = SplitMix64::seed_from_u64(spec.seed);
    let stems: Vec<Vec<String>> = CLASSES
        .iter()
        .map(|&c| make_stems(&mut rng, c, spec.stems_per_class))
        .collect();
    let zipf = Zipf::new(spec.stems_per_class, spec.zipf_exponent);
    let noun = |rng: &mut SplitMix64, class: Class| stems[class as usize][zipf.sample(rng)].as_str();
    let mut text = String::new();
    let mut words = 0;
    while words < spec.words {
        let mut sentence: Vec<String> = Vec::new();
        if rng.random_range(0..3) == 0 {
            sentence.push(TIMES[rng.random_range(0..TIMES.len())].to_string());
        }
        let subj = noun(&mut rng, Class::Person);
        let p = if rng.random_range(0..2) == 0 {
            particle(subj, "이", "가")
        } else {
            particle(subj, "은", "는")
        };
        sentence.push(token(subj, p));
        let clauses = rng.random_range(1..3);
        for c in 0..clauses {
            let class = CLASSES[rng.random_range(0..CLASSES.len())];
            let n = noun(&mut rng, class);
            if class == Class::Place {
                if rng.random_range(0..2) == 0 {
                    let who = noun(&mut rng, Class::Person);
                    sentence.push(token(who, particle(who, "과", "와")));
                }
                sentence.push(token(n, "에"));
            } else {
                sentence.push(token(n, particle(n, "을", "를")));
            }
            let vs = verbs(class);
            let v = vs[rng.random_range(0..vs.len())];
            let e = if c + 1 == clauses {
                FINALS[rng.random_range(0..FINALS.len())]
            } else {
                LINKS[rng.random_range(0..LINKS.len())]
            };
            sentence.push(token(v, e));
        }
        words += sentence.len();
        text.push_str(&sentence.join(" "));
        text.push('\n');
    }
    text
}

/// Settings for an embedding-mode comparison on a generated corpus.
#[derive(Debug, Clone)]
pub struct AblationSpec {
    pub corpus: SyntheticSpec,
    /// Share of sentences held out from the end.
    pub valid_fraction: f64,
    pub max_words: usize,
    pub bands: BandSpec,
    pub train: TrainConfig,
}

impl Default for AblationSpec {
    fn default() -> Self {
        AblationSpec {
            corpus: SyntheticSpec {
                stems_per_class: 1500,
                ..SyntheticSpec::default()
            },
            valid_fraction: 0.1,
            max_words: 2000,
            bands: BandSpec::single(32),
            train: TrainConfig {
                epochs: 6,
                lr: 0.5,
                ..TrainConfig::default()
            },
        }
    }
}

/// Vocabularies and splits shared by every run of an ablation.
#[derive(Debug, Clone)]
pub struct Ablation {
    pub spec: AblationSpec,
    pub bundle: VocabBundle,
    pub train_set: Corpus,
    pub valid_set: Corpus,
}

impl Ablation {
    /// Vocabularies come from the training split only, so held-out words
    /// can be unknown to the output layer.
    pub fn prepare(spec: AblationSpec) -> Result<Self, CorpusError> {
        let corpus = Corpus::parse(&synthetic_corpus(spec.corpus))?;
        let (train_set, valid_set) = corpus.split_tail(spec.valid_fraction);
        let limits = VocabLimits {
            max_words: spec.max_words,
            ..VocabLimits::default()
        };
        let vocabs = build_vocabs(&train_set, &corpus.annotations, limits)?;
        let bundle = VocabBundle {
            vocabs,
            lexicon: corpus.annotations.clone(),
        };
        Ok(Ablation {
            spec,
            bundle,
            train_set,
            valid_set,
        })
    }

    pub fn model_config(&self, mode: EmbeddingMode) -> ModelConfig {
        let mut cfg = ModelConfig::small(VocabSizes::of(&self.bundle.vocabs));
        cfg.embedding_mode = mode;
        cfg.bands = self.spec.bands.clone();
        cfg
    }

    /// Trains one mode with one seed and returns held-out perplexity.
    pub fn run(&self, mode: EmbeddingMode, seed: u64, on_epoch: impl FnMut(&EpochMetrics)) -> Result<f64, TrainError> {
        let model = self.model_config(mode);
        let train_cfg = TrainConfig {
            seed,
            ..self.spec.train.clone()
        };
        let train_data = encode_corpus(&self.train_set, &self.bundle, &model);
        let valid_data = encode_corpus(&self.valid_set, &self.bundle, &model);
        let out = train(&model, &train_cfg, &train_data, &[], on_epoch)?;
        Ok(perplexity(&out.params, &valid_data)?.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Corpus;

    #[test]
    fn memorize_corpus_parses() {
        let c = Corpus::parse(MEMORIZE).unwrap();
        assert_eq!(c.sentences.len(), 5);
        assert_eq!(c.word_count(), 32);
        let firsts: Vec<&str> = c.sentences.iter().map(|s| s.words[0].as_str()).collect();
        assert_eq!(firsts.iter().filter(|w| **w == "오늘").count(), 2);
    }

    #[test]
    fn synthetic_is_deterministic_and_sized() {
        let spec = SyntheticSpec {
            words: 2_000,
            ..SyntheticSpec::default()
        };
        let a = synthetic_corpus(spec);
        assert_eq!(a, synthetic_corpus(spec));
        let c = Corpus::parse(&a).unwrap();
        assert!(c.word_count() >= 2_000 && c.word_count() < 2_010);
        assert!(c.sentences.iter().all(|s| s.words.len() >= 3));
        assert!(c.annotations.annotation(c.sentences[0].words.last().unwrap().as_str()).is_some());
    }

    #[test]
    fn particles_follow_final_consonant() {
        assert_eq!(particle("책", "을", "를"), "을");
        assert_eq!(particle("사과", "을", "를"), "를");
    }
}
