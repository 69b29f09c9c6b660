//! Korean text segmentation: words, syllables and jamo.
//!
//! Syllable arithmetic follows the Unicode conjoining-jamo scheme: a
//! precomposed block at `0xAC00 + (lead * 21 + vowel) * 28 + tail`, with
//! `tail == 0` meaning "no final consonant".

use std::fmt;

use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

const SYLLABLE_BASE: u32 = 0xAC00;
const LEAD_COUNT: u32 = 19;
const VOWEL_COUNT: u32 = 21;
const TAIL_COUNT: u32 = 28;
const BLOCK_PER_LEAD: u32 = VOWEL_COUNT * TAIL_COUNT;
const SYLLABLE_COUNT: u32 = LEAD_COUNT * BLOCK_PER_LEAD;

/// Number of precomposed Hangul syllables (U+AC00..=U+D7A3).
pub const HANGUL_SYLLABLE_COUNT: u32 = SYLLABLE_COUNT;

// Compatibility jamo (what a keyboard shows) indexed by slot position.
const LEAD_KEYS: [char; 19] = [
    'ㄱ', 'ㄲ', 'ㄴ', 'ㄷ', 'ㄸ', 'ㄹ', 'ㅁ', 'ㅂ', 'ㅃ', 'ㅅ', 'ㅆ', 'ㅇ', 'ㅈ', 'ㅉ', 'ㅊ', 'ㅋ', 'ㅌ',
    'ㅍ', 'ㅎ',
];
const TAIL_KEYS: [char; 27] = [
    'ㄱ', 'ㄲ', 'ㄳ', 'ㄴ', 'ㄵ', 'ㄶ', 'ㄷ', 'ㄹ', 'ㄺ', 'ㄻ', 'ㄼ', 'ㄽ', 'ㄾ', 'ㄿ', 'ㅀ', 'ㅁ', 'ㅂ',
    'ㅄ', 'ㅅ', 'ㅆ', 'ㅇ', 'ㅈ', 'ㅊ', 'ㅋ', 'ㅌ', 'ㅍ', 'ㅎ',
];
const VOWEL_KEY_BASE: u32 = 0x314F; // ㅏ

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HangulError {
    #[error("invalid UTF-8 at byte offset {offset}")]
    Decode { offset: usize },
    #[error("{0:?} is not a precomposed Hangul syllable")]
    NotDecomposable(char),
    #[error("jamo index out of range: lead {lead} (<19), vowel {vowel} (<21), tail {tail} (<28)")]
    Domain { lead: u8, vowel: u8, tail: u8 },
    #[error("word must be non-empty and free of whitespace: {0:?}")]
    InvalidWord(String),
}

/// A whitespace-free, NFC-normalized surface token.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(String);

impl Word {
    /// Normalizes `surface` to NFC and validates it.
    pub fn new(surface: &str) -> Result<Self, HangulError> {
        let nfc: String = surface.nfc().collect();
        if nfc.is_empty() || nfc.chars().any(char::is_whitespace) {
            return Err(HangulError::InvalidWord(surface.to_string()));
        }
        Ok(Word(nfc))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Word {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// One syllable unit: a precomposed Hangul block, or any other single
/// character treated atomically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syllable(pub char);

impl Syllable {
    pub fn is_hangul(self) -> bool {
        is_hangul_syllable(self.0)
    }
}

impl fmt::Display for Syllable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Lead/vowel/tail slot indices of a precomposed syllable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct JamoTriple {
    pub lead: u8,
    pub vowel: u8,
    /// 0 means no final consonant.
    pub tail: u8,
}

pub fn is_hangul_syllable(c: char) -> bool {
    (SYLLABLE_BASE..SYLLABLE_BASE + SYLLABLE_COUNT).contains(&(c as u32))
}

/// NFC-normalizes `text`, collapses whitespace runs to one space and trims.
pub fn normalize(text: &str) -> String {
    let nfc: String = text.nfc().collect();
    let mut out = String::with_capacity(nfc.len());
    for (i, part) in nfc.split_whitespace().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(part);
    }
    out
}

/// Decodes raw bytes as UTF-8 and normalizes them.
pub fn normalize_bytes(bytes: &[u8]) -> Result<String, HangulError> {
    let text = std::str::from_utf8(bytes).map_err(|e| HangulError::Decode {
        offset: e.valid_up_to(),
    })?;
    Ok(normalize(text))
}

/// Splits a normalized sentence into words.
pub fn split_words(sentence: &str) -> Vec<Word> {
    sentence
        .split_whitespace()
        .map(|w| Word(w.nfc().collect()))
        .collect()
}

pub fn syllabify(word: &Word) -> Vec<Syllable> {
    word.0.chars().map(Syllable).collect()
}

pub fn decompose_jamo(syllable: Syllable) -> Result<JamoTriple, HangulError> {
    if !syllable.is_hangul() {
        return Err(HangulError::NotDecomposable(syllable.0));
    }
    let offset = syllable.0 as u32 - SYLLABLE_BASE;
    Ok(JamoTriple {
        lead: (offset / BLOCK_PER_LEAD) as u8,
        vowel: ((offset % BLOCK_PER_LEAD) / TAIL_COUNT) as u8,
        tail: (offset % TAIL_COUNT) as u8,
    })
}

pub fn compose_jamo(triple: JamoTriple) -> Result<Syllable, HangulError> {
    let JamoTriple { lead, vowel, tail } = triple;
    if u32::from(lead) >= LEAD_COUNT
        || u32::from(vowel) >= VOWEL_COUNT
        || u32::from(tail) >= TAIL_COUNT
    {
        return Err(HangulError::Domain { lead, vowel, tail });
    }
    let code = SYLLABLE_BASE
        + (u32::from(lead) * VOWEL_COUNT + u32::from(vowel)) * TAIL_COUNT
        + u32::from(tail);
    // Every in-range triple lands inside the syllable block.
    Ok(Syllable(char::from_u32(code).expect("in-range syllable")))
}

/// Expands text into the key sequence a two-set Korean keyboard user types:
/// one compatibility jamo per filled slot of each Hangul syllable, one key
/// per other character. Leading and trailing consonants map to the same key,
/// so a partially composed prefix matches the word it will grow into.
pub fn keystrokes(text: &str) -> Vec<char> {
    let mut keys = Vec::with_capacity(text.len());
    for c in text.chars() {
        push_keys(c, &mut keys);
    }
    keys
}

/// Number of keystrokes needed to type `text` on a vanilla keyboard.
pub fn keystroke_count(text: &str) -> usize {
    text.chars()
        .map(|c| match decompose_jamo(Syllable(c)) {
            Ok(t) if t.tail == 0 => 2,
            Ok(_) => 3,
            Err(_) => 1,
        })
        .sum()
}

fn push_keys(c: char, keys: &mut Vec<char>) {
    if let Ok(t) = decompose_jamo(Syllable(c)) {
        keys.push(LEAD_KEYS[t.lead as usize]);
        keys.push(vowel_key(t.vowel));
        if t.tail > 0 {
            keys.push(TAIL_KEYS[t.tail as usize - 1]);
        }
        return;
    }
    let code = c as u32;
    let key = match code {
        // conjoining leading consonants
        0x1100..=0x1112 => LEAD_KEYS[(code - 0x1100) as usize],
        // conjoining vowels
        0x1161..=0x1175 => vowel_key((code - 0x1161) as u8),
        // conjoining trailing consonants
        0x11A8..=0x11C2 => TAIL_KEYS[(code - 0x11A8) as usize],
        _ => c,
    };
    keys.push(key);
}

fn vowel_key(vowel: u8) -> char {
    char::from_u32(VOWEL_KEY_BASE + u32::from(vowel)).expect("vowel in compatibility block")
}
