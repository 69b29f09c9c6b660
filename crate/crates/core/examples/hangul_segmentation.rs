//! Splits Korean text into words, syllables, jamo and keystrokes.
//!
//! cargo run --example hangul_segmentation -- "비가 많이 와서"

use aglm::hangul::{decompose_jamo, keystroke_count, keystrokes, split_words, syllabify};

fn main() {
    let text = std::env::args().nth(1).unwrap_or_else(|| "비가 많이 와서 오늘 집에 있었다".to_string());
    for word in split_words(&text) {
        println!("{}", word.as_str());
        for syl in syllabify(&word) {
            match decompose_jamo(syl) {
                Ok(t) => println!("  {}  lead {:2} vowel {:2} tail {:2}", syl.0, t.lead, t.vowel, t.tail),
                Err(_) => println!("  {}  (not a precomposed syllable)", syl.0),
            }
        }
        let keys: String = keystrokes(word.as_str()).into_iter().collect();
        println!("  keys {keys} ({})", keystroke_count(word.as_str()));
    }
}
