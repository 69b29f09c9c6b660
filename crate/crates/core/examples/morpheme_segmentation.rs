//! Greedy longest-match morpheme segmentation and the start/middle/end
//! slots the model embeds.
//!
//! cargo run --example morpheme_segmentation

use aglm::hangul::Word;
use aglm::vocab::{segment_morphemes, to_morph_triple, SegmenterLexicon, VocabKind, Vocabulary};

fn main() {
    let mut lexicon = SegmenterLexicon::new();
    for (m, n) in [("먹", 40), ("었", 90), ("다", 200), ("학교", 15), ("에서", 60), ("는", 300), ("우리", 20)] {
        lexicon.add_morpheme(m, n);
    }
    // gold annotations win over greedy matching
    lexicon.add_annotation("먹어서", &["먹".to_string(), "어서".to_string()]);

    let words = ["먹었다", "학교에서", "우리는", "먹어서", "바다"];
    let all: Vec<Vec<String>> = words
        .iter()
        .map(|w| segment_morphemes(&Word::new(w).unwrap(), &lexicon))
        .collect();
    let vocab = Vocabulary::build(all.iter().flatten().map(String::as_str), VocabKind::Morpheme, 100).unwrap();
    for (w, morphs) in words.iter().zip(&all) {
        let t = to_morph_triple(morphs, &vocab);
        let show = |id: u32| vocab.surface(id).unwrap_or("?").to_string();
        println!(
            "{w:8} {:18} start {:6} middle {:6} end {}",
            morphs.join("+"),
            show(t.start),
            show(t.middle),
            show(t.end)
        );
    }
}
