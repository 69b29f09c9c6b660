//! Builds the four vocabularies from an annotated corpus and writes them.
//!
//! cargo run --example build_vocab -- /tmp/aglm-vocab

use aglm::corpus::{build_vocabs, Corpus, VocabLimits};
use aglm::toy::MEMORIZE;
use aglm::vocab::{VocabBundle, VocabKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "target/example-vocab".to_string());
    let corpus = Corpus::parse(MEMORIZE)?;
    let vocabs = build_vocabs(&corpus, &corpus.annotations, VocabLimits::default())?;
    let bundle = VocabBundle {
        vocabs,
        lexicon: corpus.annotations.clone(),
    };
    bundle.write_dir(&out)?;
    for kind in VocabKind::ALL {
        let v = bundle.vocabs.get(kind);
        let top: Vec<&str> = v.entries().iter().skip(4).take(5).map(|(s, _)| s.as_str()).collect();
        println!("{:9} {:3} entries, most frequent: {}", kind.as_str(), v.len(), top.join(" "));
    }
    println!("wrote {out}");
    Ok(())
}
