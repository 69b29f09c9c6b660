//! Trains the syllable+morpheme model until it memorizes five sentences.
//!
//! cargo run --release --example train_memorize

use aglm::corpus::{build_vocabs, Corpus, VocabLimits};
use aglm::model::{ModelConfig, VocabSizes};
use aglm::toy::MEMORIZE;
use aglm::train::{encode_corpus, perplexity, train, TrainConfig};
use aglm::vocab::{BandSpec, VocabBundle};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = Corpus::parse(MEMORIZE)?;
    let vocabs = build_vocabs(&corpus, &corpus.annotations, VocabLimits::default())?;
    let bundle = VocabBundle {
        vocabs,
        lexicon: corpus.annotations.clone(),
    };
    let mut model = ModelConfig::small(VocabSizes::of(&bundle.vocabs));
    model.lstm_hidden = 32;
    model.bands = BandSpec::single(16);
    let cfg = TrainConfig {
        epochs: 200,
        batch_size: 1,
        lr: 0.5,
        lr_decay: 1.0,
        seed: 1,
        ..TrainConfig::default()
    };
    let data = encode_corpus(&corpus, &bundle, &model);
    let out = train(&model, &cfg, &data, &[], |m| {
        if m.epoch % 20 == 0 {
            println!("epoch {:3}  train ppl {:.3}", m.epoch, m.train_nll.exp());
        }
    })?;
    println!("final perplexity {:.3}", perplexity(&out.params, &data)?.value());
    Ok(())
}
