//! Next-word completion depends on the preceding words.
//!
//! cargo run --release --example predict_context

use aglm::corpus::{build_vocabs, Corpus, VocabLimits};
use aglm::model::{ModelConfig, VocabSizes};
use aglm::predict::ModelPredictor;
use aglm::toy::MEMORIZE;
use aglm::train::{encode_corpus, train, TrainConfig};
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
        ..TrainConfig::default()
    };
    let data = encode_corpus(&corpus, &bundle, &model);
    let params = train(&model, &cfg, &data, &[], |_| {})?.params;

    let predictor = ModelPredictor::new(&params, &bundle)?;
    for (context, typed) in [("비가 많이", ""), ("밥을 많이", ""), ("", ""), ("오늘", "ㅈ"), ("그가 책을", "이")] {
        let ctx = predictor.context_for(context)?;
        let shown: Vec<String> = predictor
            .complete(&ctx, typed, 3)
            .iter()
            .map(|c| format!("{} ({:.2})", c.word, c.log_prob.exp()))
            .collect();
        println!("{context:>10} + {typed:2} -> {}", shown.join(", "));
    }
    Ok(())
}
