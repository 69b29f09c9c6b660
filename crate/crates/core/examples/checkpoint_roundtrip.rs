//! Saves a checkpoint, loads it back and shows that the bytes are stable.
//!
//! cargo run --example checkpoint_roundtrip

use aglm::config::KvConfig;
use aglm::corpus::{build_vocabs, Corpus, VocabLimits};
use aglm::model::{ModelConfig, ModelParams, VocabSizes};
use aglm::toy::MEMORIZE;
use aglm::train::{Checkpoint, TrainConfig};
use aglm::vocab::BandSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = Corpus::parse(MEMORIZE)?;
    let vocabs = build_vocabs(&corpus, &corpus.annotations, VocabLimits::default())?;
    let mut cfg = ModelConfig::small(VocabSizes::of(&vocabs));
    cfg.bands = BandSpec::single(8);
    let mut params = ModelParams::init(&cfg, 7)?;
    params.quantize_f32();
    let mut run = KvConfig::new();
    run.set("note", "example");
    let ckpt = Checkpoint::new(params, TrainConfig::default(), run, &vocabs);

    let bytes = ckpt.to_bytes();
    let again = Checkpoint::from_bytes(&bytes)?;
    println!("{} bytes, {} tensors", bytes.len(), again.params.tensors().len());
    println!("reload identical: {}", again.to_bytes() == bytes);
    println!("params equal: {}", again.params == ckpt.params);
    println!("vocabularies accepted: {}", again.verify_vocabs(&vocabs).is_ok());
    print!("{}", again.header_text().lines().take(6).map(|l| format!("  {l}\n")).collect::<String>());

    let mut broken = bytes.clone();
    broken[4] = 9;
    println!("version skew: {}", Checkpoint::from_bytes(&broken).unwrap_err());
    println!("truncated: {}", Checkpoint::from_bytes(&bytes[..bytes.len() - 3]).unwrap_err());
    Ok(())
}
