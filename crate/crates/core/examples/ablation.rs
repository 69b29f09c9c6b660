//! Held-out perplexity of the embedding modes on a generated corpus with
//! identical budgets. Takes a few minutes per run in release mode.
//!
//! cargo run --release --example ablation -- word,syl+morph 1,2,3

use aglm::model::EmbeddingMode;
use aglm::toy::{Ablation, AblationSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let modes: Vec<EmbeddingMode> = args
        .first()
        .map_or("word,syl+morph", String::as_str)
        .split(',')
        .map(str::parse)
        .collect::<Result<_, _>>()?;
    let seeds: Vec<u64> = args.get(1).map_or("1", String::as_str).split(',').map(str::parse).collect::<Result<_, _>>()?;

    let ablation = Ablation::prepare(AblationSpec::default())?;
    let v = &ablation.bundle.vocabs;
    println!(
        "train {} words, held out {} words; vocab word {} morph {} syllable {}",
        ablation.train_set.word_count(),
        ablation.valid_set.word_count(),
        v.word.len(),
        v.morph.len(),
        v.syllable.len()
    );
    for mode in modes {
        let mut ppls = Vec::new();
        for &seed in &seeds {
            let ppl = ablation.run(mode, seed, |m| eprintln!("  {mode} seed {seed} {}", m.tsv_line()))?;
            println!("{mode:10} seed {seed}  held-out ppl {ppl:.2}");
            ppls.push(ppl);
        }
        println!("{mode:10} mean {:.2}", ppls.iter().sum::<f64>() / ppls.len() as f64);
    }
    Ok(())
}
