//! Keystroke savings of scripted, zero and oracle predictors.
//!
//! cargo run --example kss_simulation

use aglm::corpus::Corpus;
use aglm::predict::{kss_evaluate, KssOptions, ScriptedPredictor, ZeroPredictor};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // 학교 is offered after two keys of the first word.
    let corpus = Corpus::parse("학교 가자\n")?;
    let script = ScriptedPredictor::parse("1\t0\t2\t학교\n")?;
    for (name, options) in [
        ("default", KssOptions::default()),
        (
            "selection costs a key",
            KssOptions {
                selection_cost: 1,
                ..KssOptions::default()
            },
        ),
        (
            "spaces not counted",
            KssOptions {
                count_separators: false,
                ..KssOptions::default()
            },
        ),
    ] {
        let r = kss_evaluate(&script, &corpus, options)?;
        println!("{name:22} total {:2} pressed {:2} saved {:2}  kss {:.2}%", r.total, r.pressed, r.saved, r.kss_percent());
    }
    let zero = kss_evaluate(&ZeroPredictor, &corpus, KssOptions::default())?;
    let oracle = kss_evaluate(&ScriptedPredictor::oracle(&corpus), &corpus, KssOptions::default())?;
    println!("zero predictor         kss {:.2}%", zero.kss_percent());
    println!("oracle predictor       kss {:.2}%", oracle.kss_percent());
    Ok(())
}
