//! The `aglm` command line.
//!
//! Exit codes: 0 on success, 1 for runtime failures (I/O, empty input,
//! divergence) and 2 for usage, configuration and file-format errors.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{ConfigError, KvConfig};
use crate::corpus::{build_vocabs, Corpus, CorpusError, VocabLimits};
use crate::model::{
    full_softmax_count, param_breakdown, ModelConfig, ModelError, ModelParams, VocabSizes, MODEL_KEYS,
};
use crate::predict::{
    kss_evaluate, repl, KssOptions, KssReport, ModelPredictor, PredictError, Predictor, ReplError,
    ScriptedPredictor, ZeroPredictor,
};
use crate::train::{
    encode_corpus, perplexity, train, Checkpoint, CheckpointError, TrainConfig, TrainError, TRAIN_KEYS,
};
use crate::vocab::{SegmenterLexicon, VocabBundle, VocabError, VocabKind};

#[derive(Debug, Parser)]
#[command(name = "aglm", version, about = "Syllable and morpheme language model for Korean text")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build word, morpheme, syllable and jamo vocabularies from a corpus.
    Vocab(VocabArgs),
    /// Train a model and write a checkpoint.
    Train(TrainArgs),
    /// Print the perplexity of a checkpoint on a corpus.
    EvalPpl(EvalPplArgs),
    /// Simulate a typist and report keystroke savings.
    EvalKss(EvalKssArgs),
    /// Read partial sentences on stdin and print completions.
    Predict(PredictArgs),
    /// Summarize a model configuration and its parameters.
    Inspect(InspectArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// `key = value` file applied over the defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override one key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct VocabArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Morpheme lexicon (`morpheme<TAB>count`) for words without annotations.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long)]
    pub max_words: Option<usize>,
    #[arg(long)]
    pub max_morphs: Option<usize>,
    #[arg(long)]
    pub max_syllable_types: Option<usize>,
    #[arg(long)]
    pub max_jamo_types: Option<usize>,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Directory written by `aglm vocab`.
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// Checkpoint path.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-epoch metrics; defaults to `<out>.metrics.tsv`.
    #[arg(long)]
    pub metrics: Option<PathBuf>,
    /// Starting point for model keys: `full` or `small`.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub embedding_mode: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub bptt_len: Option<usize>,
    #[arg(long)]
    pub lstm_hidden: Option<usize>,
    #[arg(long)]
    pub bands: Option<String>,
    #[arg(long)]
    pub valid_fraction: Option<f64>,
    /// Print per-epoch metrics to stderr.
    #[arg(long)]
    pub verbose: bool,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct EvalPplArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long)]
    pub corpus: PathBuf,
    /// Defaults to the vocabulary directory recorded in the checkpoint.
    #[arg(long)]
    pub vocab: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EvalKssArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// `model`, `zero`, `oracle` or `script:PATH`.
    #[arg(long, default_value = "model")]
    pub predictor: String,
    #[arg(long, default_value_t = 3)]
    pub suggestions: usize,
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub selection_cost: u8,
    /// Do not count the space after each word.
    #[arg(long)]
    pub exclude_separators: bool,
    /// Write `line<TAB>total<TAB>pressed<TAB>saved` rows here.
    #[arg(long)]
    pub per_sentence: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub suggestions: usize,
}

#[derive(Debug, Clone, Default, Args)]
pub struct InspectArgs {
    #[arg(long, conflicts_with = "full_size", required_unless_present = "full_size")]
    pub checkpoint: Option<PathBuf>,
    /// Full-size configuration over 200K words, 20K morphemes, 3K syllables.
    #[arg(long)]
    pub full_size: bool,
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(msg: impl ToString) -> Self {
        CliError {
            code: 2,
            message: msg.to_string(),
        }
    }

    pub fn runtime(msg: impl ToString) -> Self {
        CliError {
            code: 1,
            message: msg.to_string(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::usage(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::runtime(e)
    }
}

impl From<VocabError> for CliError {
    fn from(e: VocabError) -> Self {
        match &e {
            VocabError::EmptyCorpus | VocabError::Io { .. } => CliError::runtime(e),
            VocabError::File { source, .. } if matches!(**source, VocabError::Io { .. }) => CliError::runtime(e),
            _ => CliError::usage(e),
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::Io { .. } => CliError::runtime(e),
            CorpusError::Vocab(v) => v.into(),
            _ => CliError::usage(e),
        }
    }
}

impl From<CheckpointError> for CliError {
    fn from(e: CheckpointError) -> Self {
        match e {
            CheckpointError::Io { .. } => CliError::runtime(e),
            _ => CliError::usage(e),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Config(_) | ModelError::Vocab(_) | ModelError::Layout(_) => CliError::usage(e),
            _ => CliError::runtime(e),
        }
    }
}

impl From<TrainError> for CliError {
    fn from(e: TrainError) -> Self {
        match e {
            TrainError::Model(m) => m.into(),
            TrainError::Config(c) => c.into(),
            _ => CliError::runtime(e),
        }
    }
}

impl From<PredictError> for CliError {
    fn from(e: PredictError) -> Self {
        match e {
            PredictError::Model(m) => m.into(),
            PredictError::EmptyCorpus => CliError::runtime(e),
            _ => CliError::usage(e),
        }
    }
}

impl From<ReplError> for CliError {
    fn from(e: ReplError) -> Self {
        match e {
            ReplError::Io(e) => e.into(),
            ReplError::Predict(e) => e.into(),
        }
    }
}

/// Settings for `vocab`.
pub const VOCAB_KEYS: [&str; 4] = ["max_words", "max_morphs", "max_syllable_types", "max_jamo_types"];

/// Settings for `train` besides the model and training keys.
pub const RUN_KEYS: [&str; 3] = ["preset", "corpus", "vocab"];

/// Keys accepted by `train --config` and `--set`.
pub fn train_schema() -> Vec<&'static str> {
    RUN_KEYS.iter().chain(&MODEL_KEYS).chain(&TRAIN_KEYS).copied().collect()
}

/// Layered `key = value` configuration: defaults, then a file, then flags.
/// Every key must belong to the schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    schema: Vec<&'static str>,
    kv: KvConfig,
}

impl RunConfig {
    pub fn new(schema: Vec<&'static str>) -> Self {
        RunConfig {
            schema,
            kv: KvConfig::new(),
        }
    }

    pub fn check(&self, kv: &KvConfig) -> Result<(), ConfigError> {
        match kv.keys().find(|k| !self.schema.contains(k)) {
            Some(k) => Err(ConfigError::UnknownKey(k.to_string())),
            None => Ok(()),
        }
    }

    /// Overlays `kv` after checking its keys.
    pub fn layer(&mut self, kv: &KvConfig) -> Result<(), ConfigError> {
        self.check(kv)?;
        self.kv.merge(kv);
        Ok(())
    }

    pub fn layer_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
        let kv = KvConfig::parse(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        Ok(self.layer(&kv)?)
    }

    /// Applies `KEY=VALUE` overrides.
    pub fn layer_sets(&mut self, sets: &[String]) -> Result<(), ConfigError> {
        let mut kv = KvConfig::new();
        for s in sets {
            let (k, v) = s.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: 0,
                msg: format!("--set expects KEY=VALUE, got {s:?}"),
            })?;
            kv.set(k.trim(), v.trim());
        }
        self.layer(&kv)
    }

    pub fn set(&mut self, key: &str, value: impl std::fmt::Display) -> Result<(), ConfigError> {
        let mut kv = KvConfig::new();
        kv.set(key, value);
        self.layer(&kv)
    }

    pub fn kv(&self) -> &KvConfig {
        &self.kv
    }
}

fn layered(schema: Vec<&'static str>, defaults: &KvConfig, args: &ConfigArgs, flags: &KvConfig) -> Result<RunConfig, CliError> {
    let mut rc = RunConfig::new(schema);
    rc.layer(defaults)?;
    if let Some(path) = &args.config {
        rc.layer_file(path)?;
    }
    rc.layer(flags)?;
    rc.layer_sets(&args.set)?;
    Ok(rc)
}

fn flag(kv: &mut KvConfig, key: &str, value: Option<impl std::fmt::Display>) {
    if let Some(v) = value {
        kv.set(key, v);
    }
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))
}

/// `1234567` as `1,234,567`.
pub fn group_thousands(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::new();
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

fn echo_header(kv: &KvConfig) -> String {
    kv.iter().map(|(k, v)| format!("# {k} = {v}\n")).collect()
}

/// Reads the `# key = value` lines at the top of an artifact back.
pub fn parse_echo_header(text: &str) -> Result<KvConfig, ConfigError> {
    let body: String = text
        .lines()
        .map_while(|l| l.strip_prefix("# "))
        .map(|l| format!("{l}\n"))
        .collect();
    KvConfig::parse(&body)
}

pub fn cmd_vocab(args: &VocabArgs, out: &mut impl Write) -> Result<(), CliError> {
    let defaults = VocabLimits::default();
    let mut def = KvConfig::new();
    def.set("max_words", defaults.max_words);
    def.set("max_morphs", defaults.max_morphs);
    def.set("max_syllable_types", defaults.max_syllables);
    def.set("max_jamo_types", defaults.max_jamo);
    let mut flags = KvConfig::new();
    flag(&mut flags, "max_words", args.max_words);
    flag(&mut flags, "max_morphs", args.max_morphs);
    flag(&mut flags, "max_syllable_types", args.max_syllable_types);
    flag(&mut flags, "max_jamo_types", args.max_jamo_types);
    let rc = layered(VOCAB_KEYS.to_vec(), &def, &args.config, &flags)?;
    let kv = rc.kv();
    let limits = VocabLimits {
        max_words: kv.require("max_words")?,
        max_morphs: kv.require("max_morphs")?,
        max_syllables: kv.require("max_syllable_types")?,
        max_jamo: kv.require("max_jamo_types")?,
    };

    let corpus = Corpus::read(&args.corpus)?;
    let mut lexicon = match &args.lexicon {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
            SegmenterLexicon::from_text(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?
        }
        None => SegmenterLexicon::new(),
    };
    lexicon.merge(&corpus.annotations);
    let vocabs = build_vocabs(&corpus, &lexicon, limits)?;
    let bundle = VocabBundle { vocabs, lexicon };
    bundle.write_dir(&args.out)?;
    write_file(&args.out.join("vocab.conf"), kv.to_text())?;

    let tokens = corpus.word_count();
    let covered = corpus.words().filter(|w| bundle.vocabs.word.get(w.as_str()).is_some()).count();
    for kind in VocabKind::ALL {
        writeln!(out, "{}\t{}", kind.as_str(), bundle.vocabs.get(kind).len())?;
    }
    writeln!(out, "tokens\t{tokens}")?;
    writeln!(
        out,
        "word_coverage\t{:.2}",
        100.0 * covered as f64 / tokens.max(1) as f64
    )?;
    writeln!(out, "oov_tokens\t{}", tokens - covered)?;
    Ok(())
}

fn preset_defaults(preset: &str) -> Result<KvConfig, CliError> {
    // Vocabulary sizes are placeholders; the real ones come from the files.
    let sizes = VocabSizes {
        word: 0,
        morph: 0,
        syllable: 0,
        jamo: 0,
    };
    let cfg = match preset {
        "full" => ModelConfig::full_size(sizes),
        "small" => ModelConfig::small(sizes),
        _ => return Err(CliError::usage(format!("unknown preset {preset:?} (full, small)"))),
    };
    let mut all = KvConfig::new();
    cfg.write_kv(&mut all);
    let mut kv = KvConfig::new();
    for k in MODEL_KEYS {
        kv.set(k, all.get(k).unwrap_or_default());
    }
    TrainConfig::default().write_kv(&mut kv);
    Ok(kv)
}

/// The settings `train` will run with.
#[derive(Debug, Clone)]
pub struct ResolvedTrain {
    pub corpus: PathBuf,
    pub vocab: PathBuf,
    pub bundle: VocabBundle,
    pub model: ModelConfig,
    pub train: TrainConfig,
    /// Run keys echoed into the checkpoint.
    pub run: KvConfig,
}

impl ResolvedTrain {
    /// Every resolved key, as echoed into the metrics file.
    pub fn echo(&self) -> KvConfig {
        let mut kv = self.run.clone();
        self.model.write_kv(&mut kv);
        self.train.write_kv(&mut kv);
        kv
    }
}

/// Merges defaults, the config file and flags, loads the vocabularies and
/// validates everything before any corpus is read.
pub fn resolve_train(args: &TrainArgs) -> Result<ResolvedTrain, CliError> {
    let mut flags = KvConfig::new();
    flag(&mut flags, "preset", args.preset.as_ref());
    flag(&mut flags, "corpus", args.corpus.as_ref().map(|p| p.display()));
    flag(&mut flags, "vocab", args.vocab.as_ref().map(|p| p.display()));
    flag(&mut flags, "embedding_mode", args.embedding_mode.as_ref());
    flag(&mut flags, "seed", args.seed);
    flag(&mut flags, "epochs", args.epochs);
    flag(&mut flags, "lr", args.lr);
    flag(&mut flags, "batch_size", args.batch_size);
    flag(&mut flags, "bptt_len", args.bptt_len);
    flag(&mut flags, "lstm_hidden", args.lstm_hidden);
    flag(&mut flags, "bands", args.bands.as_ref());
    flag(&mut flags, "valid_fraction", args.valid_fraction);

    // The preset picks the defaults, so find it first.
    let overlay = layered(train_schema(), &KvConfig::new(), &args.config, &flags)?;
    let preset = overlay.kv().get("preset").unwrap_or("full").to_string();
    let mut defaults = preset_defaults(&preset)?;
    defaults.set("preset", &preset);
    let rc = layered(train_schema(), &defaults, &args.config, &flags)?;
    let kv = rc.kv();

    let corpus: PathBuf = kv.require::<String>("corpus")?.into();
    let vocab: PathBuf = kv.require::<String>("vocab")?.into();
    let bundle = VocabBundle::read_dir(&vocab)?;
    let mut model_kv = KvConfig::new();
    for k in MODEL_KEYS {
        if let Some(v) = kv.get(k) {
            model_kv.set(k, v);
        }
    }
    let sizes = VocabSizes::of(&bundle.vocabs);
    model_kv.set("word_vocab", sizes.word);
    model_kv.set("morph_vocab", sizes.morph);
    model_kv.set("syllable_vocab", sizes.syllable);
    model_kv.set("jamo_vocab", sizes.jamo);

    let model = ModelConfig::from_kv(&model_kv);
    let train = TrainConfig::from_kv(kv);
    let (model, train) = match (model, train) {
        (Ok(m), Ok(t)) => (m, t),
        (m, t) => {
            let errs: Vec<String> = [m.err(), t.err()].into_iter().flatten().map(|e| e.to_string()).collect();
            return Err(CliError::usage(errs.join("; ")));
        }
    };
    let mut run = KvConfig::new();
    for k in RUN_KEYS {
        run.set(k, kv.get(k).unwrap_or_default());
    }
    Ok(ResolvedTrain {
        corpus,
        vocab,
        bundle,
        model,
        train,
        run,
    })
}

pub fn cmd_train(args: &TrainArgs, out: &mut impl Write) -> Result<(), CliError> {
    let resolved = resolve_train(args)?;
    let corpus = Corpus::read(&resolved.corpus)?;
    let (train_part, valid_part) = corpus.split_tail(resolved.train.valid_fraction);
    let train_set = encode_corpus(&train_part, &resolved.bundle, &resolved.model);
    let valid_set = encode_corpus(&valid_part, &resolved.bundle, &resolved.model);

    let metrics_path = args
        .metrics
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.metrics.tsv", args.out.display())));
    let mut metrics = echo_header(&resolved.echo());
    metrics.push_str("epoch\ttrain_nll\tvalid_ppl\n");
    let verbose = args.verbose;
    let result = train(&resolved.model, &resolved.train, &train_set, &valid_set, |m| {
        metrics.push_str(&m.tsv_line());
        metrics.push('\n');
        if verbose {
            eprintln!("{}", m.tsv_line());
        }
    });
    write_file(&metrics_path, &metrics)?;
    let save = |params: ModelParams| {
        Checkpoint::new(params, resolved.train.clone(), resolved.run.clone(), &resolved.bundle.vocabs).save(&args.out)
    };
    match result {
        Ok(outcome) => {
            save(outcome.params)?;
            writeln!(out, "wrote {}", args.out.display())?;
            Ok(())
        }
        Err(TrainError::Diverged {
            epoch,
            update,
            last_good,
        }) => {
            save(*last_good)?;
            Err(CliError::runtime(format!(
                "training diverged in epoch {epoch} at update {update}; last good parameters saved to {}",
                args.out.display()
            )))
        }
        Err(e) => Err(e.into()),
    }
}

/// Loads a checkpoint and the vocabularies it was trained with.
pub fn load_model(checkpoint: &Path, vocab: Option<&Path>) -> Result<(Checkpoint, VocabBundle), CliError> {
    let ckpt = Checkpoint::load(checkpoint)?;
    let dir = match vocab {
        Some(d) => d.to_path_buf(),
        None => ckpt
            .run
            .get("vocab")
            .map(PathBuf::from)
            .ok_or_else(|| CliError::usage("checkpoint names no vocabulary directory; pass --vocab"))?,
    };
    let bundle = VocabBundle::read_dir(&dir)?;
    ckpt.verify_vocabs(&bundle.vocabs)?;
    Ok((ckpt, bundle))
}

pub fn cmd_eval_ppl(args: &EvalPplArgs, out: &mut impl Write) -> Result<(), CliError> {
    let (ckpt, bundle) = load_model(&args.checkpoint, args.vocab.as_deref())?;
    let corpus = Corpus::read(&args.corpus)?;
    let data = encode_corpus(&corpus, &bundle, ckpt.model_config());
    let ppl = perplexity(&ckpt.params, &data)?;
    if ppl.tokens == 0 {
        return Err(CliError::runtime("corpus has no sentences"));
    }
    writeln!(out, "{:.2}", ppl.value())?;
    Ok(())
}

pub fn cmd_eval_kss(args: &EvalKssArgs, out: &mut impl Write) -> Result<(), CliError> {
    let corpus = Corpus::read(&args.corpus)?;
    let options = KssOptions {
        suggestions: args.suggestions,
        selection_cost: args.selection_cost as usize,
        count_separators: !args.exclude_separators,
    };
    fn run<P: Predictor>(p: &P, c: &Corpus, o: KssOptions) -> Result<KssReport, CliError> {
        Ok(kss_evaluate(p, c, o)?)
    }
    let report = match args.predictor.as_str() {
        "model" => {
            let path = args
                .checkpoint
                .as_deref()
                .ok_or_else(|| CliError::usage("--predictor model needs --checkpoint"))?;
            let (ckpt, bundle) = load_model(path, args.vocab.as_deref())?;
            run(&ModelPredictor::new(&ckpt.params, &bundle)?, &corpus, options)?
        }
        "zero" => run(&ZeroPredictor, &corpus, options)?,
        "oracle" => run(&ScriptedPredictor::oracle(&corpus), &corpus, options)?,
        other => match other.strip_prefix("script:") {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| CliError::runtime(format!("{path}: {e}")))?;
                run(&ScriptedPredictor::parse(&text)?, &corpus, options)?
            }
            None => {
                return Err(CliError::usage(format!(
                    "unknown predictor {other:?} (model, zero, oracle, script:PATH)"
                )))
            }
        },
    };
    if let Some(path) = &args.per_sentence {
        write_file(path, report.tsv())?;
    }
    out.write_all(report.summary().as_bytes())?;
    Ok(())
}

pub fn cmd_predict(args: &PredictArgs, input: impl BufRead, out: &mut impl Write) -> Result<(), CliError> {
    let (ckpt, bundle) = load_model(&args.checkpoint, args.vocab.as_deref())?;
    let predictor = ModelPredictor::new(&ckpt.params, &bundle)?;
    repl(&predictor, input, out, args.suggestions)?;
    Ok(())
}

/// Configuration, tensor shapes, parameter totals and band layout.
pub fn describe(config: &ModelConfig) -> Result<String, CliError> {
    let params = ModelParams::zeros(config)?;
    let breakdown = param_breakdown(config)?;
    let mut s = String::new();
    let mut kv = KvConfig::new();
    config.write_kv(&mut kv);
    s.push_str(&kv.to_text());
    s.push_str("\ntensors\n");
    for spec in params.specs() {
        let dims: Vec<String> = spec.shape.iter().map(usize::to_string).collect();
        let _ = writeln!(s, "  {}\t[{}]\t{}", spec.name, dims.join(", "), group_thousands(spec.size()));
    }
    s.push_str("\nbands\n");
    for band in config.bands.resolve(config.vocab.word)? {
        let _ = writeln!(s, "  [{},{}):{}", band.ids.start, band.ids.end, band.rank);
    }
    let full = full_softmax_count(config);
    let _ = write!(
        s,
        "\nparameters\n  embedding\t{}\n  highway\t{}\n  lstm\t{}\n  softmax\t{}\n  total\t{}\n\
         full_softmax\t{}\ncompression\t{:.2}x\n",
        group_thousands(breakdown.embedding),
        group_thousands(breakdown.highway),
        group_thousands(breakdown.lstm),
        group_thousands(breakdown.softmax),
        group_thousands(breakdown.total()),
        group_thousands(full),
        full as f64 / breakdown.softmax as f64,
    );
    Ok(s)
}

/// Vocabulary sizes of the full-size setting.
pub fn full_size_vocab() -> VocabSizes {
    VocabSizes {
        word: 200_000,
        morph: 20_000,
        syllable: 3_000,
        jamo: 200,
    }
}

pub fn cmd_inspect(args: &InspectArgs, out: &mut impl Write) -> Result<(), CliError> {
    let text = match &args.checkpoint {
        Some(path) => {
            let ckpt = Checkpoint::load(path)?;
            let mut t = String::new();
            for (k, v) in ckpt.run.iter() {
                let _ = writeln!(t, "run.{k} = {v}");
            }
            let mut train = KvConfig::new();
            ckpt.train.write_kv(&mut train);
            for (k, v) in train.iter() {
                let _ = writeln!(t, "train.{k} = {v}");
            }
            t.push_str(&describe(ckpt.model_config())?);
            t
        }
        None => describe(&ModelConfig::full_size(full_size_vocab()))?,
    };
    out.write_all(text.as_bytes())?;
    Ok(())
}

/// Runs one parsed command line against the given stdin and stdout.
pub fn run(cli: &Cli, input: impl BufRead, out: &mut impl Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Vocab(a) => cmd_vocab(a, out),
        Command::Train(a) => cmd_train(a, out),
        Command::EvalPpl(a) => cmd_eval_ppl(a, out),
        Command::EvalKss(a) => cmd_eval_kss(a, out),
        Command::Predict(a) => cmd_predict(a, input, out),
        Command::Inspect(a) => cmd_inspect(a, out),
    }
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let stdin = io::stdin();
    let stdout = io::stdout();
    match run(&cli, stdin.lock(), &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("aglm: {e}");
            ExitCode::from(e.code)
        }
    }
}
