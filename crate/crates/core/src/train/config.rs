use crate::config::{ConfigError, KvConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    /// Sentences per update.
    pub batch_size: usize,
    pub bptt_len: usize,
    pub lr: f64,
    /// Multiplier applied once per epoch after `lr_decay_start`.
    pub lr_decay: f64,
    pub lr_decay_start: usize,
    pub clip_norm: f64,
    pub seed: u64,
    /// Share of sentences held out from the end of the corpus.
    pub valid_fraction: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 13,
            batch_size: 20,
            bptt_len: 35,
            lr: 1.0,
            lr_decay: 0.5,
            lr_decay_start: 4,
            clip_norm: 5.0,
            seed: 1,
            valid_fraction: 0.05,
        }
    }
}

pub const TRAIN_KEYS: [&str; 9] = [
    "epochs",
    "batch_size",
    "bptt_len",
    "lr",
    "lr_decay",
    "lr_decay_start",
    "clip_norm",
    "seed",
    "valid_fraction",
];

impl TrainConfig {
    /// Learning rate for 1-based `epoch`.
    pub fn lr_at(&self, epoch: usize) -> f64 {
        let decays = epoch.saturating_sub(self.lr_decay_start);
        self.lr * self.lr_decay.powi(decays as i32)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if self.epochs == 0 || self.batch_size == 0 || self.bptt_len == 0 {
            return bad("epochs, batch_size and bptt_len must be positive");
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return bad("lr must be positive");
        }
        if !(self.lr_decay > 0.0 && self.lr_decay <= 1.0) {
            return bad("lr_decay must lie in (0, 1]");
        }
        if !(self.clip_norm > 0.0 && self.clip_norm.is_finite()) {
            return bad("clip_norm must be positive");
        }
        if !(0.0..1.0).contains(&self.valid_fraction) {
            return bad("valid_fraction must lie in [0, 1)");
        }
        Ok(())
    }

    pub fn write_kv(&self, kv: &mut KvConfig) {
        kv.set("epochs", self.epochs);
        kv.set("batch_size", self.batch_size);
        kv.set("bptt_len", self.bptt_len);
        kv.set("lr", self.lr);
        kv.set("lr_decay", self.lr_decay);
        kv.set("lr_decay_start", self.lr_decay_start);
        kv.set("clip_norm", self.clip_norm);
        kv.set("seed", self.seed);
        kv.set("valid_fraction", self.valid_fraction);
    }

    pub fn from_kv(kv: &KvConfig) -> Result<Self, ConfigError> {
        let cfg = TrainConfig {
            epochs: kv.require("epochs")?,
            batch_size: kv.require("batch_size")?,
            bptt_len: kv.require("bptt_len")?,
            lr: kv.require("lr")?,
            lr_decay: kv.require("lr_decay")?,
            lr_decay_start: kv.require("lr_decay_start")?,
            clip_norm: kv.require("clip_norm")?,
            seed: kv.require("seed")?,
            valid_fraction: kv.require("valid_fraction")?,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
