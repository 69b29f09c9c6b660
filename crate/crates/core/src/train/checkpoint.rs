//! Binary checkpoint layout, little-endian throughout:
//!
//! ```text
//! "AGLM"  u16 version
//! u32 header length, header text (key = value lines)
//! u32 tensor count, then per tensor:
//!     u16 name length, name, u8 rank, u32 dims, u64 payload byte offset
//! u64 payload length, payload (f32 values)
//! ```

use std::fs;
use std::path::Path;

use thiserror::Error;

use super::TrainConfig;
use crate::config::{ConfigError, KvConfig};
use crate::model::{tensor_specs, ModelConfig, ModelParams};
use crate::numerics::{Tensor, PRNG_ID};
use crate::vocab::{VocabKind, Vocabs};

pub const MAGIC: [u8; 4] = *b"AGLM";
pub const FORMAT_VERSION: u16 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("not a checkpoint (bad magic)")]
    BadMagic,
    #[error("checkpoint format version {found}, this build reads {supported}")]
    VersionSkew { found: u16, supported: u16 },
    #[error("checkpoint is truncated")]
    Truncated,
    #[error("checkpoint was trained with a different {0} vocabulary")]
    HashMismatch(VocabKind),
    #[error("malformed checkpoint: {0}")]
    Format(String),
    #[error("checkpoint config: {0}")]
    Config(#[from] ConfigError),
}

#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub params: ModelParams,
    pub train: TrainConfig,
    /// Resolved run settings echoed for provenance.
    pub run: KvConfig,
    pub vocab_hashes: [[u8; 32]; 4],
    pub prng: String,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn unhex(s: &str) -> Option<[u8; 32]> {
    if s.len() != 64 || !s.is_ascii() {
        return None;
    }
    let mut out = [0u8; 32];
    for (i, o) in out.iter_mut().enumerate() {
        *o = u8::from_str_radix(&s[2 * i..2 * i + 2], 16).ok()?;
    }
    Some(out)
}

fn prefixed(kv: &KvConfig, prefix: &str) -> KvConfig {
    let mut out = KvConfig::new();
    for (k, v) in kv.iter() {
        if let Some(rest) = k.strip_prefix(prefix) {
            out.set(rest, v);
        }
    }
    out
}

struct Reader<'b> {
    bytes: &'b [u8],
    pos: usize,
}

impl<'b> Reader<'b> {
    fn take(&mut self, n: usize) -> Result<&'b [u8], CheckpointError> {
        let end = self.pos.checked_add(n).ok_or(CheckpointError::Truncated)?;
        let out = self.bytes.get(self.pos..end).ok_or(CheckpointError::Truncated)?;
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8, CheckpointError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, CheckpointError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, CheckpointError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, CheckpointError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

impl Checkpoint {
    pub fn new(params: ModelParams, train: TrainConfig, run: KvConfig, vocabs: &Vocabs) -> Self {
        Checkpoint {
            params,
            train,
            run,
            vocab_hashes: vocabs.hashes(),
            prng: PRNG_ID.to_string(),
        }
    }

    pub fn model_config(&self) -> &ModelConfig {
        self.params.config()
    }

    /// Header text as stored in the file.
    pub fn header_text(&self) -> String {
        let mut kv = KvConfig::new();
        let mut model = KvConfig::new();
        self.params.config().write_kv(&mut model);
        for (k, v) in model.iter() {
            kv.set(&format!("model.{k}"), v);
        }
        let mut train = KvConfig::new();
        self.train.write_kv(&mut train);
        for (k, v) in train.iter() {
            kv.set(&format!("train.{k}"), v);
        }
        for (k, v) in self.run.iter() {
            kv.set(&format!("run.{k}"), v);
        }
        for (kind, h) in VocabKind::ALL.iter().zip(&self.vocab_hashes) {
            kv.set(&format!("vocab.{}", kind.as_str()), hex(h));
        }
        kv.set("prng", &self.prng);
        kv.to_text()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let header = self.header_text();
        let mut out = Vec::new();
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(header.len() as u32).to_le_bytes());
        out.extend_from_slice(header.as_bytes());
        let specs = self.params.specs();
        out.extend_from_slice(&(specs.len() as u32).to_le_bytes());
        let mut offset = 0u64;
        for spec in specs {
            out.extend_from_slice(&(spec.name.len() as u16).to_le_bytes());
            out.extend_from_slice(spec.name.as_bytes());
            out.push(spec.shape.len() as u8);
            for d in &spec.shape {
                out.extend_from_slice(&(*d as u32).to_le_bytes());
            }
            out.extend_from_slice(&offset.to_le_bytes());
            offset += 4 * spec.size() as u64;
        }
        out.extend_from_slice(&offset.to_le_bytes());
        for t in self.params.tensors() {
            for v in t.data() {
                out.extend_from_slice(&(*v as f32).to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CheckpointError> {
        let mut r = Reader { bytes, pos: 0 };
        let magic = r.take(4).map_err(|_| CheckpointError::BadMagic)?;
        if magic != MAGIC {
            return Err(CheckpointError::BadMagic);
        }
        let version = r.u16()?;
        if version != FORMAT_VERSION {
            return Err(CheckpointError::VersionSkew {
                found: version,
                supported: FORMAT_VERSION,
            });
        }
        let header_len = r.u32()? as usize;
        let header = std::str::from_utf8(r.take(header_len)?)
            .map_err(|_| CheckpointError::Format("header is not UTF-8".into()))?;
        let kv = KvConfig::parse(header)?;
        let model = ModelConfig::from_kv(&prefixed(&kv, "model."))?;
        let train = TrainConfig::from_kv(&prefixed(&kv, "train."))?;
        let run = prefixed(&kv, "run.");
        let mut vocab_hashes = [[0u8; 32]; 4];
        for (kind, slot) in VocabKind::ALL.iter().zip(vocab_hashes.iter_mut()) {
            let key = format!("vocab.{}", kind.as_str());
            *slot = kv
                .get(&key)
                .and_then(unhex)
                .ok_or_else(|| CheckpointError::Format(format!("missing or bad {key}")))?;
        }
        let prng = kv
            .get("prng")
            .ok_or_else(|| CheckpointError::Format("missing prng".into()))?
            .to_string();

        let (specs, _) = tensor_specs(&model).map_err(|e| CheckpointError::Format(e.to_string()))?;
        let count = r.u32()? as usize;
        if count != specs.len() {
            return Err(CheckpointError::Format(format!(
                "{count} tensors, config implies {}",
                specs.len()
            )));
        }
        let mut expected_offset = 0u64;
        for spec in &specs {
            let name_len = r.u16()? as usize;
            let name = r.take(name_len)?;
            let rank = r.u8()? as usize;
            let mut shape = Vec::with_capacity(rank);
            for _ in 0..rank {
                shape.push(r.u32()? as usize);
            }
            let offset = r.u64()?;
            if name != spec.name.as_bytes() || shape != spec.shape || offset != expected_offset {
                return Err(CheckpointError::Format(format!(
                    "tensor directory entry for {} does not match the config",
                    spec.name
                )));
            }
            expected_offset += 4 * spec.size() as u64;
        }
        let payload_len = r.u64()?;
        if payload_len != expected_offset {
            return Err(CheckpointError::Format("payload length mismatch".into()));
        }
        let mut tensors = Vec::with_capacity(specs.len());
        for spec in &specs {
            let raw = r.take(4 * spec.size())?;
            let data = raw
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
                .collect();
            tensors.push(Tensor::new(&spec.shape, data).map_err(|e| CheckpointError::Format(e.to_string()))?);
        }
        if r.pos != bytes.len() {
            return Err(CheckpointError::Format("trailing bytes after payload".into()));
        }
        let params = ModelParams::from_tensors(&model, tensors).map_err(|e| CheckpointError::Format(e.to_string()))?;
        Ok(Checkpoint {
            params,
            train,
            run,
            vocab_hashes,
            prng,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), CheckpointError> {
        let path = path.as_ref();
        fs::write(path, self.to_bytes()).map_err(|source| CheckpointError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, CheckpointError> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|source| CheckpointError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_bytes(&bytes)
    }

    /// Refuses vocabularies other than the ones used for training.
    pub fn verify_vocabs(&self, vocabs: &Vocabs) -> Result<(), CheckpointError> {
        for ((kind, want), got) in VocabKind::ALL.iter().zip(&self.vocab_hashes).zip(vocabs.hashes()) {
            if *want != got {
                return Err(CheckpointError::HashMismatch(*kind));
            }
        }
        Ok(())
    }
}
