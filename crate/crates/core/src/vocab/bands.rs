use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use super::VocabError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandSize {
    Count(usize),
    /// Everything not claimed by earlier bands.
    Remainder,
}

/// Frequency bands of the output vocabulary with a factorization rank each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandSpec {
    bands: Vec<(BandSize, usize)>,
}

/// One resolved band: an id range of the output vocabulary and its rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Band {
    pub ids: Range<usize>,
    pub rank: usize,
}

impl Band {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

impl BandSpec {
    /// Ranks must be positive and non-increasing; only the last band may be
    /// a remainder.
    pub fn new(bands: Vec<(BandSize, usize)>) -> Result<Self, VocabError> {
        let invalid = |m: &str| Err(VocabError::InvalidBands(m.to_string()));
        if bands.is_empty() {
            return invalid("no bands");
        }
        for (i, (size, rank)) in bands.iter().enumerate() {
            if *rank == 0 {
                return invalid("ranks must be positive");
            }
            if i > 0 && *rank > bands[i - 1].1 {
                return invalid("ranks must be non-increasing from frequent to rare bands");
            }
            match size {
                BandSize::Count(0) => return invalid("band sizes must be positive"),
                BandSize::Remainder if i + 1 != bands.len() => {
                    return invalid("only the last band may be a remainder")
                }
                _ => {}
            }
        }
        Ok(BandSpec { bands })
    }

    /// The 5K/20K/rest split with ranks 152/52/12.
    pub fn full_size() -> Self {
        BandSpec::new(vec![
            (BandSize::Count(5000), 152),
            (BandSize::Count(20000), 52),
            (BandSize::Remainder, 12),
        ])
        .expect("valid default")
    }

    /// One band over everything at `rank`.
    pub fn single(rank: usize) -> Self {
        BandSpec::new(vec![(BandSize::Remainder, rank)]).expect("valid single band")
    }

    pub fn bands(&self) -> &[(BandSize, usize)] {
        &self.bands
    }

    pub fn resolve(&self, vocab_size: usize) -> Result<Vec<Band>, VocabError> {
        let mut out = Vec::with_capacity(self.bands.len());
        let mut start = 0;
        for (size, rank) in &self.bands {
            let end = match size {
                BandSize::Count(n) => start + n,
                BandSize::Remainder => vocab_size,
            };
            if end > vocab_size {
                return Err(VocabError::BandOverflow {
                    needed: end,
                    size: vocab_size,
                });
            }
            if end == start {
                return Err(VocabError::InvalidBands(
                    "remainder band would be empty".to_string(),
                ));
            }
            out.push(Band {
                ids: start..end,
                rank: *rank,
            });
            start = end;
        }
        if start != vocab_size {
            return Err(VocabError::InvalidBands(format!(
                "bands cover {start} of {vocab_size} words; end with a remainder band or match the size"
            )));
        }
        Ok(out)
    }
}

/// Splits `0..vocab_size` into contiguous frequency bands.
pub fn band_partition(vocab_size: usize, spec: &BandSpec) -> Result<Vec<Band>, VocabError> {
    spec.resolve(vocab_size)
}

/// `5000:152,20000:52,*:12`
impl fmt::Display for BandSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (size, rank)) in self.bands.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            match size {
                BandSize::Count(n) => write!(f, "{n}:{rank}")?,
                BandSize::Remainder => write!(f, "*:{rank}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for BandSpec {
    type Err = VocabError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || VocabError::InvalidBands(format!("cannot parse {s:?}; expected e.g. 5000:152,*:12"));
        let mut bands = Vec::new();
        for part in s.split(',') {
            let (size, rank) = part.trim().split_once(':').ok_or_else(bad)?;
            let size = match size.trim() {
                "*" => BandSize::Remainder,
                n => BandSize::Count(n.parse().map_err(|_| bad())?),
            };
            bands.push((size, rank.trim().parse().map_err(|_| bad())?));
        }
        BandSpec::new(bands)
    }
}
