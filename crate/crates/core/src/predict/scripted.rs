use super::{PredictError, Predictor};
use crate::corpus::Corpus;
use crate::hangul::Word;

/// Suggestions offered at one point of a sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptRule {
    /// Corpus line the rule applies to; `None` matches every line.
    pub line: Option<usize>,
    /// Number of words already committed in the sentence.
    pub position: usize,
    /// Keys that must be typed before the suggestions appear.
    pub min_typed: usize,
    pub suggestions: Vec<String>,
}

/// A predictor that follows a fixed script, for hand-checked fixtures.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScriptedPredictor {
    pub rules: Vec<ScriptRule>,
}

impl ScriptedPredictor {
    pub fn new(rules: Vec<ScriptRule>) -> Self {
        ScriptedPredictor { rules }
    }

    /// Suggests every intended word before its first key.
    pub fn oracle(corpus: &Corpus) -> Self {
        let rules = corpus
            .sentences
            .iter()
            .flat_map(|s| {
                s.words.iter().enumerate().map(|(i, w)| ScriptRule {
                    line: Some(s.line),
                    position: i,
                    min_typed: 0,
                    suggestions: vec![w.as_str().to_string()],
                })
            })
            .collect();
        ScriptedPredictor { rules }
    }

    /// Parses `line<TAB>position<TAB>min_typed<TAB>word word ...` rows;
    /// `*` as the line matches all lines. `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self, PredictError> {
        let mut rules = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            if raw.trim().is_empty() || raw.starts_with('#') {
                continue;
            }
            let err = |msg: &str| PredictError::Script {
                line: i + 1,
                msg: msg.to_string(),
            };
            let fields: Vec<&str> = raw.split('\t').collect();
            let [line, position, min_typed, words] = fields.as_slice() else {
                return Err(err("expected 4 tab-separated fields"));
            };
            let line = match *line {
                "*" => None,
                l => Some(l.parse().map_err(|_| err("bad line number"))?),
            };
            rules.push(ScriptRule {
                line,
                position: position.parse().map_err(|_| err("bad position"))?,
                min_typed: min_typed.parse().map_err(|_| err("bad min_typed"))?,
                suggestions: words.split_whitespace().map(str::to_string).collect(),
            });
        }
        Ok(ScriptedPredictor { rules })
    }
}

impl Predictor for ScriptedPredictor {
    /// (corpus line, words committed)
    type Context = (usize, usize);

    fn start(&self, line: usize) -> Result<(usize, usize), PredictError> {
        Ok((line, 0))
    }

    fn advance(&self, ctx: &(usize, usize), _word: &Word) -> Result<(usize, usize), PredictError> {
        Ok((ctx.0, ctx.1 + 1))
    }

    fn suggest(&self, ctx: &(usize, usize), typed: &[char], n: usize) -> Vec<String> {
        self.rules
            .iter()
            .filter(|r| r.line.is_none_or(|l| l == ctx.0) && r.position == ctx.1 && typed.len() >= r.min_typed)
            .flat_map(|r| r.suggestions.iter().cloned())
            .take(n)
            .collect()
    }
}
