use std::fs;
use std::path::Path;

use super::{SegmenterLexicon, VocabError, VocabKind, Vocabs, Vocabulary};
use crate::hangul::Word;

pub const LEXICON_FILE: &str = "lexicon.tsv";
pub const ANNOTATIONS_FILE: &str = "annotations.tsv";

/// The four vocabularies plus the segmenter state needed to encode words.
#[derive(Debug, Clone)]
pub struct VocabBundle {
    pub vocabs: Vocabs,
    pub lexicon: SegmenterLexicon,
}

pub fn vocab_file_name(kind: VocabKind) -> String {
    format!("{}.vocab", kind.as_str())
}

fn read(path: &Path) -> Result<String, VocabError> {
    fs::read_to_string(path).map_err(|source| VocabError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn in_file<T>(path: &Path, r: Result<T, VocabError>) -> Result<T, VocabError> {
    r.map_err(|e| VocabError::File {
        path: path.display().to_string(),
        source: Box::new(e),
    })
}

impl VocabBundle {
    /// Writes `<kind>.vocab` for each kind, the lexicon and the annotations.
    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<(), VocabError> {
        let dir = dir.as_ref();
        let io = |path: &Path, source| VocabError::Io {
            path: path.display().to_string(),
            source,
        };
        fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        let mut files: Vec<(String, String)> = VocabKind::ALL
            .iter()
            .map(|&k| (vocab_file_name(k), self.vocabs.get(k).to_text()))
            .collect();
        files.push((LEXICON_FILE.into(), self.lexicon.to_text()));
        files.push((ANNOTATIONS_FILE.into(), self.lexicon.annotations_to_text()));
        for (name, text) in files {
            let path = dir.join(name);
            fs::write(&path, text).map_err(|e| io(&path, e))?;
        }
        Ok(())
    }

    pub fn read_dir(dir: impl AsRef<Path>) -> Result<Self, VocabError> {
        let dir = dir.as_ref();
        let load = |kind: VocabKind| -> Result<Vocabulary, VocabError> {
            let path = dir.join(vocab_file_name(kind));
            let v = in_file(&path, Vocabulary::from_text(&read(&path)?))?;
            if v.kind() != kind {
                return in_file(
                    &path,
                    Err(VocabError::Format {
                        line: 1,
                        msg: format!("expected a {} vocabulary", kind.as_str()),
                    }),
                );
            }
            Ok(v)
        };
        let vocabs = Vocabs {
            word: load(VocabKind::Word)?,
            morph: load(VocabKind::Morpheme)?,
            syllable: load(VocabKind::Syllable)?,
            jamo: load(VocabKind::Jamo)?,
        };
        let lex_path = dir.join(LEXICON_FILE);
        let mut lexicon = in_file(&lex_path, SegmenterLexicon::from_text(&read(&lex_path)?))?;
        let ann_path = dir.join(ANNOTATIONS_FILE);
        if ann_path.exists() {
            let text = read(&ann_path)?;
            in_file(&ann_path, lexicon.load_annotations(&text))?;
        }
        Ok(VocabBundle { vocabs, lexicon })
    }

    pub fn encode(&self, word: &Word, max_syllables: usize, max_jamo: usize) -> super::WordFeatures {
        super::encode_word(word, &self.vocabs, &self.lexicon, max_syllables, max_jamo)
    }
}
