//! Sentence extraction, tokenization, stop-word removal and thesaurus
//! stemming.
//!
//! Concept selection is lexical: a token survives when it is not a stop
//! word and its stem is either a thesaurus vocabulary entry or a numeral.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus_io::Document;
use crate::error::{Error, Result};

const BUILTIN_STOPWORDS: &str = include_str!("../resources/stopwords.txt");
const BUILTIN_THESAURUS: &str = include_str!("../resources/thesaurus.tsv");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceTokens {
    /// 1-based position of the sentence within its document.
    pub sentence_index: usize,
    pub tokens: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StopWordList {
    words: BTreeSet<String>,
}

impl StopWordList {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        StopWordList {
            words: words
                .into_iter()
                .map(|w| w.as_ref().trim().to_lowercase())
                .filter(|w| !w.is_empty())
                .collect(),
        }
    }

    /// One word per line; `#` starts a comment.
    pub fn parse(raw: &str) -> Self {
        Self::from_words(raw.lines().map(|l| l.split('#').next().unwrap_or("")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&raw))
    }

    pub fn builtin() -> Self {
        Self::parse(BUILTIN_STOPWORDS)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Vocabulary of valid stems plus a variant -> stem table.
///
/// An *open* thesaurus accepts every token as valid; combined with an empty
/// stem table it leaves tokens untouched.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PseudoThesaurus {
    vocabulary: BTreeSet<String>,
    stem_map: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    open: bool,
}

impl PseudoThesaurus {
    /// Accepts every token and maps nothing.
    pub fn open() -> Self {
        PseudoThesaurus {
            open: true,
            ..Default::default()
        }
    }

    /// Builds a thesaurus from stems and `(variant, stem)` pairs. Every
    /// referenced stem joins the vocabulary.
    pub fn new<V, M, S, T, U>(vocabulary: V, mappings: M) -> Result<Self>
    where
        V: IntoIterator<Item = S>,
        M: IntoIterator<Item = (T, U)>,
        S: AsRef<str>,
        T: AsRef<str>,
        U: AsRef<str>,
    {
        let mut b = Builder::default();
        for s in vocabulary {
            b.stem(s.as_ref());
        }
        for (v, s) in mappings {
            b.map(v.as_ref(), s.as_ref(), 0, "<memory>")?;
        }
        b.finish("<memory>")
    }

    /// Parses the TSV format: `variant<TAB>stem` or a lone `stem` per line.
    pub fn parse(raw: &str, source_name: &str) -> Result<Self> {
        let mut b = Builder::default();
        for (i, line) in raw.lines().enumerate() {
            let line_no = i + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split('\t').map(str::trim).collect();
            match fields.as_slice() {
                [stem] => b.stem(stem),
                [variant, stem] if !variant.is_empty() && !stem.is_empty() => {
                    b.map(variant, stem, line_no, source_name)?
                }
                _ => {
                    return Err(Error::parse(
                        source_name,
                        line_no,
                        "expected `stem` or `variant<TAB>stem`",
                    ))
                }
            }
        }
        b.finish(source_name)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&raw, &path.display().to_string())
    }

    pub fn builtin() -> Self {
        Self::parse(BUILTIN_THESAURUS, "builtin thesaurus").expect("bundled thesaurus is well-formed")
    }

    pub fn is_open(&self) -> bool {
        self.open
    }

    pub fn vocabulary(&self) -> &BTreeSet<String> {
        &self.vocabulary
    }

    pub fn stem_of<'a>(&'a self, token: &'a str) -> &'a str {
        self.stem_map.get(token).map_or(token, String::as_str)
    }

    /// Whether `term` may stand as a feature: vocabulary member or numeral.
    pub fn accepts(&self, term: &str) -> bool {
        self.open || is_numeral(term) || self.vocabulary.contains(term)
    }
}

#[derive(Default)]
struct Builder {
    vocabulary: BTreeSet<String>,
    stem_map: BTreeMap<String, (String, usize)>,
}

impl Builder {
    fn stem(&mut self, stem: &str) {
        self.vocabulary.insert(stem.to_lowercase());
    }

    fn map(&mut self, variant: &str, stem: &str, line: usize, source: &str) -> Result<()> {
        let (variant, stem) = (variant.to_lowercase(), stem.to_lowercase());
        if let Some((prev, _)) = self.stem_map.get(&variant) {
            if *prev != stem {
                return Err(Error::parse(
                    source,
                    line,
                    format!("`{variant}` already maps to `{prev}`"),
                ));
            }
        }
        self.vocabulary.insert(stem.clone());
        self.stem_map.insert(variant, (stem, line));
        Ok(())
    }

    fn finish(self, source: &str) -> Result<PseudoThesaurus> {
        // Stems must be fixed points, otherwise stemming is not idempotent.
        for (variant, (stem, line)) in &self.stem_map {
            if let Some((next, _)) = self.stem_map.get(stem) {
                if next != stem {
                    return Err(Error::parse(
                        source,
                        *line,
                        format!("stem `{stem}` of `{variant}` is itself mapped to `{next}`"),
                    ));
                }
            }
        }
        Ok(PseudoThesaurus {
            vocabulary: self.vocabulary,
            stem_map: self
                .stem_map
                .into_iter()
                .filter(|(v, (s, _))| v != s)
                .map(|(v, (s, _))| (v, s))
                .collect(),
            open: false,
        })
    }
}

/// Stop words and thesaurus used together by every preparation step.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resources {
    pub stopwords: StopWordList,
    pub thesaurus: PseudoThesaurus,
}

impl Resources {
    pub fn new(stopwords: StopWordList, thesaurus: PseudoThesaurus) -> Self {
        Resources { stopwords, thesaurus }
    }

    pub fn builtin() -> Self {
        Resources::new(StopWordList::builtin(), PseudoThesaurus::builtin())
    }

    pub fn load(stopwords: &Path, thesaurus: &Path) -> Result<Self> {
        Ok(Resources::new(
            StopWordList::load(stopwords)?,
            PseudoThesaurus::load(thesaurus)?,
        ))
    }
}

pub fn is_numeral(token: &str) -> bool {
    !token.is_empty() && token.chars().all(char::is_numeric)
}

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '?' | '!')
}

/// Splits at `.`, `?` or `!` when followed by whitespace or end of input.
/// Whitespace around sentences is trimmed and blank pieces are dropped.
pub fn extract_sentences(text: &str) -> Vec<String> {
    let mut sentences = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if !is_terminator(c) {
            continue;
        }
        let at_boundary = chars.peek().is_none_or(|&(_, next)| next.is_whitespace());
        if at_boundary {
            let end = i + c.len_utf8();
            push_trimmed(&mut sentences, &text[start..end]);
            start = end;
        }
    }
    push_trimmed(&mut sentences, &text[start..]);
    sentences
}

fn push_trimmed(out: &mut Vec<String>, piece: &str) {
    let piece = piece.trim();
    if !piece.is_empty() {
        out.push(piece.to_owned());
    }
}

/// Maximal runs of alphanumeric characters, lowercased.
pub fn tokenize(sentence: &str) -> Vec<String> {
    sentence
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

pub fn filter_and_stem(tokens: &[String], stops: &StopWordList, thesaurus: &PseudoThesaurus) -> Vec<String> {
    tokens
        .iter()
        .filter(|t| !stops.contains(t))
        .map(|t| thesaurus.stem_of(t))
        .filter(|s| !stops.contains(s) && thesaurus.accepts(s))
        .map(str::to_owned)
        .collect()
}

pub fn prepare_text(text: &str, stops: &StopWordList, thesaurus: &PseudoThesaurus) -> Vec<SentenceTokens> {
    extract_sentences(text)
        .iter()
        .enumerate()
        .map(|(i, s)| SentenceTokens {
            sentence_index: i + 1,
            tokens: filter_and_stem(&tokenize(s), stops, thesaurus),
        })
        .collect()
}

pub fn prepare_document(doc: &Document, stops: &StopWordList, thesaurus: &PseudoThesaurus) -> Vec<SentenceTokens> {
    prepare_text(&doc.text, stops, thesaurus)
}
