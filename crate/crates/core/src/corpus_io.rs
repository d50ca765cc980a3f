//! Labeled document collections: loading, validation, class sets and
//! train/test splitting.
//!
//! Two on-disk layouts are supported:
//!
//! * JSON Lines, one `{"id": .., "text": .., "label": ..}` object per line
//!   (`label` optional).
//! * A directory of `<id>.txt` files plus a `labels.csv` with header
//!   `id,label`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// File name of the label table inside a directory corpus.
pub const LABELS_FILE: &str = "labels.csv";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: Option<&str>) -> Self {
        Document {
            id: id.into(),
            text: text.into(),
            label: label.map(str::to_owned),
        }
    }

    pub fn labeled(id: impl Into<String>, text: impl Into<String>, label: impl Into<String>) -> Self {
        Document {
            id: id.into(),
            text: text.into(),
            label: Some(label.into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Jsonl,
    DirCsv,
}

impl CorpusFormat {
    /// Directories are read as `dir+csv`, everything else as JSON Lines.
    pub fn detect(path: &Path) -> Self {
        if path.is_dir() {
            CorpusFormat::DirCsv
        } else {
            CorpusFormat::Jsonl
        }
    }
}

/// Ordered, duplicate-free class names; position is the class index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassSet {
    classes: Vec<String>,
}

impl ClassSet {
    /// Builds a class set from arbitrary names, sorting and deduplicating.
    pub fn from_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = names.into_iter().map(Into::into).collect();
        ClassSet {
            classes: set.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.classes
    }

    pub fn name(&self, idx: usize) -> Option<&str> {
        self.classes.get(idx).map(String::as_str)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.classes.binary_search_by(|c| c.as_str().cmp(name)).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSplit {
    pub train: Vec<Document>,
    pub test: Vec<Document>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum LabelField {
    One(String),
    Many(Vec<String>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonlRecord {
    id: String,
    text: String,
    #[serde(default)]
    label: Option<LabelField>,
}

pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<Vec<Document>> {
    let docs = match format {
        CorpusFormat::Jsonl => {
            let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            parse_jsonl(&raw, &path.display().to_string())?
        }
        CorpusFormat::DirCsv => load_dir(path)?,
    };
    finish(docs)
}

/// Parses JSON Lines text. Blank lines are skipped; line numbers in errors
/// are 1-based.
pub fn parse_jsonl(raw: &str, source_name: &str) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    for (lineno, line) in raw.lines().enumerate() {
        let line_no = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec: JsonlRecord =
            serde_json::from_str(line).map_err(|e| Error::parse(source_name, line_no, e.to_string()))?;
        if rec.id.is_empty() {
            return Err(Error::parse(source_name, line_no, "empty document id"));
        }
        let label = match rec.label {
            None => None,
            Some(LabelField::One(l)) => Some(l),
            Some(LabelField::Many(mut ls)) => match ls.len() {
                0 => None,
                1 => ls.pop(),
                _ => return Err(Error::MultiLabelUnsupported(rec.id)),
            },
        };
        if label.as_deref() == Some("") {
            return Err(Error::parse(source_name, line_no, "empty label"));
        }
        docs.push(Document {
            id: rec.id,
            text: rec.text,
            label,
        });
    }
    Ok(docs)
}

fn load_dir(dir: &Path) -> Result<Vec<Document>> {
    let mut texts = BTreeMap::new();
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if path.extension().and_then(|e| e.to_str()) != Some("txt") || !path.is_file() {
            continue;
        }
        let Some(id) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        texts.insert(id.to_owned(), text);
    }

    let labels_path = dir.join(LABELS_FILE);
    let labels = if labels_path.exists() {
        read_labels_csv(&labels_path)?
    } else {
        BTreeMap::new()
    };
    for (id, (line, _)) in &labels {
        if !texts.contains_key(id) {
            return Err(Error::parse(
                labels_path.display().to_string(),
                *line,
                format!("label for `{id}` but no `{id}.txt`"),
            ));
        }
    }

    Ok(texts
        .into_iter()
        .map(|(id, text)| {
            let label = labels.get(&id).map(|(_, l)| l.clone());
            Document { id, text, label }
        })
        .collect())
}

/// Reads an `id,label` table. Returns id -> (line, label).
fn read_labels_csv(path: &Path) -> Result<BTreeMap<String, (usize, String)>> {
    let name = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::parse(&name, 1, e.to_string()))?;

    let headers = reader
        .headers()
        .map_err(|e| Error::parse(&name, 1, e.to_string()))?
        .clone();
    if headers.len() != 2 || &headers[0] != "id" || &headers[1] != "label" {
        return Err(Error::parse(&name, 1, "expected header `id,label`"));
    }

    let mut out: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::parse(&name, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let (id, label) = (record[0].trim(), record[1].trim());
        if id.is_empty() || label.is_empty() {
            return Err(Error::parse(&name, line, "empty id or label"));
        }
        if let Some((_, prev)) = out.get(id) {
            return Err(if prev == label {
                Error::DuplicateId(id.to_owned())
            } else {
                Error::MultiLabelUnsupported(id.to_owned())
            });
        }
        out.insert(id.to_owned(), (line, label.to_owned()));
    }
    Ok(out)
}

fn finish(mut docs: Vec<Document>) -> Result<Vec<Document>> {
    docs.sort_by(|a, b| a.id.cmp(&b.id));
    if let Some(w) = docs.windows(2).find(|w| w[0].id == w[1].id) {
        return Err(Error::DuplicateId(w[0].id.clone()));
    }
    Ok(docs)
}

/// Writes documents as JSON Lines, in the order given.
pub fn write_jsonl<W: Write>(docs: &[Document], mut out: W) -> std::io::Result<()> {
    for doc in docs {
        serde_json::to_writer(&mut out, doc)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn derive_class_set(docs: &[Document]) -> Result<ClassSet> {
    let mut names = BTreeSet::new();
    for doc in docs {
        match &doc.label {
            Some(l) => {
                names.insert(l.as_str());
            }
            None => return Err(Error::MissingLabel(doc.id.clone())),
        }
    }
    Ok(ClassSet::from_names(names))
}

/// Deterministic seeded split. `floor(test_fraction * n)` documents go to
/// the test side; both sides come back sorted by id.
pub fn split_corpus(docs: &[Document], test_fraction: f64, seed: u64) -> Result<CorpusSplit> {
    if !(0.0..1.0).contains(&test_fraction) {
        return Err(Error::InvalidFraction(test_fraction));
    }
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let n_test = (test_fraction * docs.len() as f64).floor() as usize;

    let mut order: Vec<usize> = (0..docs.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let mut is_test = vec![false; docs.len()];
    for &i in &order[..n_test] {
        is_test[i] = true;
    }
    let (mut test, mut train): (Vec<_>, Vec<_>) = docs
        .iter()
        .cloned()
        .zip(is_test)
        .partition(|(_, t)| *t);
    train.sort_by(|a, b| a.0.id.cmp(&b.0.id));
    test.sort_by(|a, b| a.0.id.cmp(&b.0.id));
    Ok(CorpusSplit {
        train: train.into_iter().map(|(d, _)| d).collect(),
        test: test.into_iter().map(|(d, _)| d).collect(),
    })
}
