//! Batch commands behind the `fscmm` binary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus_io::{load_corpus, split_corpus, CorpusFormat, Document};
use crate::error::{Error, Result};
use crate::eval::{knn_baseline, EvalReport};
use crate::features::{build_corpus_index, corpus_features, document_features, ReductionStats};
use crate::fuzzy::LabeledMatrix;
use crate::pipeline::{train_model, ModelFile, TrainSettings};
use crate::text_prep::Resources;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub corpus: PathBuf,
    pub format: Option<CorpusFormat>,
    pub stopwords: PathBuf,
    pub thesaurus: PathBuf,
    pub settings: TrainSettings,
    /// Share of the corpus held out for a post-training report; 0 trains
    /// on everything.
    pub test_fraction: f64,
    pub seed: u64,
    pub out: PathBuf,
}

pub fn read_corpus(path: &Path, format: Option<CorpusFormat>) -> Result<Vec<Document>> {
    load_corpus(path, format.unwrap_or_else(|| CorpusFormat::detect(path)))
}

#[derive(Debug, Clone, Serialize)]
pub struct TrainSummary {
    pub model_path: PathBuf,
    pub documents: usize,
    pub classes: Vec<String>,
    pub threshold: u64,
    pub reduction: ReductionStats,
    pub reduction_ratio: f64,
    pub holdout: Option<EvalReport>,
}

impl TrainSummary {
    pub fn render(&self) -> String {
        let r = &self.reduction;
        let mut out = String::new();
        let _ = writeln!(out, "trained on {} documents, {} classes", self.documents, self.classes.len());
        let _ = writeln!(out, "features (raw distinct terms):    {}", r.raw_distinct);
        let _ = writeln!(out, "features (after thesaurus):       {}", r.post_thesaurus);
        let _ = writeln!(out, "features (after threshold TV={}):  {}", self.threshold, r.post_threshold);
        let _ = writeln!(out, "reduction ratio:                  {:.4}", self.reduction_ratio);
        if let Some(report) = &self.holdout {
            let _ = writeln!(out, "\nheld-out evaluation");
            out.push_str(&report.render_table());
        }
        let _ = writeln!(out, "model written to {}", self.model_path.display());
        out
    }
}

pub fn cmd_train(config: &RunConfig) -> Result<TrainSummary> {
    let resources = Resources::load(&config.stopwords, &config.thesaurus)?;
    let docs = read_corpus(&config.corpus, config.format)?;
    let (train, test) = if config.test_fraction > 0.0 {
        let split = split_corpus(&docs, config.test_fraction, config.seed)?;
        (split.train, split.test)
    } else {
        (docs, Vec::new())
    };

    let model = train_model(&train, resources, &config.settings)?;
    let holdout = if test.is_empty() {
        None
    } else {
        Some(model.evaluate(&test)?)
    };
    model.save(&config.out)?;

    Ok(TrainSummary {
        model_path: config.out.clone(),
        documents: train.len(),
        classes: model.model.class_set.names().to_vec(),
        threshold: config.settings.threshold,
        reduction: model.reduction,
        reduction_ratio: model.reduction.reduction_ratio(),
        holdout,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub id: String,
    pub predicted: String,
    pub scores: BTreeMap<String, f64>,
}

pub fn predictions(model: &ModelFile, docs: &[Document]) -> Result<Vec<PredictionRecord>> {
    let names = model.model.class_set.names();
    Ok(docs
        .iter()
        .zip(model.predict_all(docs)?)
        .map(|(d, p)| PredictionRecord {
            id: d.id.clone(),
            predicted: p.class,
            scores: names.iter().cloned().zip(p.scores).collect(),
        })
        .collect())
}

pub fn write_jsonl<T: Serialize, W: Write>(records: &[T], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n").map_err(|e| Error::io("<output>", e))?;
    }
    out.flush().map_err(|e| Error::io("<output>", e))
}

/// Writes one JSON line per input document; returns the record count.
pub fn cmd_predict(model_path: &Path, input: &Path, out: &Path) -> Result<usize> {
    let model = ModelFile::load(model_path)?;
    let docs = read_corpus(input, None)?;
    let records = predictions(&model, &docs)?;
    let file = File::create(out).map_err(|e| Error::io(out, e))?;
    write_jsonl(&records, BufWriter::new(file))?;
    Ok(records.len())
}

pub fn cmd_evaluate(model_path: &Path, input: &Path) -> Result<EvalReport> {
    let model = ModelFile::load(model_path)?;
    model.evaluate(&read_corpus(input, None)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub feature: String,
    pub total_freq: u64,
    pub memberships: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureListing {
    pub classes: Vec<String>,
    pub features: Vec<FeatureRow>,
}

impl FeatureListing {
    pub fn render(&self) -> String {
        let width = self.features.iter().map(|f| f.feature.len()).chain([7]).max().unwrap_or(7);
        let col = self.classes.iter().map(String::len).chain([8]).max().unwrap_or(8);
        let mut out = format!("{:<width$} {:>10}", "feature", "total");
        for c in &self.classes {
            let _ = write!(out, " {c:>col$}");
        }
        out.push('\n');
        for f in &self.features {
            let _ = write!(out, "{:<width$} {:>10}", f.feature, f.total_freq);
            for m in &f.memberships {
                let _ = write!(out, " {m:>col$.4}");
            }
            out.push('\n');
        }
        out
    }
}

pub fn inspect_features(model: &ModelFile, top_k: usize) -> FeatureListing {
    let m = &model.model;
    FeatureListing {
        classes: m.class_set.names().to_vec(),
        features: m
            .index
            .features
            .iter()
            .zip(&m.index.total_freq)
            .zip(&m.membership.patterns)
            .take(top_k)
            .map(|((f, &total), p)| FeatureRow {
                feature: f.clone(),
                total_freq: total,
                memberships: p.memberships.clone(),
            })
            .collect(),
    }
}

pub fn cmd_inspect_features(model_path: &Path, top_k: usize) -> Result<FeatureListing> {
    Ok(inspect_features(&ModelFile::load(model_path)?, top_k))
}

#[derive(Debug, Clone)]
pub struct KnnConfig {
    pub corpus: PathBuf,
    pub stopwords: PathBuf,
    pub thesaurus: PathBuf,
    pub threshold: u64,
    pub k: usize,
    pub input: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnRecord {
    pub id: String,
    pub predicted: String,
}

#[derive(Debug, Clone)]
pub struct KnnOutcome {
    pub predictions: Vec<KnnRecord>,
    /// Present when every query document carries a known label.
    pub report: Option<EvalReport>,
}

pub fn knn_classify(
    train: &[Document],
    queries: &[Document],
    resources: &Resources,
    threshold: u64,
    k: usize,
) -> Result<KnnOutcome> {
    let features = corpus_features(train, resources);
    let index = build_corpus_index(&features, &resources.thesaurus, threshold)?;
    let reduction = ReductionStats::compute(train, &features, &index);
    let matrix = LabeledMatrix::from_documents(index, train)?;
    let lookup = matrix.index.lookup();

    let predicted = queries
        .iter()
        .map(|q| {
            let row = lookup.project(&document_features(q, &resources.stopwords, &resources.thesaurus).irfv);
            knn_baseline(&matrix, k, &row)
        })
        .collect::<Result<Vec<_>>>()?;

    let classes = &matrix.class_set;
    let gold: Option<Vec<usize>> = queries
        .iter()
        .map(|q| q.label.as_deref().and_then(|l| classes.index_of(l)))
        .collect();
    let report = match gold {
        Some(gold) if !queries.is_empty() => {
            let pairs: Vec<_> = gold.into_iter().zip(predicted.iter().copied()).collect();
            Some(EvalReport::from_pairs(classes, &pairs, reduction.reduction_ratio())?)
        }
        _ => None,
    };

    Ok(KnnOutcome {
        predictions: queries
            .iter()
            .zip(predicted)
            .map(|(q, c)| KnnRecord { id: q.id.clone(), predicted: classes.names()[c].clone() })
            .collect(),
        report,
    })
}

pub fn cmd_knn(config: &KnnConfig) -> Result<KnnOutcome> {
    let resources = Resources::load(&config.stopwords, &config.thesaurus)?;
    let train = read_corpus(&config.corpus, None)?;
    let queries = read_corpus(&config.input, None)?;
    knn_classify(&train, &queries, &resources, config.threshold, config.k)
}
