//! End-to-end training and the on-disk model file.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus_io::{derive_class_set, Document};
use crate::error::{Error, Result};
use crate::eval::EvalReport;
use crate::features::{build_corpus_index, corpus_features, document_features, ReductionStats, DEFAULT_THRESHOLD};
use crate::fuzzy::{build_membership_table, LabeledMatrix};
use crate::svm::{train_ovr, FeatureMode, Hyperparams, OvrModel, Prediction};
use crate::text_prep::Resources;

pub const MODEL_VERSION: &str = "fscmm-model/1";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainSettings {
    pub threshold: u64,
    pub feature_mode: FeatureMode,
    pub hyperparams: Hyperparams,
}

impl Default for TrainSettings {
    fn default() -> Self {
        TrainSettings {
            threshold: DEFAULT_THRESHOLD,
            feature_mode: FeatureMode::default(),
            hyperparams: Hyperparams::default(),
        }
    }
}

/// A trained classifier together with the resources needed to prepare new
/// documents for it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub version: String,
    pub resources: Resources,
    pub reduction: ReductionStats,
    #[serde(flatten)]
    pub model: OvrModel,
}

/// Runs preparation, indexing, membership analysis and one-vs-rest training
/// over a labeled corpus.
pub fn train_model(docs: &[Document], resources: Resources, settings: &TrainSettings) -> Result<ModelFile> {
    settings.hyperparams.validate()?;
    let class_set = derive_class_set(docs)?;
    if class_set.len() < 2 {
        return Err(Error::NotEnoughClasses(class_set.len()));
    }

    let features = corpus_features(docs, &resources);
    let index = build_corpus_index(&features, &resources.thesaurus, settings.threshold)?;
    let reduction = ReductionStats::compute(docs, &features, &index);
    log::info!(
        "vocabulary: {} raw terms, {} after thesaurus, {} after threshold {}",
        reduction.raw_distinct,
        reduction.post_thesaurus,
        reduction.post_threshold,
        settings.threshold
    );

    let matrix = LabeledMatrix::from_documents(index, docs)?;
    let membership = build_membership_table(&matrix)?;
    let model = train_ovr(&matrix, &membership, settings.feature_mode, &settings.hyperparams)?;

    Ok(ModelFile {
        version: MODEL_VERSION.to_owned(),
        resources,
        reduction,
        model,
    })
}

impl ModelFile {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(raw: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(raw)?;
        match value.get("version").and_then(|v| v.as_str()) {
            Some(MODEL_VERSION) => {}
            Some(other) => return Err(Error::UnsupportedModelVersion(other.to_owned())),
            None => return Err(Error::UnsupportedModelVersion("<missing>".to_owned())),
        }
        let file: ModelFile = serde_json::from_value(value)?;
        file.model.validate().map_err(|e| Error::InvalidModel(e.to_string()))?;
        Ok(file)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&raw)
    }

    pub fn predict(&self, doc: &Document) -> Result<Prediction> {
        self.model
            .predict(doc, &self.resources.stopwords, &self.resources.thesaurus)
    }

    /// Predictions for many documents, in input order.
    pub fn predict_all(&self, docs: &[Document]) -> Result<Vec<Prediction>> {
        let lookup = self.model.index.lookup();
        docs.par_iter()
            .map(|d| {
                let irfv = document_features(d, &self.resources.stopwords, &self.resources.thesaurus).irfv;
                self.model.predict_row(&lookup.project(&irfv))
            })
            .collect()
    }

    /// Scores predictions against gold labels. Every document must carry a
    /// label known to the model.
    pub fn evaluate(&self, docs: &[Document]) -> Result<EvalReport> {
        let classes = &self.model.class_set;
        let gold = docs
            .iter()
            .map(|d| {
                let label = d.label.as_deref().ok_or_else(|| Error::MissingLabel(d.id.clone()))?;
                classes.index_of(label).ok_or_else(|| Error::UnknownClass(label.to_owned()))
            })
            .collect::<Result<Vec<_>>>()?;
        let predictions = self.predict_all(docs)?;
        let pairs: Vec<(usize, usize)> = gold.into_iter().zip(predictions.iter().map(|p| p.class_idx)).collect();
        EvalReport::from_pairs(classes, &pairs, self.reduction.reduction_ratio())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text_prep::{PseudoThesaurus, StopWordList};

    fn corpus() -> Vec<Document> {
        vec![
            Document::labeled("td1", "F1 F3.", "C1"),
            Document::labeled("td2", "F1. F2 F2 F2.", "C2"),
            Document::labeled("td3", "F2 F3. F2.", "C2"),
            Document::labeled("td4", "F1 F1. F1 F1.", "C3"),
        ]
    }

    fn resources() -> Resources {
        Resources::new(
            StopWordList::empty(),
            PseudoThesaurus::new(["f1", "f2", "f3"], std::iter::empty::<(&str, &str)>()).unwrap(),
        )
    }

    #[test]
    fn trains_reference_corpus() {
        let settings = TrainSettings { threshold: 1, ..Default::default() };
        let m = train_model(&corpus(), resources(), &settings).unwrap();
        assert_eq!(m.model.index.features, ["f1", "f2", "f3"]);
        assert_eq!(m.model.binaries.len(), 3);
        assert_eq!(m.reduction.post_threshold, 3);

        let back = ModelFile::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn single_class_rejected() {
        let docs = vec![Document::labeled("a", "f1.", "X"), Document::labeled("b", "f2.", "X")];
        assert!(matches!(
            train_model(&docs, resources(), &TrainSettings::default()),
            Err(Error::NotEnoughClasses(1))
        ));
    }

    #[test]
    fn model_version_checked() {
        let m = train_model(&corpus(), resources(), &TrainSettings { threshold: 1, ..Default::default() }).unwrap();
        let raw = m.to_json().unwrap().replace(MODEL_VERSION, "fscmm-model/9");
        assert!(matches!(ModelFile::from_json(&raw), Err(Error::UnsupportedModelVersion(v)) if v == "fscmm-model/9"));
    }

    #[test]
    fn evaluation_label_checks() {
        let m = train_model(&corpus(), resources(), &TrainSettings { threshold: 1, ..Default::default() }).unwrap();
        let unknown = [Document::labeled("q", "f1", "C9")];
        assert!(matches!(m.evaluate(&unknown), Err(Error::UnknownClass(c)) if c == "C9"));
        let unlabeled = [Document::new("q", "f1", None)];
        assert!(matches!(m.evaluate(&unlabeled), Err(Error::MissingLabel(_))));
    }
}
