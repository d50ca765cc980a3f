//! Three-level feature construction.
//!
//! Sentence token lists become reduced feature vectors (one entry per
//! distinct term with its count), a document's sentence vectors are summed
//! into one integrated vector, and the integrated vectors of a corpus are
//! merged into a frequency-ordered vocabulary with a threshold cutoff and a
//! document x feature count matrix.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus_io::Document;
use crate::error::{Error, Result};
use crate::text_prep::{prepare_document, tokenize, PseudoThesaurus, Resources, StopWordList};

/// Default minimum corpus-total frequency for a feature to be kept.
pub const DEFAULT_THRESHOLD: u64 = 2;

/// Term -> occurrence count. Counts are always >= 1.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureVector {
    counts: BTreeMap<String, u64>,
}

impl FeatureVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, term: &str, count: u64) {
        if count == 0 {
            return;
        }
        *self.counts.entry(term.to_owned()).or_insert(0) += count;
    }

    /// Adds every count of `other` into `self`.
    pub fn merge(&mut self, other: &FeatureVector) {
        for (term, &count) in &other.counts {
            self.add(term, count);
        }
    }

    pub fn get(&self, term: &str) -> u64 {
        self.counts.get(term).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(t, &c)| (t.as_str(), c))
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

impl<S: AsRef<str>> FromIterator<(S, u64)> for FeatureVector {
    fn from_iter<I: IntoIterator<Item = (S, u64)>>(iter: I) -> Self {
        let mut fv = FeatureVector::new();
        for (t, c) in iter {
            fv.add(t.as_ref(), c);
        }
        fv
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentFeatures {
    pub doc_id: String,
    pub irfv: FeatureVector,
}

/// Counts each distinct token of one sentence.
pub fn build_sentence_rfv<S: AsRef<str>>(tokens: &[S]) -> FeatureVector {
    tokens.iter().map(|t| (t.as_ref(), 1)).collect()
}

/// Sums sentence vectors into the document's integrated vector.
pub fn integrate_document(rfvs: &[FeatureVector], doc_id: &str) -> DocumentFeatures {
    let mut irfv = FeatureVector::new();
    for rfv in rfvs {
        irfv.merge(rfv);
    }
    DocumentFeatures {
        doc_id: doc_id.to_owned(),
        irfv,
    }
}

/// Runs sentence preparation and both reduction levels for one document.
pub fn document_features(doc: &Document, stops: &StopWordList, thesaurus: &PseudoThesaurus) -> DocumentFeatures {
    let rfvs: Vec<FeatureVector> = prepare_document(doc, stops, thesaurus)
        .iter()
        .map(|s| build_sentence_rfv(&s.tokens))
        .collect();
    integrate_document(&rfvs, &doc.id)
}

pub fn corpus_features(docs: &[Document], resources: &Resources) -> Vec<DocumentFeatures> {
    docs.par_iter()
        .map(|d| document_features(d, &resources.stopwords, &resources.thesaurus))
        .collect()
}

/// Corpus vocabulary after cutoff, with the document x feature count matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusIndex {
    /// Terms by descending total frequency, ties ascending lexicographically.
    pub features: Vec<String>,
    /// Corpus-wide count per feature, parallel to `features`.
    pub total_freq: Vec<u64>,
    pub threshold: u64,
    /// Row labels of `matrix`, ascending.
    pub doc_ids: Vec<String>,
    /// Row-major counts: `matrix[g][i]` is document g's count of feature i.
    pub matrix: Vec<Vec<u64>>,
}

pub fn build_corpus_index(docs: &[DocumentFeatures], thesaurus: &PseudoThesaurus, threshold: u64) -> Result<CorpusIndex> {
    let mut rows: Vec<&DocumentFeatures> = docs.iter().collect();
    rows.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
    if let Some(w) = rows.windows(2).find(|w| w[0].doc_id == w[1].doc_id) {
        return Err(Error::DuplicateId(w[0].doc_id.clone()));
    }

    let mut totals = FeatureVector::new();
    for d in &rows {
        totals.merge(&d.irfv);
    }

    let mut kept: Vec<(&str, u64)> = totals
        .iter()
        .filter(|&(term, total)| total >= threshold && thesaurus.accepts(term))
        .collect();
    kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

    let features: Vec<String> = kept.iter().map(|(t, _)| (*t).to_owned()).collect();
    let total_freq: Vec<u64> = kept.iter().map(|&(_, c)| c).collect();
    let matrix = rows
        .iter()
        .map(|d| features.iter().map(|f| d.irfv.get(f)).collect())
        .collect();

    Ok(CorpusIndex {
        features,
        total_freq,
        threshold,
        doc_ids: rows.iter().map(|d| d.doc_id.clone()).collect(),
        matrix,
    })
}

impl CorpusIndex {
    pub fn num_features(&self) -> usize {
        self.features.len()
    }

    pub fn num_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn row_of(&self, doc_id: &str) -> Option<usize> {
        self.doc_ids.binary_search_by(|d| d.as_str().cmp(doc_id)).ok()
    }

    pub fn lookup(&self) -> FeatureLookup {
        FeatureLookup {
            positions: self
                .features
                .iter()
                .enumerate()
                .map(|(i, f)| (f.clone(), i))
                .collect(),
        }
    }

    pub fn column_total(&self, feature_idx: usize) -> u64 {
        self.matrix.iter().map(|row| row[feature_idx]).sum()
    }

    /// Checks the structural invariants; used when an index is read back
    /// from disk.
    pub fn validate(&self) -> Result<()> {
        let f = self.features.len();
        if self.total_freq.len() != f {
            return Err(Error::DimensionMismatch { expected: f, found: self.total_freq.len() });
        }
        if self.matrix.len() != self.doc_ids.len() {
            return Err(Error::DimensionMismatch { expected: self.doc_ids.len(), found: self.matrix.len() });
        }
        if let Some(row) = self.matrix.iter().find(|r| r.len() != f) {
            return Err(Error::DimensionMismatch { expected: f, found: row.len() });
        }
        if self.doc_ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("index doc_ids are not strictly ascending".into()));
        }
        let ordered = self
            .features
            .iter()
            .zip(&self.total_freq)
            .collect::<Vec<_>>()
            .windows(2)
            .all(|w| w[0].1 > w[1].1 || (w[0].1 == w[1].1 && w[0].0 < w[1].0));
        if !ordered {
            return Err(Error::InvalidArgument("index features are not in frequency order".into()));
        }
        for (i, &total) in self.total_freq.iter().enumerate() {
            if total < self.threshold || self.column_total(i) != total {
                return Err(Error::InvalidArgument(format!(
                    "feature `{}` total {total} inconsistent with matrix or threshold",
                    self.features[i]
                )));
            }
        }
        Ok(())
    }
}

/// Term -> feature position for one index.
#[derive(Debug, Clone)]
pub struct FeatureLookup {
    positions: HashMap<String, usize>,
}

impl FeatureLookup {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn position(&self, term: &str) -> Option<usize> {
        self.positions.get(term).copied()
    }

    /// Projects a document vector onto the index features; other terms are
    /// ignored.
    pub fn project(&self, irfv: &FeatureVector) -> Vec<u64> {
        let mut row = vec![0; self.positions.len()];
        for (term, count) in irfv.iter() {
            if let Some(i) = self.position(term) {
                row[i] = count;
            }
        }
        row
    }
}

pub fn featurize(doc: &Document, stops: &StopWordList, thesaurus: &PseudoThesaurus, index: &CorpusIndex) -> Vec<u64> {
    index.lookup().project(&document_features(doc, stops, thesaurus).irfv)
}

/// Vocabulary sizes at each reduction stage of a training corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionStats {
    /// Distinct tokens before stop-word and thesaurus filtering.
    pub raw_distinct: usize,
    /// Distinct stems after filtering and stemming.
    pub post_thesaurus: usize,
    /// Features left after the threshold cutoff.
    pub post_threshold: usize,
}

impl ReductionStats {
    pub fn compute(docs: &[Document], features: &[DocumentFeatures], index: &CorpusIndex) -> Self {
        let raw: BTreeSet<String> = docs.iter().flat_map(|d| tokenize(&d.text)).collect();
        let stems: BTreeSet<&str> = features.iter().flat_map(|d| d.irfv.iter().map(|(t, _)| t)).collect();
        ReductionStats {
            raw_distinct: raw.len(),
            post_thesaurus: stems.len(),
            post_threshold: index.num_features(),
        }
    }

    /// `1 - |features| / raw_distinct`, or 0 for an empty corpus.
    pub fn reduction_ratio(&self) -> f64 {
        if self.raw_distinct == 0 {
            0.0
        } else {
            1.0 - self.post_threshold as f64 / self.raw_distinct as f64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fv(pairs: &[(&str, u64)]) -> FeatureVector {
        pairs.iter().map(|&(t, c)| (t, c)).collect()
    }

    fn doc_feats(id: &str, pairs: &[(&str, u64)]) -> DocumentFeatures {
        DocumentFeatures { doc_id: id.into(), irfv: fv(pairs) }
    }

    #[test]
    fn sentence_counts() {
        assert_eq!(build_sentence_rfv(&["research", "research", "research"]), fv(&[("research", 3)]));
        assert!(build_sentence_rfv::<&str>(&[]).is_empty());
        assert_eq!(build_sentence_rfv(&["a", "b", "a"]), fv(&[("a", 2), ("b", 1)]));
    }

    #[test]
    fn document_integration_sums() {
        let d = integrate_document(&[fv(&[("a", 2), ("b", 1)]), fv(&[("a", 1), ("c", 1)])], "d");
        assert_eq!(d.irfv, fv(&[("a", 3), ("b", 1), ("c", 1)]));
        assert!(integrate_document(&[], "d").irfv.is_empty());
        assert_eq!(integrate_document(&[fv(&[("x", 5)])], "d").irfv, fv(&[("x", 5)]));
    }

    #[test]
    fn threshold_cutoff_on_totals() {
        let th = PseudoThesaurus::open();
        let docs = [doc_feats("d1", &[("a", 2), ("b", 1)]), doc_feats("d2", &[("a", 1), ("c", 1)])];
        let idx = build_corpus_index(&docs, &th, 2).unwrap();
        assert_eq!(idx.features, ["a"]);
        assert_eq!(idx.total_freq, [3]);
        assert_eq!(idx.matrix, [[2], [1]]);

        let all = build_corpus_index(&docs, &th, 0).unwrap();
        assert_eq!(all.features, ["a", "b", "c"]);
        assert_eq!(all.total_freq, [3, 1, 1]);
    }

    #[test]
    fn thesaurus_filters_index() {
        let th = PseudoThesaurus::new(["a"], std::iter::empty::<(&str, &str)>()).unwrap();
        let docs = [doc_feats("d1", &[("a", 2), ("b", 5), ("7", 3)])];
        let idx = build_corpus_index(&docs, &th, 0).unwrap();
        assert_eq!(idx.features, ["7", "a"]);
    }

    #[test]
    fn duplicate_rows_rejected() {
        let docs = [doc_feats("d1", &[("a", 1)]), doc_feats("d1", &[("a", 1)])];
        assert!(matches!(
            build_corpus_index(&docs, &PseudoThesaurus::open(), 0),
            Err(Error::DuplicateId(_))
        ));
    }

    #[test]
    fn count_matrix_of_four_documents() {
        // Rows given out of order to exercise id sorting.
        let docs = [
            doc_feats("td4", &[("f1", 4)]),
            doc_feats("td1", &[("f1", 1), ("f3", 1)]),
            doc_feats("td3", &[("f2", 2), ("f3", 1)]),
            doc_feats("td2", &[("f1", 1), ("f2", 3)]),
        ];
        let idx = build_corpus_index(&docs, &PseudoThesaurus::open(), 1).unwrap();
        assert_eq!(idx.features, ["f1", "f2", "f3"]);
        assert_eq!(idx.total_freq, [6, 5, 2]);
        assert_eq!(idx.doc_ids, ["td1", "td2", "td3", "td4"]);
        assert_eq!(idx.matrix, [[1, 0, 1], [1, 3, 0], [0, 2, 1], [4, 0, 0]]);
        idx.validate().unwrap();
    }

    #[test]
    fn featurize_projects_onto_index() {
        let th = PseudoThesaurus::open();
        let stops = StopWordList::empty();
        let docs = [
            doc_feats("td1", &[("f1", 1), ("f3", 1)]),
            doc_feats("td2", &[("f1", 1), ("f2", 3)]),
            doc_feats("td3", &[("f2", 2), ("f3", 1)]),
        ];
        let idx = build_corpus_index(&docs, &th, 1).unwrap();
        let order: Vec<_> = idx.features.iter().map(String::as_str).collect();
        assert_eq!(order, ["f2", "f1", "f3"]);
        let d = Document::new("q", "F3 f1. unknown", None);
        assert_eq!(featurize(&d, &stops, &th, &idx), [0, 1, 1]);
        assert_eq!(featurize(&Document::new("e", "", None), &stops, &th, &idx), [0, 0, 0]);
        assert_eq!(featurize(&Document::new("u", "zz yy.", None), &stops, &th, &idx), [0, 0, 0]);
    }

    #[test]
    fn validate_catches_tampering() {
        let docs = [doc_feats("d1", &[("a", 2), ("b", 1)])];
        let mut idx = build_corpus_index(&docs, &PseudoThesaurus::open(), 0).unwrap();
        idx.validate().unwrap();
        idx.matrix[0][1] = 9;
        assert!(idx.validate().is_err());
    }

    #[test]
    fn reduction_ratio_bounds() {
        let r = ReductionStats { raw_distinct: 10, post_thesaurus: 6, post_threshold: 4 };
        assert!((r.reduction_ratio() - 0.6).abs() < 1e-15);
        let empty = ReductionStats { raw_distinct: 0, post_thesaurus: 0, post_threshold: 0 };
        assert_eq!(empty.reduction_ratio(), 0.0);
    }

    fn corpus() -> impl Strategy<Value = Vec<DocumentFeatures>> {
        let term = prop::sample::select(vec!["a", "b", "c", "d", "e", "f", "g"]);
        prop::collection::vec(prop::collection::vec((term, 1u64..5), 0..6), 1..8).prop_map(|docs| {
            docs.into_iter()
                .enumerate()
                .map(|(i, pairs)| DocumentFeatures { doc_id: format!("d{i:02}"), irfv: pairs.into_iter().collect() })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn index_invariants(docs in corpus(), t1 in 0u64..6, dt in 0u64..4) {
            let th = PseudoThesaurus::open();
            let lo = build_corpus_index(&docs, &th, t1).unwrap();
            let hi = build_corpus_index(&docs, &th, t1 + dt).unwrap();
            lo.validate().unwrap();
            hi.validate().unwrap();
            prop_assert!(hi.features.iter().all(|f| lo.features.contains(f)));
            prop_assert_eq!(&build_corpus_index(&docs, &th, t1).unwrap(), &lo);

            let lookup = lo.lookup();
            for d in &docs {
                let row = lo.row_of(&d.doc_id).unwrap();
                prop_assert_eq!(&lookup.project(&d.irfv), &lo.matrix[row]);
            }
        }
    }
}
