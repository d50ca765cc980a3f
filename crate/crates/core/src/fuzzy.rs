//! Fuzzy feature/category membership.
//!
//! The membership of feature `i` in class `c` is the share of the feature's
//! corpus-wide occurrences found in documents labeled `c`:
//!
//! ```text
//! mu(i, c) = sum_g count[g][i] * [label(g) == c] / sum_g count[g][i]
//! ```
//!
//! With single-label documents each feature's memberships form a
//! probability vector over the classes.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus_io::{derive_class_set, ClassSet, Document};
use crate::error::{Error, Result};
use crate::features::CorpusIndex;

/// A count matrix with one class per row.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledMatrix {
    pub index: CorpusIndex,
    /// Class index of each matrix row.
    pub labels: Vec<usize>,
    pub class_set: ClassSet,
}

impl LabeledMatrix {
    pub fn new(index: CorpusIndex, labels: Vec<usize>, class_set: ClassSet) -> Result<Self> {
        if labels.len() != index.num_docs() {
            return Err(Error::DimensionMismatch { expected: index.num_docs(), found: labels.len() });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_set.len()) {
            return Err(Error::IndexOutOfRange { what: "class", index: bad, len: class_set.len() });
        }
        Ok(LabeledMatrix { index, labels, class_set })
    }

    /// Attaches the labels of `docs` to the rows of `index`. Every indexed
    /// document must be present and labeled.
    pub fn from_documents(index: CorpusIndex, docs: &[Document]) -> Result<Self> {
        let class_set = derive_class_set(docs)?;
        let by_id: HashMap<&str, &str> = docs
            .iter()
            .filter_map(|d| d.label.as_deref().map(|l| (d.id.as_str(), l)))
            .collect();
        let labels = index
            .doc_ids
            .iter()
            .map(|id| {
                let label = by_id.get(id.as_str()).ok_or_else(|| Error::MissingLabel(id.clone()))?;
                class_set.index_of(label).ok_or_else(|| Error::UnknownClass((*label).to_owned()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(index, labels, class_set)
    }

    pub fn num_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn row(&self, g: usize) -> &[u64] {
        &self.index.matrix[g]
    }

    /// Number of rows labeled with each class.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.class_set.len()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeaturePattern {
    pub feature: String,
    /// One degree per class, in class-set order.
    pub memberships: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MembershipTable {
    pub patterns: Vec<FeaturePattern>,
}

impl MembershipTable {
    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// Membership column of one class across all features.
    pub fn class_column(&self, class_idx: usize) -> Vec<f64> {
        self.patterns.iter().map(|p| p.memberships[class_idx]).collect()
    }
}

pub fn membership(matrix: &LabeledMatrix, feature_idx: usize, class_idx: usize) -> Result<f64> {
    let f = matrix.index.num_features();
    if feature_idx >= f {
        return Err(Error::IndexOutOfRange { what: "feature", index: feature_idx, len: f });
    }
    let e = matrix.class_set.len();
    if class_idx >= e {
        return Err(Error::IndexOutOfRange { what: "class", index: class_idx, len: e });
    }
    let (mut in_class, mut total) = (0u64, 0u64);
    for (g, &label) in matrix.labels.iter().enumerate() {
        let count = matrix.row(g)[feature_idx];
        total += count;
        if label == class_idx {
            in_class += count;
        }
    }
    if total == 0 {
        return Err(Error::ZeroFrequencyFeature(feature_idx));
    }
    Ok(in_class as f64 / total as f64)
}

pub fn build_membership_table(matrix: &LabeledMatrix) -> Result<MembershipTable> {
    let e = matrix.class_set.len();
    let patterns = (0..matrix.index.num_features())
        .into_par_iter()
        .map(|i| {
            // Single pass over the column: per-class mass, then normalize.
            let mut mass = vec![0u64; e];
            for (g, &label) in matrix.labels.iter().enumerate() {
                mass[label] += matrix.row(g)[i];
            }
            let total: u64 = mass.iter().sum();
            if total == 0 {
                return Err(Error::ZeroFrequencyFeature(i));
            }
            Ok(FeaturePattern {
                feature: matrix.index.features[i].clone(),
                memberships: mass.iter().map(|&m| m as f64 / total as f64).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MembershipTable { patterns })
}

/// Scales each count by the feature's membership in `class_idx`.
pub fn fuzzy_weighted_row<T>(row: &[T], table: &MembershipTable, class_idx: usize) -> Result<Vec<f64>>
where
    T: Copy + Into<f64>,
{
    if row.len() != table.len() {
        return Err(Error::DimensionMismatch { expected: table.len(), found: row.len() });
    }
    row.iter()
        .zip(&table.patterns)
        .map(|(&x, p)| {
            p.memberships
                .get(class_idx)
                .map(|&mu| x.into() * mu)
                .ok_or(Error::IndexOutOfRange { what: "class", index: class_idx, len: p.memberships.len() })
        })
        .collect()
}
