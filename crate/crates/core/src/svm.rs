//! One-vs-rest linear soft-margin classifier.
//!
//! Each binary model minimizes the primal objective
//!
//! ```text
//! J(w, b) = 1/2 |w|^2 + C * sum_i max(0, 1 - h_i (w . x_i + b))
//! ```
//!
//! by stochastic subgradient steps with `eta_t = 1 / (lambda * t)`,
//! `lambda = 1 / (C * n)`, sweeping the patterns in their given order.
//! The bias is updated like a weight on a constant unit feature. Training
//! starts from `w = 0, b = 0` and returns the epoch-end iterate
//! with the lowest objective (the starting point included), so the result
//! never scores worse than the zero model.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus_io::{ClassSet, Document};
use crate::error::{Error, Result};
use crate::features::{featurize, CorpusIndex};
use crate::fuzzy::{fuzzy_weighted_row, LabeledMatrix, MembershipTable};
use crate::text_prep::{PseudoThesaurus, StopWordList};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Target {
    #[serde(rename = "+1")]
    Positive,
    #[serde(rename = "-1")]
    Negative,
}

impl Target {
    pub fn sign(self) -> f64 {
        match self {
            Target::Positive => 1.0,
            Target::Negative => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingPattern {
    pub x: Vec<f64>,
    pub h: Target,
}

impl TrainingPattern {
    pub fn new(x: Vec<f64>, h: Target) -> Self {
        TrainingPattern { x, h }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepSchedule {
    /// `eta_t = 1 / (lambda * t)` with `lambda = 1 / (C * n)`.
    #[serde(rename = "inverse-lambda-t")]
    InverseLambdaT,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub c: f64,
    pub epochs: usize,
    pub schedule: StepSchedule,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            c: 1.0,
            epochs: 200,
            schedule: StepSchedule::InverseLambdaT,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::InvalidHyperparameter(format!("C must be a positive number, got {}", self.c)));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidHyperparameter("epochs must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub class_idx: usize,
}

impl LinearModel {
    pub fn decision(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.bias
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Soft-margin objective of `(w, b)` on `patterns`.
pub fn objective(weights: &[f64], bias: f64, patterns: &[TrainingPattern], c: f64) -> f64 {
    0.5 * dot(weights, weights) + c * hinge_loss(weights, bias, patterns)
}

/// Sum of hinge losses, without the regularizer or `C`.
pub fn hinge_loss(weights: &[f64], bias: f64, patterns: &[TrainingPattern]) -> f64 {
    patterns
        .iter()
        .map(|p| (1.0 - p.h.sign() * (dot(weights, &p.x) + bias)).max(0.0))
        .sum()
}

/// Trains one binary separator. `class_idx` is recorded on the result.
pub fn train_binary(patterns: &[TrainingPattern], hyperparams: &Hyperparams, class_idx: usize) -> Result<LinearModel> {
    hyperparams.validate()?;
    let first = patterns.first().ok_or(Error::EmptyTrainingSet)?;
    let dim = first.x.len();
    if let Some(p) = patterns.iter().find(|p| p.x.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: p.x.len() });
    }
    let has = |t: Target| patterns.iter().any(|p| p.h == t);
    if !(has(Target::Positive) && has(Target::Negative)) {
        return Err(Error::DegenerateLabels);
    }

    let c = hyperparams.c;
    let n = patterns.len() as f64;
    let lambda = 1.0 / (c * n);

    let mut w = vec![0.0; dim];
    let mut b = 0.0;
    let mut best = (w.clone(), b, objective(&w, b, patterns, c));
    let mut t = 0u64;

    for _ in 0..hyperparams.epochs {
        for p in patterns {
            t += 1;
            let eta = match hyperparams.schedule {
                StepSchedule::InverseLambdaT => 1.0 / (lambda * t as f64),
            };
            let y = p.h.sign();
            let violated = y * (dot(&w, &p.x) + b) < 1.0;
            // The bias shrinks with the weights, as if it were the weight of
            // a constant feature; otherwise the first steps (eta_1 = C * n)
            // leave it far off for the rest of training.
            let shrink = 1.0 - eta * lambda;
            w.iter_mut().for_each(|wi| *wi *= shrink);
            b *= shrink;
            if violated {
                for (wi, xi) in w.iter_mut().zip(&p.x) {
                    *wi += eta * y * xi;
                }
                b += eta * y;
            }
        }
        let obj = objective(&w, b, patterns, c);
        if obj < best.2 {
            best = (w.clone(), b, obj);
        }
    }

    Ok(LinearModel {
        weights: best.0,
        bias: best.1,
        class_idx,
    })
}

/// How count rows are presented to each per-class separator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureMode {
    /// Raw occurrence counts.
    Raw,
    /// Counts scaled by the feature's membership in the separator's class.
    #[default]
    Fuzzy,
}

impl std::str::FromStr for FeatureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(FeatureMode::Raw),
            "fuzzy" => Ok(FeatureMode::Fuzzy),
            other => Err(Error::InvalidArgument(format!("unknown feature mode `{other}`"))),
        }
    }
}

impl std::fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FeatureMode::Raw => "raw",
            FeatureMode::Fuzzy => "fuzzy",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OvrModel {
    pub binaries: Vec<LinearModel>,
    pub class_set: ClassSet,
    pub index: CorpusIndex,
    pub membership: MembershipTable,
    pub feature_mode: FeatureMode,
    pub hyperparams: Hyperparams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub class: String,
    pub class_idx: usize,
    /// Decision value per class, in class-set order.
    pub scores: Vec<f64>,
}

/// Input vector of class `class_idx`'s separator for a count row.
fn class_input(row: &[u64], membership: &MembershipTable, mode: FeatureMode, class_idx: usize) -> Result<Vec<f64>> {
    match mode {
        FeatureMode::Raw => Ok(row.iter().map(|&x| x as f64).collect()),
        FeatureMode::Fuzzy => {
            let row: Vec<f64> = row.iter().map(|&x| x as f64).collect();
            fuzzy_weighted_row(&row, membership, class_idx)
        }
    }
}

pub fn train_ovr(
    matrix: &LabeledMatrix,
    membership: &MembershipTable,
    feature_mode: FeatureMode,
    hyperparams: &Hyperparams,
) -> Result<OvrModel> {
    hyperparams.validate()?;
    let e = matrix.class_set.len();
    if e < 2 {
        return Err(Error::NotEnoughClasses(e));
    }
    if let Some(empty) = matrix.class_counts().iter().position(|&n| n == 0) {
        return Err(Error::EmptyClass(matrix.class_set.names()[empty].clone()));
    }
    if membership.len() != matrix.index.num_features() {
        return Err(Error::DimensionMismatch { expected: matrix.index.num_features(), found: membership.len() });
    }

    let binaries = (0..e)
        .into_par_iter()
        .map(|l| {
            let patterns = (0..matrix.num_rows())
                .map(|g| {
                    let x = class_input(matrix.row(g), membership, feature_mode, l)?;
                    let h = if matrix.labels[g] == l { Target::Positive } else { Target::Negative };
                    Ok(TrainingPattern { x, h })
                })
                .collect::<Result<Vec<_>>>()?;
            log::debug!("training separator for class `{}`", matrix.class_set.names()[l]);
            train_binary(&patterns, hyperparams, l)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(OvrModel {
        binaries,
        class_set: matrix.class_set.clone(),
        index: matrix.index.clone(),
        membership: membership.clone(),
        feature_mode,
        hyperparams: *hyperparams,
    })
}

/// Index of the largest score; the lowest index wins ties.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

impl OvrModel {
    /// Decision value of every class's separator for a count row.
    pub fn decision_scores(&self, row: &[u64]) -> Result<Vec<f64>> {
        if row.len() != self.index.num_features() {
            return Err(Error::DimensionMismatch { expected: self.index.num_features(), found: row.len() });
        }
        self.binaries
            .iter()
            .map(|m| Ok(m.decision(&class_input(row, &self.membership, self.feature_mode, m.class_idx)?)))
            .collect()
    }

    pub fn predict_row(&self, row: &[u64]) -> Result<Prediction> {
        let scores = self.decision_scores(row)?;
        let class_idx = argmax(&scores);
        Ok(Prediction {
            class: self.class_set.names()[class_idx].clone(),
            class_idx,
            scores,
        })
    }

    pub fn predict(&self, doc: &Document, stops: &StopWordList, thesaurus: &PseudoThesaurus) -> Result<Prediction> {
        self.predict_row(&featurize(doc, stops, thesaurus, &self.index))
    }

    /// Checks that the parts of a deserialized model agree with each other.
    pub fn validate(&self) -> Result<()> {
        self.index.validate()?;
        self.hyperparams.validate()?;
        let (e, f) = (self.class_set.len(), self.index.num_features());
        if e < 2 {
            return Err(Error::NotEnoughClasses(e));
        }
        if self.binaries.len() != e {
            return Err(Error::DimensionMismatch { expected: e, found: self.binaries.len() });
        }
        for (l, m) in self.binaries.iter().enumerate() {
            if m.class_idx != l {
                return Err(Error::InvalidArgument(format!("separator {l} is tagged with class {}", m.class_idx)));
            }
            if m.weights.len() != f {
                return Err(Error::DimensionMismatch { expected: f, found: m.weights.len() });
            }
        }
        if self.membership.len() != f {
            return Err(Error::DimensionMismatch { expected: f, found: self.membership.len() });
        }
        for (p, name) in self.membership.patterns.iter().zip(&self.index.features) {
            if p.feature != *name || p.memberships.len() != e {
                return Err(Error::InvalidArgument(format!("membership pattern for `{}` does not match the index", p.feature)));
            }
        }
        Ok(())
    }
}
