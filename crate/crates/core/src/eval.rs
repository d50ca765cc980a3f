//! Held-out evaluation reports and the nearest-neighbour baseline.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus_io::ClassSet;
use crate::error::{Error, Result};
use crate::fuzzy::LabeledMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    pub class: String,
    pub precision: f64,
    pub recall: f64,
    /// Number of evaluated documents whose gold label is this class.
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub total: usize,
    pub accuracy: f64,
    pub classes: Vec<String>,
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<usize>>,
    pub per_class: Vec<ClassScores>,
    pub reduction_ratio: f64,
}

impl EvalReport {
    /// Builds a report from `(gold, predicted)` class-index pairs.
    pub fn from_pairs(class_set: &ClassSet, pairs: &[(usize, usize)], reduction_ratio: f64) -> Result<Self> {
        let e = class_set.len();
        let mut confusion = vec![vec![0usize; e]; e];
        for &(gold, pred) in pairs {
            if gold >= e || pred >= e {
                return Err(Error::IndexOutOfRange { what: "class", index: gold.max(pred), len: e });
            }
            confusion[gold][pred] += 1;
        }
        let total = pairs.len();
        let correct: usize = (0..e).map(|i| confusion[i][i]).sum();
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };

        let per_class = (0..e)
            .map(|c| {
                let predicted: usize = (0..e).map(|g| confusion[g][c]).sum();
                let support: usize = confusion[c].iter().sum();
                ClassScores {
                    class: class_set.names()[c].clone(),
                    precision: ratio(confusion[c][c], predicted),
                    recall: ratio(confusion[c][c], support),
                    support,
                }
            })
            .collect();

        Ok(EvalReport {
            total,
            accuracy: ratio(correct, total),
            classes: class_set.names().to_vec(),
            confusion,
            per_class,
            reduction_ratio,
        })
    }

    pub fn correct(&self) -> usize {
        (0..self.confusion.len()).map(|i| self.confusion[i][i]).sum()
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "accuracy: {:.4} ({}/{})",
            self.accuracy,
            self.correct(),
            self.total
        );
        let _ = writeln!(out, "reduction ratio: {:.4}", self.reduction_ratio);

        let width = self
            .classes
            .iter()
            .map(String::len)
            .chain([9, 6])
            .max()
            .unwrap_or(9);
        let _ = writeln!(out, "\nconfusion (rows = true, cols = predicted)");
        let _ = write!(out, "{:>width$}", "");
        for c in &self.classes {
            let _ = write!(out, " {c:>width$}");
        }
        out.push('\n');
        for (c, row) in self.classes.iter().zip(&self.confusion) {
            let _ = write!(out, "{c:>width$}");
            for n in row {
                let _ = write!(out, " {n:>width$}");
            }
            out.push('\n');
        }

        let _ = writeln!(out, "\n{:>width$} {:>9} {:>9} {:>9}", "class", "precision", "recall", "support");
        for s in &self.per_class {
            let _ = writeln!(
                out,
                "{:>width$} {:>9.4} {:>9.4} {:>9}",
                s.class, s.precision, s.recall, s.support
            );
        }
        out
    }
}

/// Majority class among the `k` training rows nearest to `query` in
/// Euclidean distance over raw counts. Distance ties go to the lower row,
/// vote ties to the lower class index.
pub fn knn_baseline(matrix: &LabeledMatrix, k: usize, query: &[u64]) -> Result<usize> {
    let rows = matrix.num_rows();
    if rows == 0 {
        return Err(Error::EmptyTrainingSet);
    }
    if k == 0 || k > rows {
        return Err(Error::InvalidArgument(format!("k must be in 1..={rows}, got {k}")));
    }
    let f = matrix.index.num_features();
    if query.len() != f {
        return Err(Error::DimensionMismatch { expected: f, found: query.len() });
    }

    // Squared distances are exact integers, so ties compare exactly.
    let mut dist: Vec<(u128, usize)> = (0..rows)
        .map(|g| {
            let d = matrix
                .row(g)
                .iter()
                .zip(query)
                .map(|(&a, &b)| {
                    let diff = a.abs_diff(b) as u128;
                    diff * diff
                })
                .sum();
            (d, g)
        })
        .collect();
    dist.sort_unstable();

    let mut votes = vec![0usize; matrix.class_set.len()];
    for &(_, g) in &dist[..k] {
        votes[matrix.labels[g]] += 1;
    }
    let mut best = 0;
    for (c, &v) in votes.iter().enumerate() {
        if v > votes[best] {
            best = c;
        }
    }
    Ok(best)
}
