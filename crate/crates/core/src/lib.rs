//! Text categorization through multi-level feature reduction, fuzzy
//! feature/category membership and one-vs-rest linear margin classifiers.
//!
//! The pipeline, in order:
//!
//! 1. [`corpus_io`] loads labeled documents.
//! 2. [`text_prep`] splits sentences, tokenizes, removes stop words and
//!    stems through a thesaurus.
//! 3. [`features`] counts terms per sentence, sums them per document and
//!    merges documents into a thresholded, frequency-ordered vocabulary
//!    with a document x feature count matrix.
//! 4. [`fuzzy`] computes each feature's membership degree in every class.
//! 5. [`svm`] trains one soft-margin separator per class and predicts by
//!    argmax of decision values.
//! 6. [`eval`] and [`commands`] provide reports, the nearest-neighbour
//!    baseline and the batch commands behind the `fscmm` binary.

pub mod commands;
pub mod corpus_io;
pub mod error;
pub mod eval;
pub mod features;
pub mod fuzzy;
pub mod pipeline;
pub mod svm;
pub mod text_prep;

pub use corpus_io::{ClassSet, CorpusFormat, CorpusSplit, Document};
pub use error::{Error, Result};
pub use eval::EvalReport;
pub use features::{CorpusIndex, DocumentFeatures, FeatureVector, ReductionStats};
pub use fuzzy::{FeaturePattern, LabeledMatrix, MembershipTable};
pub use pipeline::{train_model, ModelFile, TrainSettings};
pub use svm::{FeatureMode, Hyperparams, LinearModel, OvrModel, Prediction};
pub use text_prep::{PseudoThesaurus, Resources, StopWordList};
