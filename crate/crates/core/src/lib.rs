//! Reading-difficulty estimation for second-language (L2) readers.
//!
//! The crate turns graded documents (plain text plus optional constituency
//! trees and coreference chains) into a fixed 47-entry feature vector, fits
//! linear regression models chosen by forward selection and BIC, and
//! evaluates them with repeated k-fold cross-validation, level accuracy and
//! trend accuracy in direction (TAD).
//!
//! Module map:
//! - [`corpus`]: documents, tokenization, syllables, manifest loading
//! - [`lexicon`]: graded word lists, frequency tables, synset counts
//! - [`syntax`]: bracketed trees, parsing features, grammar patterns
//! - [`coref`]: coreference chains and their features
//! - [`features`]: the feature registry, featurization, CSV tables
//! - [`model`]: OLS, metrics, forward selection, CV, level thresholds
//! - [`report`]: table renderers for the evaluation reports
//! - [`service`]: request/response scoring used by the HTTP server
//! - [`synth`]: synthetic graded corpora for tests and demos

pub mod coref;
pub mod corpus;
pub mod error;
pub mod features;
pub mod lexicon;
pub mod model;
pub mod report;
pub mod service;
pub mod synth;
pub mod syntax;

pub use corpus::{Document, Sentence, Token, TokenizerConfig};
pub use error::{Error, Result};
pub use features::{FeatureRegistry, FeatureVector, Resources};
pub use model::{LevelThresholds, RegressionModel, SelectionTrace};
pub use syntax::ParseTree;
