//! Japanese zero pronoun detection and antecedent resolution.
//!
//! The pipeline detects omitted obligatory cases of each predicate, scores
//! them with `P_zero(c|v)` estimated from unannotated co-occurrence counts,
//! and ranks preceding nouns as antecedents with a factored model trained on
//! annotated text. An evaluation harness reproduces k-best accuracy,
//! coverage–accuracy curves and corpus-size sweeps.

pub mod baseline;
pub mod cooccurrence;
pub mod corpus;
pub mod detection;
pub mod error;
pub mod evaluation;
pub mod lexicon;
pub mod pipeline;
pub mod resolution;

pub use cooccurrence::{extract_cooccurrences, ClassWeighting, CooccurrenceCounts, PZeroConfig};
pub use corpus::{
    AnalyzedDocument, AnnotatedDocument, Antecedent, CaseMarker, GoldAnnotation, Location, Pos,
    PredicateInstance, Sentence, Token,
};
pub use detection::{detect_zero_pronouns, DetectConfig, ZeroPronoun};
pub use error::{Error, Result};
pub use lexicon::{CaseFrameLexicon, SemClass, Thesaurus};
pub use resolution::{AntecedentCandidate, ScoredCandidate, Scorer, SemanticModel, SyntacticModel};
