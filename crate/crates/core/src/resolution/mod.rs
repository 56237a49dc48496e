//! Antecedent identification.
//!
//! A candidate `a` for zero pronoun `φ_c` of verb `v` is scored with the
//! factored model
//!
//! ```text
//! P(a|φ_c) ≈ P(p|c) · P(d) · P(r) · P(n|v,c)
//! ```
//!
//! where the first three factors form the syntactic model and the last the
//! semantic model. Ranking multiplies in the detection probability
//! `P_zero(c|v)`; [`certainty`] summarises how decisive the top choice is.

mod candidates;
pub(crate) mod model_file;
mod ranking;
mod semantic;
mod syntactic;

pub use candidates::{candidate_at, extract_candidates, AntecedentCandidate};
pub use ranking::{certainty, certainty_from, resolve, resolve_factors, CertaintyConfig, ScoredCandidate};
pub use semantic::{SemanticModel, SemanticSource};
pub use syntactic::{DistanceBins, SyntacticModel, UNK_PARTICLE};

use crate::corpus::AnalyzedDocument;
use crate::detection::ZeroPronoun;
use crate::lexicon::Thesaurus;

/// The four factors of a candidate's resolution probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Factors {
    pub particle: f64,
    pub distance: f64,
    pub relative: f64,
    pub semantic: f64,
}

impl Factors {
    pub fn product(&self) -> f64 {
        self.particle * self.distance * self.relative * self.semantic
    }
}

/// Scores candidates with whichever models are present; an absent model
/// contributes factors of 1.
#[derive(Clone, Copy, Debug)]
pub struct Scorer<'a> {
    pub syntactic: Option<&'a SyntacticModel>,
    pub semantic: Option<&'a SemanticModel>,
}

impl<'a> Scorer<'a> {
    pub fn both(syntactic: &'a SyntacticModel, semantic: &'a SemanticModel) -> Self {
        Scorer {
            syntactic: Some(syntactic),
            semantic: Some(semantic),
        }
    }

    pub fn syntactic_only(syntactic: &'a SyntacticModel) -> Self {
        Scorer {
            syntactic: Some(syntactic),
            semantic: None,
        }
    }

    pub fn semantic_only(semantic: &'a SemanticModel) -> Self {
        Scorer {
            syntactic: None,
            semantic: Some(semantic),
        }
    }

    pub fn factors(&self, zp: &ZeroPronoun, cand: &AntecedentCandidate) -> Factors {
        let (particle, distance, relative) = match self.syntactic {
            Some(m) => (
                m.p_particle(cand.particle.as_deref(), zp.case),
                m.p_distance(cand.distance),
                m.p_relative(cand.in_relative_clause),
            ),
            None => (1.0, 1.0, 1.0),
        };
        let semantic = self
            .semantic
            .map_or(1.0, |m| m.factor(&cand.classes, &zp.verb, zp.case));
        Factors {
            particle,
            distance,
            relative,
            semantic,
        }
    }

    /// `P(a|φ)`.
    pub fn score(&self, zp: &ZeroPronoun, cand: &AntecedentCandidate) -> f64 {
        self.factors(zp, cand).product()
    }
}

/// Training pairs for one document: every gold zero pronoun with a textual
/// antecedent that precedes its predicate.
pub fn training_pairs(
    doc: &AnalyzedDocument,
    gold: &[crate::corpus::GoldZeroPronoun],
    thesaurus: &Thesaurus,
) -> Vec<(ZeroPronoun, AntecedentCandidate)> {
    gold.iter()
        .filter_map(|g| {
            let loc = g.antecedent.location()?;
            let cand = candidate_at(doc, &g.zero, loc, thesaurus)?;
            Some((g.zero.clone(), cand))
        })
        .collect()
}

/// Training pairs for a whole annotated corpus, in document order.
pub fn gold_training_pairs(
    corpus: &[crate::corpus::AnnotatedDocument],
    thesaurus: &Thesaurus,
) -> crate::error::Result<Vec<(ZeroPronoun, AntecedentCandidate)>> {
    let mut pairs = Vec::new();
    for doc in corpus {
        let gold = crate::corpus::gold_zero_pronouns(&doc.document, &doc.annotations)?;
        pairs.extend(training_pairs(&doc.document, &gold, thesaurus));
    }
    Ok(pairs)
}
