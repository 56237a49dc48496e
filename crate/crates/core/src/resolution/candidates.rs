use serde::{Deserialize, Serialize};

use crate::corpus::{AnalyzedDocument, Location, Pos};
use crate::detection::ZeroPronoun;
use crate::lexicon::{SemClass, Thesaurus};

/// A preceding noun that may be the referent of a zero pronoun.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AntecedentCandidate {
    pub location: Location,
    pub lemma: String,
    pub particle: Option<String>,
    /// Sentence gap to the zero pronoun; 0 within the same sentence.
    pub distance: usize,
    pub in_relative_clause: bool,
    pub classes: Vec<SemClass>,
}

/// Builds the feature record of the token at `loc` as seen from `zp`.
///
/// Returns `None` when the position does not exist or does not precede the
/// zero pronoun's predicate.
pub fn candidate_at(
    doc: &AnalyzedDocument,
    zp: &ZeroPronoun,
    loc: Location,
    thesaurus: &Thesaurus,
) -> Option<AntecedentCandidate> {
    let token = doc.token(loc)?;
    if loc.sentence > zp.sentence || (loc.sentence == zp.sentence && loc.token >= zp.predicate_token) {
        return None;
    }
    Some(AntecedentCandidate {
        location: loc,
        lemma: token.lemma.clone(),
        particle: token.particle.clone(),
        distance: zp.sentence - loc.sentence,
        in_relative_clause: token.in_relative_clause,
        classes: thesaurus.semantic_classes(&token.lemma),
    })
}

/// All nouns in the `window` preceding sentences and the current one that
/// precede the predicate, in document order.
pub fn extract_candidates(
    doc: &AnalyzedDocument,
    zp: &ZeroPronoun,
    window: usize,
    thesaurus: &Thesaurus,
) -> Vec<AntecedentCandidate> {
    let first = zp.sentence.saturating_sub(window);
    let last = zp.sentence.min(doc.sentences.len().saturating_sub(1));
    if doc.sentences.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for s in first..=last {
        for (t, tok) in doc.sentences[s].tokens.iter().enumerate() {
            if tok.pos != Pos::Noun {
                continue;
            }
            if let Some(c) = candidate_at(doc, zp, Location::new(s, t), thesaurus) {
                out.push(c);
            }
        }
    }
    out
}
