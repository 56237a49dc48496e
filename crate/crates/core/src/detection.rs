//! Zero pronoun detection: unfilled obligatory cases scored by `P_zero(c|v)`.

use serde::{Deserialize, Serialize};

use crate::cooccurrence::{CooccurrenceCounts, PZeroConfig};
use crate::corpus::{AnalyzedDocument, CaseMarker, Location};
use crate::lexicon::CaseFrameLexicon;

/// An omitted obligatory case of a predicate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroPronoun {
    pub doc_id: String,
    pub sentence: usize,
    pub predicate_token: usize,
    pub verb: String,
    pub case: CaseMarker,
    pub detection_prob: f64,
    /// Only set on gold zero pronouns without a textual antecedent.
    #[serde(default)]
    pub exophoric: bool,
}

impl ZeroPronoun {
    pub fn predicate_location(&self) -> Location {
        Location::new(self.sentence, self.predicate_token)
    }

    /// Identity of the slot: predicate position and case.
    pub fn slot(&self) -> (usize, usize, CaseMarker) {
        (self.sentence, self.predicate_token, self.case)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectConfig {
    /// Candidates with `P_zero` below this are dropped.
    pub theta: f64,
    pub p_zero: PZeroConfig,
}

impl Default for DetectConfig {
    fn default() -> Self {
        DetectConfig {
            theta: 0.0,
            p_zero: PZeroConfig::default(),
        }
    }
}

/// Emits one zero pronoun per obligatory, overtly unfilled case, ordered by
/// (sentence, token, case).
pub fn detect_zero_pronouns(
    doc: &AnalyzedDocument,
    lexicon: &CaseFrameLexicon,
    counts: &CooccurrenceCounts,
    cfg: DetectConfig,
) -> Vec<ZeroPronoun> {
    let mut out = Vec::new();
    for (s, pred) in doc.predicates() {
        if lexicon.get(&pred.verb).is_none() {
            log::debug!("{}: verb '{}' not in case-frame lexicon; nominative only", doc.doc_id, pred.verb);
        }
        for case in lexicon.obligatory_cases(&pred.verb) {
            if pred.is_filled(case) {
                continue;
            }
            let prob = counts.p_zero_with(case, &pred.verb, cfg.p_zero);
            if prob < cfg.theta {
                continue;
            }
            out.push(ZeroPronoun {
                doc_id: doc.doc_id.clone(),
                sentence: s,
                predicate_token: pred.token_index,
                verb: pred.verb.clone(),
                case,
                detection_prob: prob,
                exophoric: false,
            });
        }
    }
    out.sort_by_key(|z| z.slot());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cooccurrence::ClassWeighting;
    use crate::corpus::{PredicateInstance, Sentence, Token};
    use crate::lexicon::SemClass;
    use CaseMarker::*;

    fn doc_with(pred: PredicateInstance) -> AnalyzedDocument {
        AnalyzedDocument {
            doc_id: "d".into(),
            sentences: vec![Sentence {
                tokens: vec![
                    Token::noun("hon", Some("wo")),
                    Token::noun("hito", Some("ga")),
                    Token::verb(&pred.verb.clone()),
                ],
                predicates: vec![pred],
            }],
        }
    }

    fn counts() -> CooccurrenceCounts {
        let mut c = CooccurrenceCounts::new();
        let n = [SemClass::new("c")];
        for _ in 0..8 {
            c.record("yomu", Wo, &n, ClassWeighting::PerClass);
        }
        for _ in 0..2 {
            c.record("yomu", Ga, &n, ClassWeighting::PerClass);
        }
        c
    }

    fn lexicon() -> CaseFrameLexicon {
        CaseFrameLexicon::parse(&b"yomu ga wo\n"[..]).unwrap()
    }

    #[test]
    fn unfilled_nominative_detected_with_probability_one() {
        let doc = doc_with(PredicateInstance::new(2, "yomu").fill(Wo, Some(0)));
        let zps = detect_zero_pronouns(&doc, &lexicon(), &counts(), DetectConfig::default());
        assert_eq!(zps.len(), 1);
        assert_eq!(zps[0].case, Ga);
        assert_eq!(zps[0].detection_prob, 1.0);
    }

    #[test]
    fn unlisted_verb_with_filled_nominative_has_none() {
        let doc = doc_with(PredicateInstance::new(2, "hashiru").fill(Ga, Some(1)));
        assert!(detect_zero_pronouns(&doc, &lexicon(), &counts(), DetectConfig::default()).is_empty());
    }

    #[test]
    fn threshold_drops_low_probability_cases() {
        let doc = doc_with(PredicateInstance::new(2, "yomu"));
        let all = detect_zero_pronouns(&doc, &lexicon(), &counts(), DetectConfig::default());
        assert_eq!(all.iter().map(|z| z.case).collect::<Vec<_>>(), vec![Ga, Wo]);
        assert_eq!(all[1].detection_prob, 0.8);
        let cfg = DetectConfig {
            theta: 0.9,
            ..DetectConfig::default()
        };
        let kept = detect_zero_pronouns(&doc, &lexicon(), &counts(), cfg);
        assert_eq!(kept.iter().map(|z| z.case).collect::<Vec<_>>(), vec![Ga]);
    }
}
