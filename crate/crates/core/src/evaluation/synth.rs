//! Synthetic corpora drawn from a known generative process.
//!
//! Each sentence holds one predicate at its end. Every case of the verb is
//! semantically present with the verb's obligatoriness probability; a present
//! case is either filled overtly or, with the case's zero rate, omitted and
//! annotated. The antecedent of an omitted case is placed `d` sentences back
//! with particle, relative-clause flag and semantic class drawn from the
//! configured true distributions. Distractor nouns are drawn from a separate
//! background distribution. The unannotated corpus uses the same verbs and
//! class preferences, with only overt fillers.

use std::collections::BTreeMap;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{
    AnalyzedDocument, AnnotatedDocument, Antecedent, CaseMarker, GoldAnnotation, Location,
    PredicateInstance, Sentence, Token,
};
use crate::error::{Error, Result};
use crate::lexicon::{CaseFrameLexicon, SemClass, Thesaurus};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerbSpec {
    pub lemma: String,
    /// Whether the verb appears in the generated case-frame lexicon.
    pub listed: bool,
    /// Probability that each case is semantically present.
    pub obligatoriness: BTreeMap<CaseMarker, f64>,
    /// True `P(n|v,c)` over class indices.
    pub class_preference: BTreeMap<CaseMarker, Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub documents: usize,
    pub sentences_per_document: usize,
    pub unannotated_documents: usize,
    pub unannotated_sentences_per_document: usize,
    pub classes: usize,
    pub nouns_per_class: usize,
    /// Two-class nouns, used only as distractors.
    pub ambiguous_nouns: usize,
    /// Nouns missing from the thesaurus, used only as distractors.
    pub unknown_nouns: usize,
    pub verbs: Vec<VerbSpec>,
    /// Probability that a present case is omitted rather than filled.
    pub zero_rate: BTreeMap<CaseMarker, f64>,
    pub exophoric_rate: f64,
    /// True `P(p|c)` of antecedents.
    pub antecedent_particles: BTreeMap<CaseMarker, BTreeMap<String, f64>>,
    /// True `P(d)` indexed by sentence distance.
    pub antecedent_distance: Vec<f64>,
    /// True `P(r = true)`.
    pub antecedent_relative: f64,
    pub min_distractors: usize,
    pub max_distractors: usize,
    pub distractor_particles: BTreeMap<String, f64>,
    pub distractor_relative: f64,
}

/// Generated corpus with the lexical resources it was generated against.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticCorpus {
    pub documents: Vec<AnnotatedDocument>,
    pub unannotated: Vec<AnalyzedDocument>,
    pub lexicon: CaseFrameLexicon,
    pub thesaurus: Thesaurus,
}

impl SyntheticCorpus {
    pub fn annotations(&self) -> Vec<GoldAnnotation> {
        self.documents
            .iter()
            .flat_map(|d| d.annotations.iter().cloned())
            .collect()
    }

    pub fn annotated_documents(&self) -> Vec<AnalyzedDocument> {
        self.documents.iter().map(|d| d.document.clone()).collect()
    }
}

fn class_id(i: usize) -> String {
    format!("c{i:02}")
}

fn peaked(classes: usize, slot: usize) -> Vec<f64> {
    let top = (5 * slot) % classes;
    let second = (top + 3) % classes;
    let rest = 0.35 / (classes - 2) as f64;
    (0..classes)
        .map(|j| match j {
            _ if j == top => 0.4,
            _ if j == second => 0.25,
            _ => rest,
        })
        .collect()
}

fn dist(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

impl SynthParams {
    /// Default fixture: ten verbs (two unlisted), twelve classes, a
    /// four-sentence distance support.
    pub fn fixture() -> Self {
        use CaseMarker::*;
        let classes = 12;
        let verbs = [
            ("yomu", true, 0.9, 0.2),
            ("kaku", true, 0.8, 0.4),
            ("iku", true, 0.1, 0.9),
            ("au", true, 0.15, 0.85),
            ("taberu", true, 0.95, 0.1),
            ("miru", true, 0.7, 0.15),
            ("hanasu", true, 0.5, 0.6),
            ("okuru", true, 0.85, 0.75),
            ("hashiru", false, 0.1, 0.1),
            ("warau", false, 0.1, 0.1),
        ];
        let verbs = verbs
            .iter()
            .enumerate()
            .map(|(i, &(lemma, listed, wo, ni))| VerbSpec {
                lemma: lemma.to_string(),
                listed,
                obligatoriness: BTreeMap::from([(Ga, 1.0), (Wo, wo), (Ni, ni)]),
                class_preference: CaseMarker::ALL
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| (c, peaked(classes, 3 * i + j)))
                    .collect(),
            })
            .collect();
        SynthParams {
            documents: 30,
            sentences_per_document: 25,
            unannotated_documents: 400,
            unannotated_sentences_per_document: 25,
            classes,
            nouns_per_class: 6,
            ambiguous_nouns: 6,
            unknown_nouns: 8,
            verbs,
            zero_rate: BTreeMap::from([(Ga, 0.55), (Wo, 0.3), (Ni, 0.3)]),
            exophoric_rate: 0.05,
            antecedent_particles: BTreeMap::from([
                (Ga, dist(&[("wa", 0.45), ("ga", 0.35), ("no", 0.05), ("wo", 0.05), ("ni", 0.05), ("de", 0.05)])),
                (Wo, dist(&[("wo", 0.4), ("wa", 0.25), ("ga", 0.15), ("no", 0.1), ("ni", 0.05), ("de", 0.05)])),
                (Ni, dist(&[("ni", 0.4), ("wa", 0.25), ("ga", 0.15), ("no", 0.1), ("wo", 0.05), ("de", 0.05)])),
            ]),
            antecedent_distance: vec![0.4, 0.3, 0.2, 0.1],
            antecedent_relative: 0.08,
            min_distractors: 2,
            max_distractors: 5,
            distractor_particles: dist(&[("no", 0.3), ("de", 0.25), ("wa", 0.1), ("ga", 0.1), ("wo", 0.12), ("ni", 0.13)]),
            distractor_relative: 0.35,
        }
    }

    /// Largest sentence distance with support.
    pub fn max_distance(&self) -> usize {
        self.antecedent_distance.len().saturating_sub(1)
    }

    pub fn validate(&self) -> Result<()> {
        fn check_dist<'a>(name: &str, probs: impl IntoIterator<Item = &'a f64>) -> Result<()> {
            let probs: Vec<f64> = probs.into_iter().copied().collect();
            if probs.is_empty() || probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::config(format!("{name}: probabilities must lie in [0, 1]")));
            }
            let sum: f64 = probs.iter().sum();
            if (sum - 1.0).abs() > 1e-6 {
                return Err(Error::config(format!("{name}: sums to {sum}, not 1")));
            }
            Ok(())
        }
        fn check_prob(name: &str, p: f64) -> Result<()> {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::config(format!("{name}: {p} outside [0, 1]")))
            }
        }
        if self.classes < 3 || self.nouns_per_class == 0 || self.verbs.is_empty() {
            return Err(Error::config("need >= 3 classes, >= 1 noun per class and >= 1 verb"));
        }
        if self.min_distractors > self.max_distractors {
            return Err(Error::config("min_distractors exceeds max_distractors"));
        }
        check_dist("antecedent_distance", &self.antecedent_distance)?;
        check_dist("distractor_particles", self.distractor_particles.values())?;
        check_prob("antecedent_relative", self.antecedent_relative)?;
        check_prob("distractor_relative", self.distractor_relative)?;
        check_prob("exophoric_rate", self.exophoric_rate)?;
        for c in CaseMarker::ALL {
            check_prob(&format!("zero_rate[{c}]"), self.zero_rate.get(&c).copied().unwrap_or(0.0))?;
            let particles = self
                .antecedent_particles
                .get(&c)
                .ok_or_else(|| Error::config(format!("antecedent_particles lacks case {c}")))?;
            check_dist(&format!("antecedent_particles[{c}]"), particles.values())?;
        }
        for v in &self.verbs {
            for c in CaseMarker::ALL {
                let o = v.obligatoriness.get(&c).copied().unwrap_or(0.0);
                check_prob(&format!("{}.obligatoriness[{c}]", v.lemma), o)?;
                if o > 0.0 {
                    let pref = v
                        .class_preference
                        .get(&c)
                        .ok_or_else(|| Error::config(format!("{} lacks class preference for {c}", v.lemma)))?;
                    if pref.len() != self.classes {
                        return Err(Error::config(format!(
                            "{}.class_preference[{c}] has {} entries, expected {}",
                            v.lemma,
                            pref.len(),
                            self.classes
                        )));
                    }
                    check_dist(&format!("{}.class_preference[{c}]", v.lemma), pref)?;
                }
            }
        }
        Ok(())
    }

    /// True `P(n|v,c)` for a class id.
    pub fn true_class_prob(&self, verb: &str, case: CaseMarker, class: &SemClass) -> Option<f64> {
        let v = self.verbs.iter().find(|v| v.lemma == verb)?;
        let idx = (0..self.classes).find(|&i| class_id(i) == class.as_str())?;
        v.class_preference.get(&case).map(|p| p[idx])
    }

    pub fn lexicon(&self) -> CaseFrameLexicon {
        let mut lex = CaseFrameLexicon::new();
        for v in self.verbs.iter().filter(|v| v.listed) {
            lex.insert(
                &v.lemma,
                CaseMarker::ALL
                    .into_iter()
                    .filter(|c| v.obligatoriness.get(c).copied().unwrap_or(0.0) > 0.0),
            );
        }
        lex
    }

    pub fn thesaurus(&self) -> Thesaurus {
        let mut th = Thesaurus::new();
        for c in 0..self.classes {
            for i in 0..self.nouns_per_class {
                th.insert(&class_noun(c, i), [SemClass::new(class_id(c))]);
            }
        }
        for i in 0..self.ambiguous_nouns {
            let a = i % self.classes;
            let b = (i + self.classes / 2) % self.classes;
            th.insert(&format!("a{i:02}"), [SemClass::new(class_id(a)), SemClass::new(class_id(b))]);
        }
        th
    }
}

fn class_noun(class: usize, i: usize) -> String {
    format!("n{class:02}_{i:02}")
}

struct Categorical<T> {
    items: Vec<T>,
    index: WeightedIndex<f64>,
}

impl<T: Clone> Categorical<T> {
    fn new(items: Vec<T>, weights: Vec<f64>) -> Option<Self> {
        let index = WeightedIndex::new(weights).ok()?;
        Some(Categorical { items, index })
    }

    fn from_map(map: &BTreeMap<T, f64>) -> Option<Self>
    where
        T: Ord,
    {
        Self::new(map.keys().cloned().collect(), map.values().copied().collect())
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> T {
        self.items[self.index.sample(rng)].clone()
    }
}

struct NounDraft {
    token: Token,
    order: f64,
    id: usize,
}

struct SentenceDraft {
    verb: String,
    nouns: Vec<NounDraft>,
    filled: Vec<(CaseMarker, usize)>,
}

struct Sampler<'a> {
    params: &'a SynthParams,
    class_nouns: Vec<Vec<String>>,
    background_nouns: Vec<String>,
    antecedent_particles: BTreeMap<CaseMarker, Categorical<String>>,
    distance: Categorical<usize>,
    distractor_particles: Categorical<String>,
    next_id: usize,
}

impl<'a> Sampler<'a> {
    fn new(params: &'a SynthParams) -> Self {
        let class_nouns: Vec<Vec<String>> = (0..params.classes)
            .map(|c| (0..params.nouns_per_class).map(|i| class_noun(c, i)).collect())
            .collect();
        let mut background_nouns: Vec<String> = class_nouns.iter().flatten().cloned().collect();
        background_nouns.extend((0..params.ambiguous_nouns).map(|i| format!("a{i:02}")));
        background_nouns.extend((0..params.unknown_nouns).map(|i| format!("u{i:02}")));
        Sampler {
            params,
            class_nouns,
            background_nouns,
            antecedent_particles: params
                .antecedent_particles
                .iter()
                .map(|(c, m)| (*c, Categorical::from_map(m).expect("validated")))
                .collect(),
            distance: Categorical::new(
                (0..params.antecedent_distance.len()).collect(),
                params.antecedent_distance.clone(),
            )
            .expect("validated"),
            distractor_particles: Categorical::from_map(&params.distractor_particles).expect("validated"),
            next_id: 0,
        }
    }

    fn noun(&mut self, rng: &mut ChaCha8Rng, lemma: String, particle: Option<String>, rel: bool) -> NounDraft {
        self.next_id += 1;
        NounDraft {
            token: Token {
                surface: lemma.clone(),
                lemma,
                pos: crate::corpus::Pos::Noun,
                particle,
                head: None,
                in_relative_clause: rel,
            },
            order: rng.gen(),
            id: self.next_id,
        }
    }

    fn class_filler(&self, rng: &mut ChaCha8Rng, verb: &VerbSpec, case: CaseMarker) -> String {
        let pref = &verb.class_preference[&case];
        let class = WeightedIndex::new(pref).expect("validated").sample(rng);
        self.class_nouns[class].choose(rng).expect("nouns per class > 0").clone()
    }

    fn distractors(&mut self, rng: &mut ChaCha8Rng, case_particles: bool) -> Vec<NounDraft> {
        let n = rng.gen_range(self.params.min_distractors..=self.params.max_distractors);
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let particle = self.distractor_particles.sample(rng);
            if !case_particles && particle.parse::<CaseMarker>().is_ok() {
                continue;
            }
            let lemma = self.background_nouns.choose(rng).expect("non-empty").clone();
            let rel = rng.gen_bool(self.params.distractor_relative);
            out.push(self.noun(rng, lemma, Some(particle), rel));
        }
        out
    }

    fn presence(rng: &mut ChaCha8Rng, verb: &VerbSpec, case: CaseMarker) -> bool {
        rng.gen_bool(verb.obligatoriness.get(&case).copied().unwrap_or(0.0))
    }

    fn annotated(&mut self, rng: &mut ChaCha8Rng, doc_id: String) -> AnnotatedDocument {
        let p = self.params;
        let mut drafts: Vec<SentenceDraft> = Vec::with_capacity(p.sentences_per_document);
        // (sentence, case, antecedent draft position)
        let mut zeros: Vec<(usize, CaseMarker, Option<(usize, usize)>)> = Vec::new();
        for s in 0..p.sentences_per_document {
            let verb = p.verbs.choose(rng).expect("verbs non-empty");
            let nouns = self.distractors(rng, true);
            drafts.push(SentenceDraft {
                verb: verb.lemma.clone(),
                nouns,
                filled: Vec::new(),
            });
            for case in CaseMarker::ALL {
                if !Self::presence(rng, verb, case) {
                    continue;
                }
                let zero_rate = p.zero_rate.get(&case).copied().unwrap_or(0.0);
                if s >= p.max_distance() && rng.gen_bool(zero_rate) {
                    if rng.gen_bool(p.exophoric_rate) {
                        zeros.push((s, case, None));
                        continue;
                    }
                    let d = self.distance.sample(rng);
                    let particle = self.antecedent_particles[&case].sample(rng);
                    let rel = rng.gen_bool(p.antecedent_relative);
                    let lemma = self.class_filler(rng, verb, case);
                    let noun = self.noun(rng, lemma, Some(particle), rel);
                    let id = noun.id;
                    drafts[s - d].nouns.push(noun);
                    zeros.push((s, case, Some((s - d, id))));
                } else {
                    let lemma = self.class_filler(rng, verb, case);
                    let noun = self.noun(rng, lemma, Some(case.to_string()), false);
                    drafts[s].filled.push((case, noun.id));
                    drafts[s].nouns.push(noun);
                }
            }
        }
        let (sentences, positions) = finalize(drafts);
        let annotations = zeros
            .into_iter()
            .map(|(s, case, ante)| GoldAnnotation {
                doc_id: doc_id.clone(),
                sentence: s,
                predicate_token: sentences[s].predicates[0].token_index,
                case,
                antecedent: match ante {
                    None => Antecedent::Exophoric,
                    Some((as_, id)) => Antecedent::Mention(Location::new(as_, positions[as_][&id])),
                },
            })
            .collect();
        AnnotatedDocument {
            document: AnalyzedDocument { doc_id, sentences },
            annotations,
        }
    }

    fn unannotated(&mut self, rng: &mut ChaCha8Rng, doc_id: String) -> AnalyzedDocument {
        let p = self.params;
        let mut drafts = Vec::with_capacity(p.unannotated_sentences_per_document);
        for _ in 0..p.unannotated_sentences_per_document {
            let verb = p.verbs.choose(rng).expect("verbs non-empty");
            let mut draft = SentenceDraft {
                verb: verb.lemma.clone(),
                nouns: self.distractors(rng, false),
                filled: Vec::new(),
            };
            for case in CaseMarker::ALL {
                if Self::presence(rng, verb, case) {
                    let lemma = self.class_filler(rng, verb, case);
                    let noun = self.noun(rng, lemma, Some(case.to_string()), false);
                    draft.filled.push((case, noun.id));
                    draft.nouns.push(noun);
                }
            }
            drafts.push(draft);
        }
        AnalyzedDocument {
            doc_id,
            sentences: finalize(drafts).0,
        }
    }
}

/// Orders nouns, appends the verb and resolves draft ids to token indices.
fn finalize(drafts: Vec<SentenceDraft>) -> (Vec<Sentence>, Vec<BTreeMap<usize, usize>>) {
    let mut sentences = Vec::with_capacity(drafts.len());
    let mut positions = Vec::with_capacity(drafts.len());
    for mut draft in drafts {
        draft.nouns.sort_by(|a, b| a.order.total_cmp(&b.order).then(a.id.cmp(&b.id)));
        let verb_index = draft.nouns.len();
        let pos: BTreeMap<usize, usize> = draft.nouns.iter().enumerate().map(|(i, n)| (n.id, i)).collect();
        let mut tokens: Vec<Token> = draft
            .nouns
            .into_iter()
            .map(|n| n.token.with_head(verb_index))
            .collect();
        tokens.push(Token::verb(&draft.verb));
        let mut pred = PredicateInstance::new(verb_index, &draft.verb);
        for (case, id) in draft.filled {
            pred = pred.fill(case, Some(pos[&id]));
        }
        sentences.push(Sentence {
            tokens,
            predicates: vec![pred],
        });
        positions.push(pos);
    }
    (sentences, positions)
}

/// Draws an annotated corpus, an unannotated corpus and matching lexical
/// resources. Identical parameters and seed give identical output.
pub fn generate_synthetic_corpus(params: &SynthParams, seed: u64) -> Result<SyntheticCorpus> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sampler = Sampler::new(params);
    let documents = (0..params.documents)
        .map(|i| sampler.annotated(&mut rng, format!("doc{i:04}")))
        .collect();
    let unannotated = (0..params.unannotated_documents)
        .map(|i| sampler.unannotated(&mut rng, format!("raw{i:05}")))
        .collect();
    Ok(SyntheticCorpus {
        documents,
        unannotated,
        lexicon: params.lexicon(),
        thesaurus: params.thesaurus(),
    })
}
