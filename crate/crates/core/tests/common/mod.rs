//! Shared fixtures and brute-force count-ratio oracles.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use zeroref::corpus::{AnalyzedDocument, AnnotatedDocument, Antecedent, CaseMarker, Pos, PredicateInstance, Sentence, Token};
use zeroref::lexicon::{SemClass, Thesaurus};

pub const NOUNS: &[&str] = &["hon", "hito", "inu", "ki", "mado", "kuruma", "zzz"];
pub const VERBS: &[&str] = &["yomu", "kaku", "iku", "miru", "hashiru"];
pub const PARTICLES: &[Option<&str>] = &[
    Some("ga"),
    Some("wo"),
    Some("ni"),
    Some("wa"),
    Some("no"),
    Some("de"),
    None,
];

pub fn small_thesaurus() -> Thesaurus {
    Thesaurus::parse(&b"hon\tc_doc\nhito\tc_person\ninu\tc_animal\nki\tc_plant\nmado\tc_thing,c_place\nkuruma\tc_thing\n"[..])
        .unwrap()
}

/// A well-formed random document: nouns, verbs, clause particles and
/// filler tokens with random heads, relative-clause flags and predicate
/// fillings.
pub fn random_document(rng: &mut ChaCha8Rng, doc_id: String, max_sentences: usize) -> AnalyzedDocument {
    let sentences = (0..rng.gen_range(1..=max_sentences))
        .map(|_| {
            let len = rng.gen_range(1..=10);
            let mut tokens: Vec<Token> = (0..len)
                .map(|_| match rng.gen_range(0..10) {
                    0..=4 => Token::noun(NOUNS.choose(rng).unwrap(), *PARTICLES.choose(rng).unwrap())
                        .in_relative_clause(rng.gen_bool(0.2)),
                    5..=7 => Token::verb(VERBS.choose(rng).unwrap()),
                    8 => Token::new(["te", "node", "to"].choose(rng).unwrap(), Pos::Particle),
                    _ => Token::other(),
                })
                .collect();
            for i in 0..len {
                if len > 1 && rng.gen_bool(0.5) {
                    let mut h = rng.gen_range(0..len - 1);
                    if h >= i {
                        h += 1;
                    }
                    tokens[i].head = Some(h);
                }
            }
            let nouns: Vec<usize> = (0..len).filter(|&i| tokens[i].pos == Pos::Noun).collect();
            let predicates = (0..len)
                .filter(|&i| tokens[i].pos == Pos::Verb)
                .map(|i| {
                    let mut p = PredicateInstance::new(i, &tokens[i].lemma.clone());
                    for c in CaseMarker::ALL {
                        match rng.gen_range(0..3) {
                            0 if !nouns.is_empty() => p = p.fill(c, Some(*nouns.choose(rng).unwrap())),
                            1 => p = p.fill(c, None),
                            _ => {}
                        }
                    }
                    p
                })
                .collect();
            Sentence { tokens, predicates }
        })
        .collect();
    AnalyzedDocument { doc_id, sentences }
}

pub fn random_documents(seed: u64, n: usize) -> Vec<AnalyzedDocument> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|i| random_document(&mut rng, format!("r{i}"), 6)).collect()
}

pub const UNK: &str = "<unk>";

/// Count tables for the syntactic and semantic parameters, gathered straight
/// from the annotation records.
#[derive(Default, Debug)]
pub struct GoldOracle {
    pub particle_case: BTreeMap<(CaseMarker, String), u64>,
    pub distance: BTreeMap<usize, u64>,
    pub relative: [u64; 2],
    pub pairs: u64,
    pub class_slot: BTreeMap<(String, CaseMarker, SemClass), f64>,
}

impl GoldOracle {
    pub fn from_corpus(corpus: &[AnnotatedDocument], thesaurus: &Thesaurus, max_bin: usize) -> Self {
        let mut o = GoldOracle::default();
        for doc in corpus {
            for a in &doc.annotations {
                let Antecedent::Mention(loc) = a.antecedent else { continue };
                if (loc.sentence, loc.token) >= (a.sentence, a.predicate_token) {
                    continue;
                }
                let tok = &doc.document.sentences[loc.sentence].tokens[loc.token];
                let verb = &doc.document.sentences[a.sentence].tokens[a.predicate_token].lemma;
                let p = tok.particle.clone().unwrap_or_else(|| UNK.to_string());
                *o.particle_case.entry((a.case, p)).or_default() += 1;
                *o.distance.entry((a.sentence - loc.sentence).min(max_bin)).or_default() += 1;
                o.relative[tok.in_relative_clause as usize] += 1;
                o.pairs += 1;
                for n in thesaurus.semantic_classes(&tok.lemma) {
                    *o.class_slot.entry((verb.clone(), a.case, n)).or_default() += 1.0;
                }
            }
        }
        o
    }

    pub fn p_particle(&self, particle: &str, case: CaseMarker) -> f64 {
        let case_total: u64 = self.particle_case.iter().filter(|((c, _), _)| *c == case).map(|(_, f)| f).sum();
        if case_total > 0 {
            *self.particle_case.get(&(case, particle.to_string())).unwrap_or(&0) as f64 / case_total as f64
        } else {
            let n: u64 = self.particle_case.iter().filter(|((_, p), _)| p == particle).map(|(_, f)| f).sum();
            n as f64 / self.pairs as f64
        }
    }

    pub fn p_distance_bin(&self, bin: usize) -> f64 {
        *self.distance.get(&bin).unwrap_or(&0) as f64 / self.pairs as f64
    }

    pub fn p_relative(&self, rel: bool) -> f64 {
        self.relative[rel as usize] as f64 / self.pairs as f64
    }

    pub fn particles(&self) -> Vec<String> {
        let mut p: Vec<String> = self.particle_case.keys().map(|(_, p)| p.clone()).collect();
        p.push(UNK.to_string());
        p.sort();
        p.dedup();
        p
    }
}

/// Unsmoothed `P(n|v,c)` with the slot -> case -> uniform backoff, from a
/// flat `(v, c, n) -> f` table.
pub fn class_ratio(
    table: &BTreeMap<(String, CaseMarker, SemClass), f64>,
    inventory: usize,
    class: &SemClass,
    verb: &str,
    case: CaseMarker,
) -> f64 {
    let slot: f64 = table.iter().filter(|((v, c, _), _)| v == verb && *c == case).map(|(_, f)| f).sum();
    if slot > 0.0 {
        return table.get(&(verb.to_string(), case, class.clone())).copied().unwrap_or(0.0) / slot;
    }
    let marginal: f64 = table.iter().filter(|((_, c, _), _)| *c == case).map(|(_, f)| f).sum();
    if marginal > 0.0 {
        let n: f64 = table
            .iter()
            .filter(|((_, c, n), _)| *c == case && n == class)
            .map(|(_, f)| f)
            .sum();
        return n / marginal;
    }
    1.0 / inventory as f64
}

/// `(v, c, n)` counts read from the overt fillers recorded on predicates.
pub fn filler_table(docs: &[AnalyzedDocument], thesaurus: &Thesaurus) -> BTreeMap<(String, CaseMarker, SemClass), f64> {
    let mut table = BTreeMap::new();
    for doc in docs {
        for s in &doc.sentences {
            for p in &s.predicates {
                for (case, filler) in &p.filled_cases {
                    let Some(t) = filler else { continue };
                    for n in thesaurus.semantic_classes(&s.tokens[*t].lemma) {
                        *table.entry((p.verb.clone(), *case, n)).or_default() += 1.0;
                    }
                }
            }
        }
    }
    table
}
