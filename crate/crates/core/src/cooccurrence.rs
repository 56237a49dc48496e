//! Verb/case/noun co-occurrence counts harvested from unannotated text.
//!
//! These counts back two quantities: the detection probability
//! `P_zero(c|v)` and the unannotated-corpus semantic model `P(n|v,c)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::corpus::{AnalyzedDocument, CaseMarker, Pos, Sentence};
use crate::error::{Error, Result};
use crate::lexicon::{SemClass, Thesaurus};

/// How a noun listed under several classes is counted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ClassWeighting {
    /// Every class cell gets +1.
    #[default]
    PerClass,
    /// Every class cell gets +1/k for a noun with k classes.
    Fractional,
}

/// Additive smoothing over a fixed class inventory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Smoothing {
    pub lambda: f64,
    pub classes: usize,
}

/// Class weights per `(verb, case)` slot with a per-case marginal for backoff.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SlotClassCounts {
    slots: BTreeMap<(String, CaseMarker), BTreeMap<SemClass, f64>>,
    by_case: BTreeMap<CaseMarker, BTreeMap<SemClass, f64>>,
}

impl SlotClassCounts {
    pub fn add(&mut self, class: &SemClass, verb: &str, case: CaseMarker, weight: f64) {
        *self
            .slots
            .entry((verb.to_string(), case))
            .or_default()
            .entry(class.clone())
            .or_default() += weight;
        *self
            .by_case
            .entry(case)
            .or_default()
            .entry(class.clone())
            .or_default() += weight;
    }

    /// F(n,v,c).
    pub fn get(&self, class: &SemClass, verb: &str, case: CaseMarker) -> f64 {
        self.slots
            .get(&(verb.to_string(), case))
            .and_then(|row| row.get(class))
            .copied()
            .unwrap_or(0.0)
    }

    /// Σ_n F(n,v,c).
    pub fn slot_total(&self, verb: &str, case: CaseMarker) -> f64 {
        self.slots
            .get(&(verb.to_string(), case))
            .map(|row| row.values().sum())
            .unwrap_or(0.0)
    }

    pub fn slot(&self, verb: &str, case: CaseMarker) -> Option<&BTreeMap<SemClass, f64>> {
        self.slots.get(&(verb.to_string(), case))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SemClass, &str, CaseMarker, f64)> {
        self.slots.iter().flat_map(|((v, c), row)| {
            row.iter().map(move |(n, f)| (n, v.as_str(), *c, *f))
        })
    }

    pub fn classes(&self) -> BTreeSet<SemClass> {
        self.by_case.values().flat_map(|row| row.keys().cloned()).collect()
    }

    pub fn merge(&mut self, other: &SlotClassCounts) {
        for (n, v, c, f) in other.iter() {
            self.add(n, v, c, f);
        }
    }

    /// Smoothed `P(n|v,c)`.
    ///
    /// `(F(n,v,c) + λ) / (Σ_j F(n_j,v,c) + λ|N|)`; an unseen slot backs off to
    /// the case marginal `F(n,c)`, and an unseen case to `1/|N|`.
    pub fn prob(&self, class: &SemClass, verb: &str, case: CaseMarker, smoothing: Smoothing) -> f64 {
        let classes = smoothing.classes.max(1) as f64;
        let lambda = smoothing.lambda;
        let ratio = |row: &BTreeMap<SemClass, f64>| {
            let total: f64 = row.values().sum();
            (total > 0.0).then(|| {
                (row.get(class).copied().unwrap_or(0.0) + lambda) / (total + lambda * classes)
            })
        };
        self.slots
            .get(&(verb.to_string(), case))
            .and_then(ratio)
            .or_else(|| self.by_case.get(&case).and_then(ratio))
            .unwrap_or(1.0 / classes)
    }
}

/// F(v), F(v,c) and F(n,v,c) tables.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CooccurrenceCounts {
    f_v: BTreeMap<String, u64>,
    f_vc: BTreeMap<(String, CaseMarker), u64>,
    f_nvc: SlotClassCounts,
    total_pairs: u64,
}

/// Hooks on the detection ratio. The defaults give the plain `F(v,c)/F(v)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PZeroConfig {
    pub exponent: f64,
    /// Verbs seen fewer times than this are treated as unseen.
    pub min_verb_count: u64,
}

impl Default for PZeroConfig {
    fn default() -> Self {
        PZeroConfig {
            exponent: 1.0,
            min_verb_count: 1,
        }
    }
}

impl CooccurrenceCounts {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records one verb/case/noun triple.
    pub fn record(&mut self, verb: &str, case: CaseMarker, classes: &[SemClass], weighting: ClassWeighting) {
        *self.f_v.entry(verb.to_string()).or_default() += 1;
        *self.f_vc.entry((verb.to_string(), case)).or_default() += 1;
        let w = match weighting {
            ClassWeighting::PerClass => 1.0,
            ClassWeighting::Fractional => 1.0 / classes.len().max(1) as f64,
        };
        for n in classes {
            self.f_nvc.add(n, verb, case, w);
        }
        self.total_pairs += 1;
    }

    pub fn f_v(&self, verb: &str) -> u64 {
        self.f_v.get(verb).copied().unwrap_or(0)
    }

    pub fn f_vc(&self, verb: &str, case: CaseMarker) -> u64 {
        self.f_vc.get(&(verb.to_string(), case)).copied().unwrap_or(0)
    }

    pub fn f_nvc(&self, class: &SemClass, verb: &str, case: CaseMarker) -> f64 {
        self.f_nvc.get(class, verb, case)
    }

    pub fn class_counts(&self) -> &SlotClassCounts {
        &self.f_nvc
    }

    pub fn total_pairs(&self) -> u64 {
        self.total_pairs
    }

    pub fn verbs(&self) -> impl Iterator<Item = (&str, u64)> {
        self.f_v.iter().map(|(v, f)| (v.as_str(), *f))
    }

    pub fn verb_cases(&self) -> impl Iterator<Item = (&str, CaseMarker, u64)> {
        self.f_vc.iter().map(|((v, c), f)| (v.as_str(), *c, *f))
    }

    pub fn merge(&mut self, other: &CooccurrenceCounts) {
        for (v, f) in &other.f_v {
            *self.f_v.entry(v.clone()).or_default() += f;
        }
        for (k, f) in &other.f_vc {
            *self.f_vc.entry(k.clone()).or_default() += f;
        }
        self.f_nvc.merge(&other.f_nvc);
        self.total_pairs += other.total_pairs;
    }

    /// Detection probability `P_zero(c|v)`: 1 for the nominative, otherwise the
    /// share of `v`'s extracted case fillers that carry `c`.
    pub fn p_zero(&self, case: CaseMarker, verb: &str) -> f64 {
        self.p_zero_with(case, verb, PZeroConfig::default())
    }

    pub fn p_zero_with(&self, case: CaseMarker, verb: &str, cfg: PZeroConfig) -> f64 {
        if case == CaseMarker::Ga {
            return 1.0;
        }
        let fv = self.f_v(verb);
        if fv == 0 || fv < cfg.min_verb_count {
            return 0.0;
        }
        (self.f_vc(verb, case) as f64 / fv as f64).powf(cfg.exponent)
    }

    /// Smoothed `P(n|v,c)` from the unannotated counts.
    pub fn semantic_prob(&self, class: &SemClass, verb: &str, case: CaseMarker, smoothing: Smoothing) -> f64 {
        self.f_nvc.prob(class, verb, case, smoothing)
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "[V]")?;
        for (v, f) in &self.f_v {
            writeln!(w, "{v}\t{f}")?;
        }
        writeln!(w, "[VC]")?;
        for ((v, c), f) in &self.f_vc {
            writeln!(w, "{v}\t{c}\t{f}")?;
        }
        writeln!(w, "[NVC]")?;
        let mut rows: Vec<_> = self.f_nvc.iter().collect();
        rows.sort_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
        for (n, v, c, f) in rows {
            writeln!(w, "{n}\t{v}\t{c}\t{f}")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write(BufWriter::new(file))
    }

    pub fn parse<R: BufRead>(reader: R) -> Result<Self> {
        let mut counts = CooccurrenceCounts::new();
        let mut section = String::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            if line.starts_with('[') {
                section = line.trim().to_string();
                continue;
            }
            let bad = |message: String| Error::Format {
                line: lineno,
                message,
            };
            let fields: Vec<&str> = line.split('\t').collect();
            let case = |s: &str| s.parse::<CaseMarker>().map_err(|e| bad(e.to_string()));
            let int = |s: &str| s.parse::<u64>().map_err(|e| bad(format!("bad count '{s}': {e}")));
            match (section.as_str(), fields.as_slice()) {
                ("[V]", [v, f]) => {
                    let f = int(f)?;
                    counts.f_v.insert(v.to_string(), f);
                    counts.total_pairs += f;
                }
                ("[VC]", [v, c, f]) => {
                    counts.f_vc.insert((v.to_string(), case(c)?), int(f)?);
                }
                ("[NVC]", [n, v, c, f]) => {
                    let f: f64 = f
                        .parse()
                        .map_err(|e| bad(format!("bad weight '{f}': {e}")))?;
                    if n.is_empty() || !(f >= 0.0) {
                        return Err(bad("empty class or negative weight".into()));
                    }
                    counts.f_nvc.add(&SemClass::new(*n), v, case(c)?, f);
                }
                _ => return Err(bad(format!("unexpected record in section '{section}'"))),
            }
        }
        Ok(counts)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::parse(BufReader::new(file))
    }
}

/// Verb a case-marked noun attaches to: the nearest verb to its right,
/// falling back to its head when that is a verb.
fn attachment(sentence: &Sentence, noun: usize) -> Option<usize> {
    let tokens = &sentence.tokens;
    (noun + 1..tokens.len())
        .find(|&j| tokens[j].pos == Pos::Verb)
        .or_else(|| {
            tokens[noun]
                .head
                .filter(|&h| tokens.get(h).is_some_and(|t| t.pos == Pos::Verb))
        })
}

fn extract_sentence(
    counts: &mut CooccurrenceCounts,
    sentence: &Sentence,
    thesaurus: &Thesaurus,
    weighting: ClassWeighting,
) {
    for (i, tok) in sentence.tokens.iter().enumerate() {
        if tok.pos != Pos::Noun {
            continue;
        }
        let Some(case) = tok.particle.as_deref().and_then(|p| p.parse::<CaseMarker>().ok()) else {
            continue;
        };
        if let Some(v) = attachment(sentence, i) {
            let classes = thesaurus.semantic_classes(&tok.lemma);
            counts.record(&sentence.tokens[v].lemma, case, &classes, weighting);
        }
    }
}

/// Counts every case-marked noun against the verb it attaches to.
pub fn extract_cooccurrences<'a>(
    docs: impl IntoIterator<Item = &'a AnalyzedDocument>,
    thesaurus: &Thesaurus,
    weighting: ClassWeighting,
) -> CooccurrenceCounts {
    let mut counts = CooccurrenceCounts::new();
    for doc in docs {
        for sentence in &doc.sentences {
            extract_sentence(&mut counts, sentence, thesaurus, weighting);
        }
    }
    counts
}

/// Extracts fixed-size shards in parallel and merges them in shard order.
pub fn extract_sharded(
    docs: &[AnalyzedDocument],
    thesaurus: &Thesaurus,
    weighting: ClassWeighting,
    shard_size: usize,
) -> CooccurrenceCounts {
    let partial: Vec<CooccurrenceCounts> = docs
        .par_chunks(shard_size.max(1))
        .map(|shard| extract_cooccurrences(shard, thesaurus, weighting))
        .collect();
    partial.iter().fold(CooccurrenceCounts::new(), |mut acc, c| {
        acc.merge(c);
        acc
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Token;
    use CaseMarker::*;

    fn doc(sentences: Vec<Vec<Token>>) -> AnalyzedDocument {
        AnalyzedDocument {
            doc_id: "d".into(),
            sentences: sentences
                .into_iter()
                .map(|tokens| Sentence {
                    tokens,
                    predicates: vec![],
                })
                .collect(),
        }
    }

    fn thesaurus() -> Thesaurus {
        Thesaurus::parse(&b"hon\tc_doc,c_artifact\nhito\tc_person\n"[..]).unwrap()
    }

    #[test]
    fn two_token_sentence_trace() {
        let d = doc(vec![vec![Token::noun("hito", Some("wo")), Token::verb("yomu")]]);
        let c = extract_cooccurrences([&d], &thesaurus(), ClassWeighting::PerClass);
        assert_eq!(c.f_v("yomu"), 1);
        assert_eq!(c.f_vc("yomu", Wo), 1);
        assert_eq!(c.f_nvc(&SemClass::new("c_person"), "yomu", Wo), 1.0);
        assert_eq!(c.total_pairs(), 1);
    }

    #[test]
    fn multi_class_noun_increments_each_class() {
        let d = doc(vec![vec![Token::noun("hon", Some("wo")), Token::verb("yomu")]]);
        let c = extract_cooccurrences([&d], &thesaurus(), ClassWeighting::PerClass);
        assert_eq!(c.f_vc("yomu", Wo), 1);
        assert_eq!(c.f_nvc(&SemClass::new("c_doc"), "yomu", Wo), 1.0);
        assert_eq!(c.f_nvc(&SemClass::new("c_artifact"), "yomu", Wo), 1.0);
        assert_eq!(c.class_counts().slot_total("yomu", Wo), 2.0);

        let f = extract_cooccurrences([&d], &thesaurus(), ClassWeighting::Fractional);
        assert_eq!(f.class_counts().slot_total("yomu", Wo), 1.0);
    }

    #[test]
    fn nouns_without_case_particles_contribute_nothing() {
        let d = doc(vec![
            vec![Token::noun("hito", Some("wa")), Token::noun("hon", None), Token::verb("yomu")],
            vec![Token::noun("hito", Some("ga"))],
        ]);
        let c = extract_cooccurrences([&d], &thesaurus(), ClassWeighting::PerClass);
        assert_eq!(c, CooccurrenceCounts::new());
    }

    #[test]
    fn nearest_following_verb_wins_then_head_fallback() {
        let d = doc(vec![vec![
            Token::verb("iku"),
            Token::noun("hito", Some("ga")),
            Token::verb("kuru"),
            Token::verb("miru"),
            Token::noun("hon", Some("ni")).with_head(0),
        ]]);
        let c = extract_cooccurrences([&d], &thesaurus(), ClassWeighting::PerClass);
        assert_eq!(c.f_vc("kuru", Ga), 1);
        assert_eq!(c.f_vc("miru", Ga), 0);
        assert_eq!(c.f_vc("iku", Ni), 1);
    }

    #[test]
    fn unknown_noun_is_its_own_class() {
        let d = doc(vec![vec![Token::noun("zyx", Some("ni")), Token::verb("au")]]);
        let c = extract_cooccurrences([&d], &thesaurus(), ClassWeighting::PerClass);
        assert_eq!(c.f_nvc(&SemClass::new("zyx"), "au", Ni), 1.0);
    }

    fn seeded() -> CooccurrenceCounts {
        let mut c = CooccurrenceCounts::new();
        let cls = [SemClass::new("c_doc")];
        for _ in 0..8 {
            c.record("yomu", Wo, &cls, ClassWeighting::PerClass);
        }
        for _ in 0..2 {
            c.record("yomu", Ga, &cls, ClassWeighting::PerClass);
        }
        c
    }

    #[test]
    fn p_zero_ratio_and_nominative_rule() {
        let c = seeded();
        assert_eq!(c.f_v("yomu"), 10);
        assert_eq!(c.p_zero(Wo, "yomu"), 0.8);
        assert_eq!(c.p_zero(Ga, "yomu"), 1.0);
        assert_eq!(c.p_zero(Ga, "unseen"), 1.0);
        assert_eq!(c.p_zero(Wo, "unseen"), 0.0);
        assert_eq!(c.p_zero(Ni, "yomu"), 0.0);
        let strict = PZeroConfig {
            exponent: 2.0,
            min_verb_count: 11,
        };
        assert_eq!(c.p_zero_with(Wo, "yomu", strict), 0.0);
        let sq = PZeroConfig {
            exponent: 2.0,
            min_verb_count: 1,
        };
        assert!((c.p_zero_with(Wo, "yomu", sq) - 0.64).abs() < 1e-12);
    }

    #[test]
    fn semantic_prob_ratio_smoothing_and_backoff() {
        let mut s = SlotClassCounts::default();
        let n1 = SemClass::new("n1");
        let n2 = SemClass::new("n2");
        s.add(&n1, "v", Wo, 3.0);
        s.add(&n2, "v", Wo, 1.0);
        let exact = Smoothing {
            lambda: 0.0,
            classes: 4,
        };
        assert_eq!(s.prob(&n1, "v", Wo, exact), 0.75);
        // unseen slot backs off to the wo marginal
        assert_eq!(s.prob(&n1, "other", Wo, exact), 0.75);
        // unseen case falls to uniform
        assert_eq!(s.prob(&n1, "v", Ni, exact), 0.25);
        let smooth = Smoothing {
            lambda: 1.0,
            classes: 4,
        };
        assert_eq!(s.prob(&SemClass::new("n3"), "v", Ga, smooth), 0.25);
        assert_eq!(s.prob(&n1, "v", Wo, smooth), 4.0 / 8.0);
    }

    #[test]
    fn counts_file_round_trip_is_byte_stable() {
        let d = doc(vec![
            vec![Token::noun("hon", Some("wo")), Token::verb("yomu")],
            vec![Token::noun("hito", Some("ga")), Token::noun("zyx", Some("ni")), Token::verb("au")],
        ]);
        let c = extract_cooccurrences([&d], &thesaurus(), ClassWeighting::PerClass);
        let mut a = Vec::new();
        c.write(&mut a).unwrap();
        let back = CooccurrenceCounts::parse(&a[..]).unwrap();
        assert_eq!(back, c);
        let mut b = Vec::new();
        back.write(&mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("[V]\nau\t2\nyomu\t1\n[VC]\n"), "{text}");
    }

    #[test]
    fn counts_file_rejects_garbage() {
        assert!(CooccurrenceCounts::parse(&b"[V]\nyomu\tx\n"[..]).is_err());
        assert!(CooccurrenceCounts::parse(&b"[VC]\nyomu\txo\t1\n"[..]).is_err());
        assert!(CooccurrenceCounts::parse(&b"yomu\t1\n"[..]).is_err());
    }
}
