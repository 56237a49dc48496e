//! Document and annotation data model, plus the newline-delimited record
//! format that carries pre-analyzed text (segmentation, POS, dependency
//! heads and relative-clause flags already computed upstream).
//!
//! One document per line:
//!
//! ```json
//! {"doc_id":"d1","sentences":[{"tokens":[{"surface":"hon","lemma":"hon","pos":"noun",
//!   "particle":"wo","head":1,"in_relative_clause":false},
//!   {"surface":"yomu","lemma":"yomu","pos":"verb","in_relative_clause":false}],
//!   "predicates":[{"token_index":1,"verb":"yomu","filled_cases":{"wo":0}}]}]}
//! ```
//!
//! Annotations live in a separate file, one record per line:
//!
//! ```json
//! {"doc_id":"d1","sentence":1,"predicate_token":3,"case":"ga","antecedent":{"sentence":0,"token":2}}
//! {"doc_id":"d1","sentence":1,"predicate_token":3,"case":"ni","antecedent":"exophoric"}
//! ```

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::detection::ZeroPronoun;
use crate::error::{Error, Result};

/// Surface case of an obligatory argument.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseMarker {
    /// Nominative.
    Ga,
    /// Accusative.
    Wo,
    /// Dative.
    Ni,
}

impl CaseMarker {
    pub const ALL: [CaseMarker; 3] = [CaseMarker::Ga, CaseMarker::Wo, CaseMarker::Ni];

    pub fn as_str(self) -> &'static str {
        match self {
            CaseMarker::Ga => "ga",
            CaseMarker::Wo => "wo",
            CaseMarker::Ni => "ni",
        }
    }
}

impl fmt::Display for CaseMarker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown case '{0}'")]
pub struct UnknownCase(pub String);

impl FromStr for CaseMarker {
    type Err = UnknownCase;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ga" => Ok(CaseMarker::Ga),
            "wo" => Ok(CaseMarker::Wo),
            "ni" => Ok(CaseMarker::Ni),
            other => Err(UnknownCase(other.to_string())),
        }
    }
}

/// Coarse part of speech.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pos {
    Noun,
    Verb,
    Particle,
    Other,
}

/// A token. Its index is its position in [`Sentence::tokens`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub lemma: String,
    pub pos: Pos,
    /// Post-positional particle attached to a noun ("ga", "wa", "no", ...).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub particle: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub head: Option<usize>,
    #[serde(default)]
    pub in_relative_clause: bool,
}

impl Token {
    pub fn new(lemma: &str, pos: Pos) -> Self {
        Token {
            surface: lemma.to_string(),
            lemma: lemma.to_string(),
            pos,
            particle: None,
            head: None,
            in_relative_clause: false,
        }
    }

    pub fn noun(lemma: &str, particle: Option<&str>) -> Self {
        Token {
            particle: particle.map(str::to_string),
            ..Token::new(lemma, Pos::Noun)
        }
    }

    pub fn verb(lemma: &str) -> Self {
        Token::new(lemma, Pos::Verb)
    }

    pub fn other() -> Self {
        Token::new("_", Pos::Other)
    }

    pub fn with_head(mut self, head: usize) -> Self {
        self.head = Some(head);
        self
    }

    pub fn in_relative_clause(mut self, flag: bool) -> Self {
        self.in_relative_clause = flag;
        self
    }

    pub fn is_noun(&self) -> bool {
        self.pos == Pos::Noun
    }
}

/// A verb occurrence together with its overtly expressed cases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredicateInstance {
    pub token_index: usize,
    pub verb: String,
    /// Presence of a key means the case is overtly filled; the value is the
    /// filler token when known.
    #[serde(default)]
    pub filled_cases: BTreeMap<CaseMarker, Option<usize>>,
}

impl PredicateInstance {
    pub fn new(token_index: usize, verb: &str) -> Self {
        PredicateInstance {
            token_index,
            verb: verb.to_string(),
            filled_cases: BTreeMap::new(),
        }
    }

    pub fn fill(mut self, case: CaseMarker, token: Option<usize>) -> Self {
        self.filled_cases.insert(case, token);
        self
    }

    pub fn is_filled(&self, case: CaseMarker) -> bool {
        self.filled_cases.contains_key(&case)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Sentence {
    pub tokens: Vec<Token>,
    #[serde(default)]
    pub predicates: Vec<PredicateInstance>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyzedDocument {
    pub doc_id: String,
    /// Discourse order.
    pub sentences: Vec<Sentence>,
}

/// Position of a token inside a document.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Location {
    pub sentence: usize,
    pub token: usize,
}

impl Location {
    pub fn new(sentence: usize, token: usize) -> Self {
        Location { sentence, token }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}t{}", self.sentence, self.token)
    }
}

impl AnalyzedDocument {
    pub fn token(&self, loc: Location) -> Option<&Token> {
        self.sentences.get(loc.sentence)?.tokens.get(loc.token)
    }

    pub fn predicate(&self, loc: Location) -> Option<&PredicateInstance> {
        self.sentences
            .get(loc.sentence)?
            .predicates
            .iter()
            .find(|p| p.token_index == loc.token)
    }

    /// Iterates predicates with their sentence index, in discourse order.
    pub fn predicates(&self) -> impl Iterator<Item = (usize, &PredicateInstance)> {
        self.sentences
            .iter()
            .enumerate()
            .flat_map(|(s, sent)| sent.predicates.iter().map(move |p| (s, p)))
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(|s| s.tokens.len()).sum()
    }
}

/// Referent of an annotated zero pronoun.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Antecedent {
    /// No textual antecedent.
    Exophoric,
    Mention(Location),
}

impl Antecedent {
    pub fn location(&self) -> Option<Location> {
        match self {
            Antecedent::Exophoric => None,
            Antecedent::Mention(loc) => Some(*loc),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ExophoricTag {
    Exophoric,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum AntecedentRepr {
    Tag(ExophoricTag),
    Mention(Location),
}

impl Serialize for Antecedent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Antecedent::Exophoric => AntecedentRepr::Tag(ExophoricTag::Exophoric),
            Antecedent::Mention(loc) => AntecedentRepr::Mention(*loc),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Antecedent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Ok(match AntecedentRepr::deserialize(deserializer)? {
            AntecedentRepr::Tag(ExophoricTag::Exophoric) => Antecedent::Exophoric,
            AntecedentRepr::Mention(loc) => Antecedent::Mention(loc),
        })
    }
}

/// One manually annotated zero pronoun.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldAnnotation {
    pub doc_id: String,
    pub sentence: usize,
    pub predicate_token: usize,
    pub case: CaseMarker,
    pub antecedent: Antecedent,
}

impl GoldAnnotation {
    pub fn predicate_location(&self) -> Location {
        Location::new(self.sentence, self.predicate_token)
    }
}

/// A document paired with its gold annotations.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnotatedDocument {
    pub document: AnalyzedDocument,
    pub annotations: Vec<GoldAnnotation>,
}

/// A gold zero pronoun and its referent.
#[derive(Clone, Debug, PartialEq)]
pub struct GoldZeroPronoun {
    pub zero: ZeroPronoun,
    pub antecedent: Antecedent,
}

/// Checks token and predicate invariants. An empty result means the
/// document is well formed.
pub fn validate_document(doc: &AnalyzedDocument) -> Vec<String> {
    let mut violations = Vec::new();
    for (s, sentence) in doc.sentences.iter().enumerate() {
        let len = sentence.tokens.len();
        for (t, token) in sentence.tokens.iter().enumerate() {
            let at = Location::new(s, t);
            if token.particle.is_some() && token.pos != Pos::Noun {
                violations.push(format!("particle on non-noun at {at}"));
            }
            match token.head {
                Some(h) if h >= len => violations.push(format!("head out of bounds at {at}")),
                Some(h) if h == t => violations.push(format!("self-referential head at {at}")),
                _ => {}
            }
        }
        for pred in &sentence.predicates {
            let at = Location::new(s, pred.token_index);
            match sentence.tokens.get(pred.token_index) {
                None => violations.push(format!("predicate out of bounds at {at}")),
                Some(tok) if tok.pos != Pos::Verb => {
                    violations.push(format!("predicate on non-verb at {at}"))
                }
                _ => {}
            }
            for (case, filler) in &pred.filled_cases {
                let Some(f) = filler else { continue };
                match sentence.tokens.get(*f) {
                    None => violations.push(format!(
                        "filled case {case} of predicate {at} out of bounds ({f})"
                    )),
                    Some(tok) if tok.pos != Pos::Noun => violations.push(format!(
                        "filled case {case} of predicate {at} points at non-noun s{s}t{f}"
                    )),
                    _ => {}
                }
            }
        }
    }
    violations
}

/// Checks an annotation against the document it refers to.
pub fn validate_annotation(doc: &AnalyzedDocument, ann: &GoldAnnotation) -> Vec<String> {
    let mut violations = Vec::new();
    let pred_at = ann.predicate_location();
    if doc.predicate(pred_at).is_none() {
        violations.push(format!("no predicate at {pred_at}"));
    }
    if let Antecedent::Mention(loc) = ann.antecedent {
        if doc.token(loc).is_none() {
            violations.push(format!("antecedent {loc} does not exist"));
        }
        if loc.sentence > ann.sentence {
            violations.push(format!(
                "antecedent {loc} follows the predicate sentence {}",
                ann.sentence
            ));
        }
    }
    violations
}

/// Projects annotations onto zero pronouns, one per annotation.
///
/// Gold zero pronouns carry `detection_prob = 1`. Annotating a case that the
/// predicate fills overtly is a contradiction and fails.
pub fn gold_zero_pronouns(
    doc: &AnalyzedDocument,
    annotations: &[GoldAnnotation],
) -> Result<Vec<GoldZeroPronoun>> {
    annotations
        .iter()
        .enumerate()
        .map(|(i, ann)| {
            let fail = |message: String| Error::Annotation {
                index: i,
                doc_id: ann.doc_id.clone(),
                message,
            };
            let violations = validate_annotation(doc, ann);
            if !violations.is_empty() {
                return Err(fail(violations.join("; ")));
            }
            let pred = doc
                .predicate(ann.predicate_location())
                .expect("validated above");
            if pred.is_filled(ann.case) {
                return Err(fail(format!(
                    "case {} of predicate {} is overtly filled (contradictory gold)",
                    ann.case,
                    ann.predicate_location()
                )));
            }
            Ok(GoldZeroPronoun {
                zero: ZeroPronoun {
                    doc_id: doc.doc_id.clone(),
                    sentence: ann.sentence,
                    predicate_token: ann.predicate_token,
                    verb: pred.verb.clone(),
                    case: ann.case,
                    detection_prob: 1.0,
                    exophoric: ann.antecedent == Antecedent::Exophoric,
                },
                antecedent: ann.antecedent,
            })
        })
        .collect()
}

fn parse_records<T: DeserializeOwned, R: BufRead>(reader: R) -> Result<Vec<(usize, T)>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = i + 1;
        let mut de = serde_json::Deserializer::from_str(&line);
        let record = serde_path_to_error::deserialize(&mut de).map_err(|e| Error::Record {
            line: lineno,
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        de.end().map_err(|e| Error::Format {
            line: lineno,
            message: e.to_string(),
        })?;
        out.push((lineno, record));
    }
    Ok(out)
}

/// Reads and validates newline-delimited documents.
pub fn parse_documents<R: BufRead>(reader: R) -> Result<Vec<AnalyzedDocument>> {
    let mut seen = HashSet::new();
    let mut docs = Vec::new();
    for (line, doc) in parse_records::<AnalyzedDocument, _>(reader)? {
        let violations = validate_document(&doc);
        if !violations.is_empty() {
            return Err(Error::Invalid {
                doc_id: doc.doc_id,
                violations,
            });
        }
        if !seen.insert(doc.doc_id.clone()) {
            return Err(Error::Format {
                line,
                message: format!("duplicate doc_id '{}'", doc.doc_id),
            });
        }
        docs.push(doc);
    }
    Ok(docs)
}

pub fn parse_annotations<R: BufRead>(reader: R) -> Result<Vec<GoldAnnotation>> {
    Ok(parse_records(reader)?.into_iter().map(|(_, a)| a).collect())
}

/// Reads documents and their annotations, resolving every annotation
/// against its document.
pub fn parse_corpus<D: BufRead, A: BufRead>(documents: D, annotations: A) -> Result<Vec<AnnotatedDocument>> {
    let docs = parse_documents(documents)?;
    let anns = parse_annotations(annotations)?;
    attach_annotations(docs, anns)
}

pub fn attach_annotations(
    docs: Vec<AnalyzedDocument>,
    annotations: Vec<GoldAnnotation>,
) -> Result<Vec<AnnotatedDocument>> {
    let index: HashMap<&str, usize> = docs
        .iter()
        .enumerate()
        .map(|(i, d)| (d.doc_id.as_str(), i))
        .collect();
    let mut grouped: Vec<Vec<GoldAnnotation>> = vec![Vec::new(); docs.len()];
    for (i, ann) in annotations.into_iter().enumerate() {
        let Some(&d) = index.get(ann.doc_id.as_str()) else {
            return Err(Error::Annotation {
                index: i,
                doc_id: ann.doc_id,
                message: "unknown doc_id".into(),
            });
        };
        let violations = validate_annotation(&docs[d], &ann);
        if !violations.is_empty() {
            return Err(Error::Annotation {
                index: i,
                doc_id: ann.doc_id,
                message: violations.join("; "),
            });
        }
        grouped[d].push(ann);
    }
    Ok(docs
        .into_iter()
        .zip(grouped)
        .map(|(document, annotations)| AnnotatedDocument {
            document,
            annotations,
        })
        .collect())
}

fn write_records<T: Serialize, W: Write>(mut writer: W, records: impl IntoIterator<Item = T>) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut writer, &r)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_documents<'a, W: Write>(
    writer: W,
    docs: impl IntoIterator<Item = &'a AnalyzedDocument>,
) -> Result<()> {
    write_records(writer, docs)
}

pub fn write_annotations<'a, W: Write>(
    writer: W,
    annotations: impl IntoIterator<Item = &'a GoldAnnotation>,
) -> Result<()> {
    write_records(writer, annotations)
}

pub fn read_documents(path: &Path) -> Result<Vec<AnalyzedDocument>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_documents(BufReader::new(file))
}

pub fn read_annotations(path: &Path) -> Result<Vec<GoldAnnotation>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_annotations(BufReader::new(file))
}

pub fn save_documents(path: &Path, docs: &[AnalyzedDocument]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_documents(BufWriter::new(file), docs)
}

pub fn save_annotations(path: &Path, annotations: &[GoldAnnotation]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_annotations(BufWriter::new(file), annotations)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_sentence_doc() -> AnalyzedDocument {
        AnalyzedDocument {
            doc_id: "d1".into(),
            sentences: vec![
                Sentence {
                    tokens: vec![
                        Token::noun("taro", Some("wa")).with_head(3),
                        Token::noun("toshokan", Some("de")).with_head(3),
                        Token::noun("hon", Some("wo")).with_head(3),
                        Token::verb("kariru"),
                    ],
                    predicates: vec![PredicateInstance::new(3, "kariru")
                        .fill(CaseMarker::Ga, Some(0))
                        .fill(CaseMarker::Wo, Some(2))],
                },
                Sentence {
                    tokens: vec![Token::noun("ie", Some("de")).with_head(1), Token::verb("yomu")],
                    predicates: vec![PredicateInstance::new(1, "yomu")],
                },
            ],
        }
    }

    fn to_line<T: Serialize>(v: &T) -> String {
        serde_json::to_string(v).unwrap()
    }

    #[test]
    fn parses_one_document_with_annotation() {
        let doc = two_sentence_doc();
        let ann = GoldAnnotation {
            doc_id: "d1".into(),
            sentence: 1,
            predicate_token: 1,
            case: CaseMarker::Ga,
            antecedent: Antecedent::Mention(Location::new(0, 0)),
        };
        let docs = format!("{}\n", to_line(&doc));
        let anns = format!("{}\n", to_line(&ann));
        let corpus = parse_corpus(docs.as_bytes(), anns.as_bytes()).unwrap();
        assert_eq!(corpus.len(), 1);
        assert_eq!(corpus[0].document, doc);
        assert_eq!(corpus[0].annotations, vec![ann]);
    }

    #[test]
    fn head_equal_to_token_count_is_rejected() {
        let mut doc = two_sentence_doc();
        doc.sentences[1].tokens[0].head = Some(2);
        let line = to_line(&doc);
        let err = parse_documents(line.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("head out of bounds"), "{err}");
    }

    #[test]
    fn empty_stream_is_empty_corpus() {
        assert!(parse_corpus(&b""[..], &b""[..]).unwrap().is_empty());
        assert!(parse_documents(&b"\n\n"[..]).unwrap().is_empty());
    }

    #[test]
    fn malformed_record_reports_line_and_field() {
        let good = to_line(&two_sentence_doc());
        let bad = good.replace("\"pos\":\"verb\"", "\"pos\":\"adverb\"");
        let input = format!("\n{bad}\n");
        match parse_documents(input.as_bytes()).unwrap_err() {
            Error::Record { line, path, .. } => {
                assert_eq!(line, 2);
                assert!(path.starts_with("sentences[0].tokens[3].pos"), "{path}");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn exophoric_antecedent_serializes_as_tag() {
        let ann = GoldAnnotation {
            doc_id: "d".into(),
            sentence: 0,
            predicate_token: 0,
            case: CaseMarker::Ni,
            antecedent: Antecedent::Exophoric,
        };
        let line = to_line(&ann);
        assert!(line.contains("\"antecedent\":\"exophoric\""));
        assert_eq!(serde_json::from_str::<GoldAnnotation>(&line).unwrap(), ann);
        assert!(serde_json::from_str::<GoldAnnotation>(&line.replace("exophoric", "exo")).is_err());
    }

    #[test]
    fn validate_well_formed() {
        assert!(validate_document(&two_sentence_doc()).is_empty());
    }

    #[test]
    fn particle_on_verb_is_violation() {
        let mut doc = two_sentence_doc();
        doc.sentences[0].tokens[3].particle = Some("ga".into());
        assert_eq!(validate_document(&doc), vec!["particle on non-noun at s0t3"]);
    }

    #[test]
    fn filled_case_on_verb_is_violation() {
        let mut doc = two_sentence_doc();
        doc.sentences[1].predicates[0]
            .filled_cases
            .insert(CaseMarker::Ga, Some(1));
        assert_eq!(validate_document(&doc).len(), 1);
    }

    #[test]
    fn gold_projection() {
        let doc = two_sentence_doc();
        let anns = vec![
            GoldAnnotation {
                doc_id: "d1".into(),
                sentence: 1,
                predicate_token: 1,
                case: CaseMarker::Ga,
                antecedent: Antecedent::Mention(Location::new(0, 0)),
            },
            GoldAnnotation {
                doc_id: "d1".into(),
                sentence: 1,
                predicate_token: 1,
                case: CaseMarker::Wo,
                antecedent: Antecedent::Exophoric,
            },
        ];
        let gold = gold_zero_pronouns(&doc, &anns).unwrap();
        assert_eq!(gold.len(), 2);
        assert_eq!(gold[0].zero.verb, "yomu");
        assert_eq!(gold[0].zero.case, CaseMarker::Ga);
        assert!(!gold[0].zero.exophoric);
        assert!(gold[1].zero.exophoric);
        assert_eq!(gold[1].antecedent.location(), None);
    }

    #[test]
    fn gold_on_filled_case_is_contradiction() {
        let doc = two_sentence_doc();
        let ann = GoldAnnotation {
            doc_id: "d1".into(),
            sentence: 0,
            predicate_token: 3,
            case: CaseMarker::Ga,
            antecedent: Antecedent::Exophoric,
        };
        let err = gold_zero_pronouns(&doc, &[ann]).unwrap_err();
        assert!(err.to_string().contains("contradictory"));
    }

    #[test]
    fn dangling_annotation_is_rejected() {
        let doc = two_sentence_doc();
        let ann = GoldAnnotation {
            doc_id: "d1".into(),
            sentence: 0,
            predicate_token: 3,
            case: CaseMarker::Ni,
            antecedent: Antecedent::Mention(Location::new(1, 9)),
        };
        assert!(attach_annotations(vec![doc], vec![ann]).is_err());
    }

    #[test]
    fn antecedent_after_predicate_sentence_is_rejected() {
        let doc = two_sentence_doc();
        let ann = GoldAnnotation {
            doc_id: "d1".into(),
            sentence: 0,
            predicate_token: 3,
            case: CaseMarker::Ni,
            antecedent: Antecedent::Mention(Location::new(1, 0)),
        };
        assert_eq!(validate_annotation(&doc, &ann).len(), 1);
    }

    #[test]
    fn duplicate_doc_id_is_rejected() {
        let line = to_line(&two_sentence_doc());
        let input = format!("{line}\n{line}\n");
        assert!(parse_documents(input.as_bytes()).is_err());
    }
}
