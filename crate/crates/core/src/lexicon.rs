//! Case-frame lexicon and semantic-class thesaurus.
//!
//! `case_frames.txt` holds `<verb> <case>+` per line; a verb listed on
//! several lines gets the union of its frames. `thesaurus.tsv` holds
//! `<noun>\t<class_id>(,<class_id>)*`. Both accept `#` comments.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::CaseMarker;
use crate::error::{Error, Result};

/// Semantic class identifier.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SemClass(String);

impl SemClass {
    /// Panics on an empty id.
    pub fn new(id: impl Into<String>) -> Self {
        let id = id.into();
        assert!(!id.is_empty(), "semantic class id must be non-empty");
        SemClass(id)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SemClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn content_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    reader.lines().enumerate().filter_map(|(i, line)| match line {
        Err(e) => Some(Err(e.into())),
        Ok(line) => {
            let body = line.split('#').next().unwrap_or("").trim_end().to_string();
            (!body.trim().is_empty()).then_some(Ok((i + 1, body)))
        }
    })
}

/// Verb lemma to the merged set of obligatory cases.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CaseFrameLexicon {
    entries: BTreeMap<String, BTreeSet<CaseMarker>>,
}

impl CaseFrameLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Merges `cases` into the frame of `verb`.
    pub fn insert(&mut self, verb: &str, cases: impl IntoIterator<Item = CaseMarker>) {
        let set = self.entries.entry(verb.to_string()).or_default();
        set.extend(cases);
        if set.is_empty() {
            self.entries.remove(verb);
        }
    }

    pub fn get(&self, verb: &str) -> Option<&BTreeSet<CaseMarker>> {
        self.entries.get(verb)
    }

    /// Listed frame, or nominative only for unlisted verbs.
    pub fn obligatory_cases(&self, verb: &str) -> BTreeSet<CaseMarker> {
        self.entries
            .get(verb)
            .cloned()
            .unwrap_or_else(|| BTreeSet::from([CaseMarker::Ga]))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn parse<R: BufRead>(reader: R) -> Result<Self> {
        let mut lex = CaseFrameLexicon::new();
        for line in content_lines(reader) {
            let (lineno, body) = line?;
            let mut fields = body.split_whitespace();
            let verb = fields.next().expect("non-empty line");
            let cases = fields
                .map(|f| {
                    f.parse::<CaseMarker>().map_err(|e| Error::Format {
                        line: lineno,
                        message: e.to_string(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if cases.is_empty() {
                return Err(Error::Format {
                    line: lineno,
                    message: format!("verb '{verb}' lists no cases"),
                });
            }
            lex.insert(verb, cases);
        }
        Ok(lex)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::parse(BufReader::new(file))
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        for (verb, cases) in &self.entries {
            write!(w, "{verb}")?;
            for c in cases {
                write!(w, " {c}")?;
            }
            writeln!(w)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write(BufWriter::new(file))
    }
}

/// Noun lemma to semantic classes. Hierarchy is flattened to one level.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Thesaurus {
    classes: BTreeMap<String, BTreeSet<SemClass>>,
}

impl Thesaurus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, noun: &str, classes: impl IntoIterator<Item = SemClass>) {
        let set = self.classes.entry(noun.to_string()).or_default();
        set.extend(classes);
        if set.is_empty() {
            self.classes.remove(noun);
        }
    }

    pub fn contains(&self, noun: &str) -> bool {
        self.classes.contains_key(noun)
    }

    /// All classes of `noun`; an unlisted noun is its own class.
    pub fn semantic_classes(&self, noun: &str) -> Vec<SemClass> {
        match self.classes.get(noun) {
            Some(set) => set.iter().cloned().collect(),
            None => vec![SemClass::new(noun)],
        }
    }

    /// Distinct class ids across all listed nouns.
    pub fn class_inventory(&self) -> BTreeSet<SemClass> {
        self.classes.values().flatten().cloned().collect()
    }

    pub fn class_count(&self) -> usize {
        self.class_inventory().len()
    }

    pub fn noun_count(&self) -> usize {
        self.classes.len()
    }

    pub fn parse<R: BufRead>(reader: R) -> Result<Self> {
        let mut th = Thesaurus::new();
        for line in content_lines(reader) {
            let (lineno, body) = line?;
            let (noun, ids) = body.split_once('\t').ok_or_else(|| Error::Format {
                line: lineno,
                message: "expected '<noun>\\t<class_id>(,<class_id>)*'".into(),
            })?;
            let noun = noun.trim();
            let ids: Vec<&str> = ids.split(',').map(str::trim).collect();
            if noun.is_empty() || ids.iter().any(|id| id.is_empty()) {
                return Err(Error::Format {
                    line: lineno,
                    message: "empty noun or class id".into(),
                });
            }
            th.insert(noun, ids.into_iter().map(SemClass::new));
        }
        Ok(th)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::parse(BufReader::new(file))
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        for (noun, classes) in &self.classes {
            let ids: Vec<&str> = classes.iter().map(SemClass::as_str).collect();
            writeln!(w, "{noun}\t{}", ids.join(","))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write(BufWriter::new(file))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use CaseMarker::*;

    #[test]
    fn duplicate_frames_merge_by_union() {
        let lex = CaseFrameLexicon::parse(&b"yomu ga wo\n# comment\nyomu ga ni\nhashiru ga\n"[..]).unwrap();
        assert_eq!(lex.obligatory_cases("yomu"), BTreeSet::from([Ga, Wo, Ni]));
        assert_eq!(lex.obligatory_cases("hashiru"), BTreeSet::from([Ga]));
        assert_eq!(lex.len(), 2);
    }

    #[test]
    fn unknown_case_names_line() {
        let err = CaseFrameLexicon::parse(&b"yomu ga\ntaberu ga xo\n"[..]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("unknown case 'xo'"), "{msg}");
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn verb_without_cases_is_error() {
        assert!(CaseFrameLexicon::parse(&b"yomu\n"[..]).is_err());
    }

    #[test]
    fn unlisted_verb_is_nominative_only() {
        let lex = CaseFrameLexicon::new();
        assert_eq!(lex.obligatory_cases("nanika"), BTreeSet::from([Ga]));
    }

    #[test]
    fn multi_class_noun_gets_all_classes() {
        let th = Thesaurus::parse(&b"hon\tc_artifact,c_document\nhito\tc_person\n"[..]).unwrap();
        assert_eq!(
            th.semantic_classes("hon"),
            vec![SemClass::new("c_artifact"), SemClass::new("c_document")]
        );
        assert_eq!(th.semantic_classes("hito"), vec![SemClass::new("c_person")]);
        assert_eq!(th.class_count(), 3);
    }

    #[test]
    fn unlisted_noun_is_its_own_class() {
        let th = Thesaurus::new();
        assert_eq!(th.semantic_classes("zyx"), vec![SemClass::new("zyx")]);
    }

    #[test]
    fn thesaurus_rejects_missing_tab() {
        assert!(Thesaurus::parse(&b"hon c_doc\n"[..]).is_err());
        assert!(Thesaurus::parse(&b"hon\tc_doc,\n"[..]).is_err());
    }

    #[test]
    fn files_round_trip() {
        let lex = CaseFrameLexicon::parse(&b"yomu ni ga\nyomu wo\n"[..]).unwrap();
        let mut buf = Vec::new();
        lex.write(&mut buf).unwrap();
        assert_eq!(buf, b"yomu ga wo ni\n");
        assert_eq!(CaseFrameLexicon::parse(&buf[..]).unwrap(), lex);

        let th = Thesaurus::parse(&b"hon\tc2,c1\n"[..]).unwrap();
        let mut buf = Vec::new();
        th.write(&mut buf).unwrap();
        assert_eq!(buf, b"hon\tc1,c2\n");
    }
}
