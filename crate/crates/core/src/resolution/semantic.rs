//! Semantic factor `P(n|v,c)`, estimated either from gold antecedents
//! (annotated) or from verb/case-noun co-occurrences (unannotated).

use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::cooccurrence::{CooccurrenceCounts, SlotClassCounts, Smoothing};
use crate::corpus::CaseMarker;
use crate::detection::ZeroPronoun;
use crate::error::{Error, Result};
use crate::lexicon::{SemClass, Thesaurus};

use super::candidates::AntecedentCandidate;
use super::model_file::{self, Record};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SemanticSource {
    /// Counts from gold antecedents ("Sem1").
    Annotated,
    /// Counts from unannotated co-occurrences ("Sem2").
    Unannotated,
}

impl fmt::Display for SemanticSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SemanticSource::Annotated => "sem1",
            SemanticSource::Unannotated => "sem2",
        })
    }
}

impl FromStr for SemanticSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sem1" => Ok(SemanticSource::Annotated),
            "sem2" => Ok(SemanticSource::Unannotated),
            other => Err(Error::config(format!("unknown semantic source '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SemanticModel {
    source: SemanticSource,
    lambda: f64,
    inventory: BTreeSet<SemClass>,
    counts: SlotClassCounts,
}

impl SemanticModel {
    fn build(source: SemanticSource, lambda: f64, counts: SlotClassCounts, thesaurus: &Thesaurus) -> Result<Self> {
        if !(lambda >= 0.0) {
            return Err(Error::config("lambda must be >= 0"));
        }
        let mut inventory = thesaurus.class_inventory();
        inventory.extend(counts.classes());
        Ok(SemanticModel {
            source,
            lambda,
            inventory,
            counts,
        })
    }

    /// Counts each class of each gold antecedent once against its `(v, c)`.
    pub fn train_annotated<'a>(
        pairs: impl IntoIterator<Item = &'a (ZeroPronoun, AntecedentCandidate)>,
        thesaurus: &Thesaurus,
        lambda: f64,
    ) -> Result<Self> {
        let mut counts = SlotClassCounts::default();
        let mut seen = 0usize;
        for (zp, cand) in pairs {
            seen += 1;
            for n in &cand.classes {
                counts.add(n, &zp.verb, zp.case, 1.0);
            }
        }
        if seen == 0 {
            return Err(Error::EmptyTraining("semantic model needs at least one pair"));
        }
        Self::build(SemanticSource::Annotated, lambda, counts, thesaurus)
    }

    pub fn from_cooccurrences(counts: &CooccurrenceCounts, thesaurus: &Thesaurus, lambda: f64) -> Result<Self> {
        Self::build(
            SemanticSource::Unannotated,
            lambda,
            counts.class_counts().clone(),
            thesaurus,
        )
    }

    pub fn source(&self) -> SemanticSource {
        self.source
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn inventory(&self) -> &BTreeSet<SemClass> {
        &self.inventory
    }

    pub fn counts(&self) -> &SlotClassCounts {
        &self.counts
    }

    pub fn prob(&self, class: &SemClass, verb: &str, case: CaseMarker) -> f64 {
        self.counts.prob(
            class,
            verb,
            case,
            Smoothing {
                lambda: self.lambda,
                classes: self.inventory.len(),
            },
        )
    }

    /// Best class probability of a candidate.
    pub fn factor(&self, classes: &[SemClass], verb: &str, case: CaseMarker) -> f64 {
        classes
            .iter()
            .map(|n| self.prob(n, verb, case))
            .fold(0.0, f64::max)
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        for n in &self.inventory {
            writeln!(w, "class\t{n}")?;
        }
        writeln!(w, "lambda\t{}", self.lambda)?;
        let mut rows: Vec<_> = self.counts.iter().collect();
        rows.sort_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
        for (n, v, c, f) in rows {
            writeln!(w, "nvc\t{n}\t{v}\t{c}\t{f}")?;
        }
        writeln!(w, "source\t{}", self.source)?;
        w.flush()?;
        Ok(())
    }

    pub fn parse<R: BufRead>(reader: R) -> Result<Self> {
        let mut inventory = BTreeSet::new();
        let mut lambda = None;
        let mut source = None;
        let mut counts = SlotClassCounts::default();
        for Record { line, fields } in model_file::records(reader)? {
            let f: Vec<&str> = fields.iter().map(String::as_str).collect();
            match f.as_slice() {
                ["class", n] if !n.is_empty() => {
                    inventory.insert(SemClass::new(*n));
                }
                ["lambda", l] => lambda = Some(model_file::number::<f64>(line, l)?),
                ["source", s] => source = Some(s.parse()?),
                ["nvc", n, v, c, w] if !n.is_empty() => {
                    let c = model_file::case(line, c)?;
                    counts.add(&SemClass::new(*n), v, c, model_file::number(line, w)?);
                }
                _ => return Err(model_file::unexpected(line)),
            }
        }
        inventory.extend(counts.classes());
        Ok(SemanticModel {
            source: source.ok_or_else(|| Error::config("semantic model lacks 'source'"))?,
            lambda: lambda.ok_or_else(|| Error::config("semantic model lacks 'lambda'"))?,
            inventory,
            counts,
        })
    }
}
