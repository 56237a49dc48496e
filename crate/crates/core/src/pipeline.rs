//! File layouts and the train/resolve pipeline behind the command line.
//!
//! A corpus directory holds:
//!
//! | file                | content                                  |
//! |---------------------|------------------------------------------|
//! | `documents.jsonl`   | annotated documents (one JSON per line)  |
//! | `annotations.jsonl` | gold zero-pronoun annotations            |
//! | `unannotated.jsonl` | raw analyzed documents for counting      |
//! | `case_frames.txt`   | case-frame lexicon                       |
//! | `thesaurus.tsv`     | noun to semantic classes                 |
//! | `counts.tsv`        | co-occurrence counts (optional)          |
//! | `rules.toml`        | rule-baseline weights (optional)         |
//!
//! A model directory holds the trained model files plus copies of the
//! lexicon, thesaurus, counts and rules they were trained with.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::baseline::RuleTable;
use crate::cooccurrence::{extract_sharded, ClassWeighting, CooccurrenceCounts};
use crate::corpus::{
    attach_annotations, read_annotations, read_documents, save_annotations, save_documents, AnalyzedDocument,
    AnnotatedDocument, Location,
};
use crate::detection::{detect_zero_pronouns, DetectConfig, ZeroPronoun};
use crate::error::{Error, Result};
use crate::evaluation::synth::SyntheticCorpus;
use crate::evaluation::{EvalConfig, ModelKind, Resources};
use crate::lexicon::{CaseFrameLexicon, Thesaurus};
use crate::resolution::{
    certainty, extract_candidates, gold_training_pairs, resolve, CertaintyConfig, Scorer, SemanticModel,
    SyntacticModel,
};

pub const DOCUMENTS: &str = "documents.jsonl";
pub const ANNOTATIONS: &str = "annotations.jsonl";
pub const UNANNOTATED: &str = "unannotated.jsonl";
pub const CASE_FRAMES: &str = "case_frames.txt";
pub const THESAURUS: &str = "thesaurus.tsv";
pub const COUNTS: &str = "counts.tsv";
pub const RULES: &str = "rules.toml";
pub const SYNTACTIC_MODEL: &str = "syntactic.model";
pub const SEMANTIC_MODEL: &str = "semantic.model";
pub const BUNDLE_CONF: &str = "zeroref.conf";

/// Documents per parallel extraction shard.
const SHARD: usize = 64;

/// Everything read from a corpus directory.
#[derive(Clone, Debug)]
pub struct CorpusDir {
    pub documents: Vec<AnnotatedDocument>,
    pub unannotated: Vec<AnalyzedDocument>,
    pub lexicon: CaseFrameLexicon,
    pub thesaurus: Thesaurus,
    /// `counts.tsv` when present, otherwise extracted from the unannotated
    /// documents.
    pub counts: CooccurrenceCounts,
    pub rules: RuleTable,
}

impl CorpusDir {
    pub fn load(dir: &Path) -> Result<Self> {
        let documents = read_documents(&dir.join(DOCUMENTS))?;
        let annotations_path = dir.join(ANNOTATIONS);
        let annotations = if annotations_path.exists() {
            read_annotations(&annotations_path)?
        } else {
            Vec::new()
        };
        let documents = attach_annotations(documents, annotations)?;
        let unannotated_path = dir.join(UNANNOTATED);
        let unannotated = if unannotated_path.exists() {
            read_documents(&unannotated_path)?
        } else {
            Vec::new()
        };
        let lexicon = CaseFrameLexicon::load(&dir.join(CASE_FRAMES))?;
        let thesaurus = Thesaurus::load(&dir.join(THESAURUS))?;
        let counts_path = dir.join(COUNTS);
        let counts = if counts_path.exists() {
            CooccurrenceCounts::load(&counts_path)?
        } else {
            log::info!("{} missing; counting {} unannotated documents", COUNTS, unannotated.len());
            extract_sharded(&unannotated, &thesaurus, ClassWeighting::PerClass, SHARD)
        };
        let rules_path = dir.join(RULES);
        let rules = if rules_path.exists() {
            RuleTable::load(&rules_path)?
        } else {
            RuleTable::default()
        };
        Ok(CorpusDir {
            documents,
            unannotated,
            lexicon,
            thesaurus,
            counts,
            rules,
        })
    }

    pub fn resources(&self) -> Resources<'_> {
        Resources {
            lexicon: &self.lexicon,
            thesaurus: &self.thesaurus,
            counts: &self.counts,
        }
    }
}

/// Writes a synthetic corpus in corpus-directory layout (without counts).
pub fn write_synthetic(corpus: &SyntheticCorpus, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    save_documents(&dir.join(DOCUMENTS), &corpus.annotated_documents())?;
    save_annotations(&dir.join(ANNOTATIONS), &corpus.annotations())?;
    save_documents(&dir.join(UNANNOTATED), &corpus.unannotated)?;
    corpus.lexicon.save(&dir.join(CASE_FRAMES))?;
    corpus.thesaurus.save(&dir.join(THESAURUS))?;
    RuleTable::default().save(&dir.join(RULES))
}

fn save_with(path: &Path, write: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write(&mut w)?;
    w.flush().map_err(|e| Error::io(path, e))
}

fn load_with<T>(path: &Path, parse: impl FnOnce(BufReader<File>) -> Result<T>) -> Result<T> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse(BufReader::new(file)).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Trained models with the resources needed to apply them.
#[derive(Clone, Debug)]
pub struct ModelBundle {
    pub model: ModelKind,
    pub syntactic: Option<SyntacticModel>,
    pub semantic: Option<SemanticModel>,
    pub rules: RuleTable,
    pub lexicon: CaseFrameLexicon,
    pub thesaurus: Thesaurus,
    pub counts: CooccurrenceCounts,
}

impl ModelBundle {
    /// Trains the models `cfg.model` needs on every annotated document.
    pub fn train(corpus: &CorpusDir, cfg: &EvalConfig) -> Result<Self> {
        cfg.validate()?;
        let pairs = gold_training_pairs(&corpus.documents, &corpus.thesaurus)?;
        let syntactic = if cfg.model.uses_syntactic() {
            Some(SyntacticModel::train(&pairs, cfg.lambda_syn, cfg.bins.clone())?)
        } else {
            None
        };
        let semantic = if cfg.model.uses_annotated_semantic() {
            Some(SemanticModel::train_annotated(&pairs, &corpus.thesaurus, cfg.lambda)?)
        } else if cfg.model.uses_unannotated_semantic() {
            Some(SemanticModel::from_cooccurrences(&corpus.counts, &corpus.thesaurus, cfg.lambda)?)
        } else {
            None
        };
        log::info!("trained {} on {} pairs", cfg.model, pairs.len());
        Ok(ModelBundle {
            model: cfg.model,
            syntactic,
            semantic,
            rules: corpus.rules.clone(),
            lexicon: corpus.lexicon.clone(),
            thesaurus: corpus.thesaurus.clone(),
            counts: corpus.counts.clone(),
        })
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let conf = dir.join(BUNDLE_CONF);
        fs::write(&conf, format!("model\t{}\n", self.model)).map_err(|e| Error::io(conf, e))?;
        if let Some(m) = &self.syntactic {
            save_with(&dir.join(SYNTACTIC_MODEL), |w| m.write(w))?;
        }
        if let Some(m) = &self.semantic {
            save_with(&dir.join(SEMANTIC_MODEL), |w| m.write(w))?;
        }
        self.rules.save(&dir.join(RULES))?;
        self.lexicon.save(&dir.join(CASE_FRAMES))?;
        self.thesaurus.save(&dir.join(THESAURUS))?;
        self.counts.save(&dir.join(COUNTS))
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let conf = dir.join(BUNDLE_CONF);
        let model = load_with(&conf, |r| {
            let mut model = None;
            for line in r.lines() {
                let line = line?;
                match line.split_once('\t') {
                    Some(("model", m)) => model = Some(m.trim().parse::<ModelKind>()?),
                    _ if line.trim().is_empty() => {}
                    _ => return Err(Error::config(format!("unexpected line '{line}'"))),
                }
            }
            model.ok_or_else(|| Error::config("missing 'model'"))
        })?;
        let syntactic = if model.uses_syntactic() {
            Some(load_with(&dir.join(SYNTACTIC_MODEL), SyntacticModel::parse)?)
        } else {
            None
        };
        let semantic = if model.uses_annotated_semantic() || model.uses_unannotated_semantic() {
            Some(load_with(&dir.join(SEMANTIC_MODEL), SemanticModel::parse)?)
        } else {
            None
        };
        Ok(ModelBundle {
            model,
            syntactic,
            semantic,
            rules: RuleTable::load(&dir.join(RULES))?,
            lexicon: CaseFrameLexicon::load(&dir.join(CASE_FRAMES))?,
            thesaurus: Thesaurus::load(&dir.join(THESAURUS))?,
            counts: CooccurrenceCounts::load(&dir.join(COUNTS))?,
        })
    }

    pub fn scorer(&self) -> Scorer<'_> {
        Scorer {
            syntactic: self.syntactic.as_ref(),
            semantic: self.semantic.as_ref(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResolveOptions {
    pub k: usize,
    pub window: usize,
    pub certainty: CertaintyConfig,
    pub detect: DetectConfig,
}

impl Default for ResolveOptions {
    fn default() -> Self {
        ResolveOptions {
            k: 3,
            window: 3,
            certainty: CertaintyConfig::default(),
            detect: DetectConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedAntecedent {
    pub rank: usize,
    pub location: Location,
    pub lemma: String,
    /// `P(a|φ)·P_zero(c|v)`, or the integer rule score for the rule model.
    pub combined_prob: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    pub zero_pronoun: ZeroPronoun,
    pub antecedents: Vec<ResolvedAntecedent>,
    /// Absent for the rule model.
    pub certainty: Option<f64>,
    /// Certainty fell below the configured threshold.
    pub withheld: bool,
}

/// Detects zero pronouns in `doc` and ranks antecedents for each.
pub fn resolve_document(bundle: &ModelBundle, doc: &AnalyzedDocument, opts: &ResolveOptions) -> Result<Vec<Resolution>> {
    if opts.k == 0 {
        return Err(Error::config("k must be >= 1"));
    }
    let scorer = bundle.scorer();
    let zps = detect_zero_pronouns(doc, &bundle.lexicon, &bundle.counts, opts.detect);
    Ok(zps
        .into_iter()
        .map(|zp| {
            let candidates = extract_candidates(doc, &zp, opts.window, &bundle.thesaurus);
            let (antecedents, cert) = if bundle.model.is_statistical() {
                let scored = resolve(&scorer, &zp, &candidates, opts.k.max(2));
                let cert = certainty(&scored, opts.certainty.t);
                let out = scored
                    .into_iter()
                    .take(opts.k)
                    .map(|s| ResolvedAntecedent {
                        rank: s.rank,
                        location: s.candidate.location,
                        lemma: s.candidate.lemma,
                        combined_prob: s.combined_prob,
                    })
                    .collect();
                (out, Some(cert))
            } else {
                let out = bundle
                    .rules
                    .rank(doc, &zp, &candidates, opts.k)
                    .into_iter()
                    .map(|s| ResolvedAntecedent {
                        rank: s.rank,
                        location: s.candidate.location,
                        lemma: s.candidate.lemma,
                        combined_prob: s.score as f64,
                    })
                    .collect();
                (out, None)
            };
            Resolution {
                withheld: cert.is_some_and(|c| c < opts.certainty.threshold),
                zero_pronoun: zp,
                antecedents,
                certainty: cert,
            }
        })
        .collect())
}
