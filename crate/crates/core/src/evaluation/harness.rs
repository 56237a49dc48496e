use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::RuleTable;
use crate::cooccurrence::CooccurrenceCounts;
use crate::corpus::{gold_zero_pronouns, AnnotatedDocument, Antecedent, CaseMarker, GoldZeroPronoun, Location};
use crate::detection::{detect_zero_pronouns, DetectConfig, ZeroPronoun};
use crate::error::{Error, Result};
use crate::lexicon::{CaseFrameLexicon, Thesaurus};
use crate::resolution::{
    certainty, extract_candidates, resolve, training_pairs, AntecedentCandidate, DistanceBins, Scorer,
    SemanticModel, SyntacticModel,
};

/// Model menu.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Semantic model from annotated text only.
    Sem1,
    /// Semantic model from unannotated co-occurrences only.
    Sem2,
    /// Syntactic model only.
    Syn,
    /// Syntactic and annotated semantic models.
    Both1,
    /// Syntactic and unannotated semantic models.
    Both2,
    /// Hand-weighted rules.
    Rule,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::Sem1,
        ModelKind::Sem2,
        ModelKind::Syn,
        ModelKind::Both1,
        ModelKind::Both2,
        ModelKind::Rule,
    ];

    pub fn uses_syntactic(self) -> bool {
        matches!(self, ModelKind::Syn | ModelKind::Both1 | ModelKind::Both2)
    }

    pub fn uses_annotated_semantic(self) -> bool {
        matches!(self, ModelKind::Sem1 | ModelKind::Both1)
    }

    pub fn uses_unannotated_semantic(self) -> bool {
        matches!(self, ModelKind::Sem2 | ModelKind::Both2)
    }

    pub fn is_statistical(self) -> bool {
        self != ModelKind::Rule
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Sem1 => "sem1",
            ModelKind::Sem2 => "sem2",
            ModelKind::Syn => "syn",
            ModelKind::Both1 => "both1",
            ModelKind::Both2 => "both2",
            ModelKind::Rule => "rule",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|m| m.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::config(format!("unknown model '{s}' (sem1|sem2|syn|both1|both2|rule)")))
    }
}

/// Where the zero pronouns under test come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectionSource {
    /// Gold zero pronouns (perfect detection).
    Gold,
    /// The detector's output, matched against gold by slot.
    System,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalConfig {
    pub model: ModelKind,
    /// Length of the k-best output kept per zero pronoun.
    pub k: usize,
    pub window: usize,
    pub lambda: f64,
    pub lambda_syn: f64,
    pub bins: DistanceBins,
    pub t: f64,
    pub detection: DetectionSource,
    /// Rank by `P(a|φ)·P_zero(c|v)` instead of `P(a|φ)` alone.
    pub use_detection_prob: bool,
    pub detect: DetectConfig,
    pub rules: RuleTable,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            model: ModelKind::Both2,
            k: 3,
            window: 3,
            lambda: 0.5,
            lambda_syn: 0.5,
            bins: DistanceBins::default(),
            t: 0.5,
            detection: DetectionSource::Gold,
            use_detection_prob: false,
            detect: DetectConfig::default(),
            rules: RuleTable::default(),
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::config("k must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.t) {
            return Err(Error::config("t must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.detect.theta) {
            return Err(Error::config("theta_detect must lie in [0, 1]"));
        }
        if !(self.lambda >= 0.0 && self.lambda_syn >= 0.0) {
            return Err(Error::config("smoothing constants must be >= 0"));
        }
        Ok(())
    }
}

/// Lexical resources and unannotated counts shared by every fold.
#[derive(Clone, Copy, Debug)]
pub struct Resources<'a> {
    pub lexicon: &'a CaseFrameLexicon,
    pub thesaurus: &'a Thesaurus,
    pub counts: &'a CooccurrenceCounts,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedOutput {
    pub location: Location,
    /// Combined probability, or the integer rule score for the rule model.
    pub score: f64,
}

/// Outcome for one zero-pronoun slot: every gold zero pronoun gets exactly
/// one record; spurious detections get a record with `gold = None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub doc_id: String,
    pub sentence: usize,
    pub predicate_token: usize,
    pub verb: String,
    pub case: CaseMarker,
    pub gold: Option<Antecedent>,
    pub detected: bool,
    pub detection_prob: f64,
    pub candidate_count: usize,
    pub gold_in_candidates: bool,
    pub output: Vec<RankedOutput>,
    pub certainty: Option<f64>,
}

impl EvalRecord {
    pub fn is_gold(&self) -> bool {
        self.gold.is_some()
    }

    pub fn gold_location(&self) -> Option<Location> {
        self.gold.and_then(|g| g.location())
    }

    /// A detected gold zero pronoun with a textual antecedent.
    pub fn is_resolvable(&self) -> bool {
        self.detected && self.gold_location().is_some()
    }

    pub fn correct_at(&self, k: usize) -> bool {
        match self.gold_location() {
            Some(g) => self.output.iter().take(k).any(|o| o.location == g),
            None => false,
        }
    }
}

/// Per-document preprocessing reused across folds.
pub(crate) struct PreparedDocument<'a> {
    pub doc: &'a AnnotatedDocument,
    pub gold: Vec<GoldZeroPronoun>,
    pub pairs: Vec<(ZeroPronoun, AntecedentCandidate)>,
}

pub(crate) fn prepare<'a>(corpus: &'a [AnnotatedDocument], thesaurus: &Thesaurus) -> Result<Vec<PreparedDocument<'a>>> {
    corpus
        .iter()
        .map(|doc| {
            let gold = gold_zero_pronouns(&doc.document, &doc.annotations)?;
            let pairs = training_pairs(&doc.document, &gold, thesaurus);
            Ok(PreparedDocument { doc, gold, pairs })
        })
        .collect()
}

/// Models trained for one fold.
pub(crate) struct FoldModels {
    pub syntactic: Option<SyntacticModel>,
    pub semantic: Option<SemanticModel>,
}

impl FoldModels {
    pub fn scorer(&self) -> Scorer<'_> {
        Scorer {
            syntactic: self.syntactic.as_ref(),
            semantic: self.semantic.as_ref(),
        }
    }
}

pub(crate) fn train_fold(
    prepared: &[PreparedDocument<'_>],
    training: &[usize],
    sem2: Option<&SemanticModel>,
    thesaurus: &Thesaurus,
    cfg: &EvalConfig,
) -> Result<FoldModels> {
    let pairs = || training.iter().flat_map(|&i| prepared[i].pairs.iter());
    let syntactic = if cfg.model.uses_syntactic() {
        Some(SyntacticModel::train(pairs(), cfg.lambda_syn, cfg.bins.clone())?)
    } else {
        None
    };
    let semantic = if cfg.model.uses_annotated_semantic() {
        Some(SemanticModel::train_annotated(pairs(), thesaurus, cfg.lambda)?)
    } else if cfg.model.uses_unannotated_semantic() {
        Some(sem2.expect("unannotated semantic model provided").clone())
    } else {
        None
    };
    Ok(FoldModels { syntactic, semantic })
}

pub(crate) fn evaluate_document(
    prepared: &PreparedDocument<'_>,
    models: &FoldModels,
    res: Resources<'_>,
    cfg: &EvalConfig,
) -> Vec<EvalRecord> {
    let doc = &prepared.doc.document;
    let gold_by_slot: BTreeMap<_, _> = prepared.gold.iter().map(|g| (g.zero.slot(), g)).collect();

    // (zero pronoun, gold referent, detected)
    let mut slots: Vec<(ZeroPronoun, Option<Antecedent>, bool)> = match cfg.detection {
        DetectionSource::Gold => prepared
            .gold
            .iter()
            .map(|g| {
                let mut zp = g.zero.clone();
                zp.detection_prob = res.counts.p_zero_with(zp.case, &zp.verb, cfg.detect.p_zero);
                (zp, Some(g.antecedent), true)
            })
            .collect(),
        DetectionSource::System => {
            let detected = detect_zero_pronouns(doc, res.lexicon, res.counts, cfg.detect);
            let mut out: Vec<_> = detected
                .iter()
                .map(|zp| (zp.clone(), gold_by_slot.get(&zp.slot()).map(|g| g.antecedent), true))
                .collect();
            let found: std::collections::BTreeSet<_> = detected.iter().map(ZeroPronoun::slot).collect();
            for g in &prepared.gold {
                if !found.contains(&g.zero.slot()) {
                    out.push((g.zero.clone(), Some(g.antecedent), false));
                }
            }
            out.sort_by_key(|(zp, _, _)| zp.slot());
            out
        }
    };

    let scorer = models.scorer();
    slots
        .drain(..)
        .map(|(zp, gold, detected)| {
            let mut record = EvalRecord {
                doc_id: zp.doc_id.clone(),
                sentence: zp.sentence,
                predicate_token: zp.predicate_token,
                verb: zp.verb.clone(),
                case: zp.case,
                gold,
                detected,
                detection_prob: zp.detection_prob,
                candidate_count: 0,
                gold_in_candidates: false,
                output: Vec::new(),
                certainty: None,
            };
            if !detected {
                return record;
            }
            let candidates = extract_candidates(doc, &zp, cfg.window, res.thesaurus);
            record.candidate_count = candidates.len();
            let gold_loc = gold.and_then(|g| g.location());
            record.gold_in_candidates = gold_loc.is_some_and(|g| candidates.iter().any(|c| c.location == g));
            let mut ranking_zp = zp;
            if !cfg.use_detection_prob {
                ranking_zp.detection_prob = 1.0;
            }
            if cfg.model.is_statistical() {
                // certainty needs the runner-up even when k = 1
                let scored = resolve(&scorer, &ranking_zp, &candidates, cfg.k.max(2));
                record.certainty = Some(certainty(&scored, cfg.t));
                record.output = scored
                    .iter()
                    .take(cfg.k)
                    .map(|s| RankedOutput {
                        location: s.candidate.location,
                        score: s.combined_prob,
                    })
                    .collect();
            } else {
                record.output = cfg
                    .rules
                    .rank(doc, &ranking_zp, &candidates, cfg.k)
                    .iter()
                    .map(|s| RankedOutput {
                        location: s.candidate.location,
                        score: s.score as f64,
                    })
                    .collect();
            }
            record
        })
        .collect()
}

pub(crate) fn unannotated_model(
    res: Resources<'_>,
    cfg: &EvalConfig,
) -> Result<Option<SemanticModel>> {
    if cfg.model.uses_unannotated_semantic() {
        Ok(Some(SemanticModel::from_cooccurrences(res.counts, res.thesaurus, cfg.lambda)?))
    } else {
        Ok(None)
    }
}

/// Runs folds in parallel; `training(i)` lists the documents that train the
/// fold testing document `i`.
pub(crate) fn run_folds<F>(
    prepared: &[PreparedDocument<'_>],
    res: Resources<'_>,
    cfg: &EvalConfig,
    sem2: Option<&SemanticModel>,
    training: F,
) -> Result<Vec<EvalRecord>>
where
    F: Fn(usize) -> Vec<usize> + Sync,
{
    let folds: Vec<Vec<EvalRecord>> = (0..prepared.len())
        .into_par_iter()
        .map(|i| {
            let train = training(i);
            assert!(!train.contains(&i), "fold {i} trains on its test document");
            let models = train_fold(prepared, &train, sem2, res.thesaurus, cfg)?;
            Ok(evaluate_document(&prepared[i], &models, res, cfg))
        })
        .collect::<Result<_>>()?;
    Ok(folds.into_iter().flatten().collect())
}

/// Leave-one-out cross-validation: each document is tested against models
/// trained on all others. Unannotated counts come from `res` and never from
/// the test document.
pub fn loocv(corpus: &[AnnotatedDocument], res: Resources<'_>, cfg: &EvalConfig) -> Result<Vec<EvalRecord>> {
    cfg.validate()?;
    if corpus.len() < 2 {
        return Err(Error::config(format!(
            "leave-one-out needs at least 2 documents, got {}",
            corpus.len()
        )));
    }
    let prepared = prepare(corpus, res.thesaurus)?;
    let sem2 = unannotated_model(res, cfg)?;
    let n = corpus.len();
    run_folds(&prepared, res, cfg, sem2.as_ref(), |i| (0..n).filter(|&j| j != i).collect())
}

/// Doc ids used to train each fold, for inspection.
pub fn fold_training_ids(corpus: &[AnnotatedDocument]) -> Vec<(String, Vec<String>)> {
    corpus
        .iter()
        .enumerate()
        .map(|(i, test)| {
            let train = corpus
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, d)| d.document.doc_id.clone())
                .collect();
            (test.document.doc_id.clone(), train)
        })
        .collect()
}
