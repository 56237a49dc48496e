use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cooccurrence::{extract_cooccurrences, ClassWeighting, CooccurrenceCounts};
use crate::corpus::{AnalyzedDocument, AnnotatedDocument};
use crate::error::{Error, Result};
use crate::resolution::SemanticModel;

use super::harness::{prepare, run_folds, DetectionSource, EvalConfig, ModelKind, Resources};
use super::metrics::accuracy_at_k;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    /// Number of annotated training documents per fold.
    Annotated,
    /// Number of unannotated documents behind the co-occurrence counts.
    Unannotated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub size: usize,
    pub accuracy: Option<f64>,
    pub resolvable: usize,
}

fn check_sizes(sizes: &[usize], max: usize, min: usize, what: &str) -> Result<()> {
    if !sizes.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::config("sweep sizes must be strictly ascending"));
    }
    for &s in sizes {
        if s < min || s > max {
            return Err(Error::config(format!("{what} size {s} outside {min}..={max}")));
        }
    }
    Ok(())
}

/// Accuracy@1 of the syntactic plus unannotated-semantic model as one
/// training resource grows.
///
/// Training documents are prefixes of a seeded shuffle. On the annotated
/// axis each fold takes the first `size` shuffled documents other than its
/// test document, so the largest size (`N - 1`) reproduces leave-one-out.
/// On the unannotated axis `unannotated` replaces `res.counts`.
pub fn corpus_size_sweep(
    corpus: &[AnnotatedDocument],
    unannotated: &[AnalyzedDocument],
    res: Resources<'_>,
    cfg: &EvalConfig,
    sizes: &[usize],
    axis: SweepAxis,
    seed: u64,
) -> Result<Vec<SweepPoint>> {
    let cfg = EvalConfig {
        model: ModelKind::Both2,
        detection: DetectionSource::Gold,
        ..cfg.clone()
    };
    cfg.validate()?;
    if corpus.len() < 2 {
        return Err(Error::config("sweep needs at least 2 annotated documents"));
    }
    let prepared = prepare(corpus, res.thesaurus)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let point = |size: usize, records: Vec<_>| {
        let resolvable = records.iter().filter(|r: &&super::EvalRecord| r.is_resolvable()).count();
        SweepPoint {
            size,
            accuracy: accuracy_at_k(&records, 1),
            resolvable,
        }
    };

    match axis {
        SweepAxis::Annotated => {
            check_sizes(sizes, corpus.len() - 1, 1, "annotated")?;
            let mut order: Vec<usize> = (0..corpus.len()).collect();
            order.shuffle(&mut rng);
            let sem2 = SemanticModel::from_cooccurrences(res.counts, res.thesaurus, cfg.lambda)?;
            sizes
                .iter()
                .map(|&size| {
                    let records = run_folds(&prepared, res, &cfg, Some(&sem2), |i| {
                        let mut train: Vec<usize> = order.iter().copied().filter(|&j| j != i).take(size).collect();
                        train.sort_unstable();
                        train
                    })?;
                    log::info!("annotated sweep: {size} documents");
                    Ok(point(size, records))
                })
                .collect()
        }
        SweepAxis::Unannotated => {
            check_sizes(sizes, unannotated.len(), 0, "unannotated")?;
            let mut order: Vec<&AnalyzedDocument> = unannotated.iter().collect();
            order.shuffle(&mut rng);
            let n = corpus.len();
            let mut counts = CooccurrenceCounts::new();
            let mut taken = 0;
            let mut out = Vec::with_capacity(sizes.len());
            for &size in sizes {
                counts.merge(&extract_cooccurrences(
                    order[taken..size].iter().copied(),
                    res.thesaurus,
                    ClassWeighting::PerClass,
                ));
                taken = size;
                let sem2 = SemanticModel::from_cooccurrences(&counts, res.thesaurus, cfg.lambda)?;
                let fold_res = Resources {
                    counts: &counts,
                    ..res
                };
                let records = run_folds(&prepared, fold_res, &cfg, Some(&sem2), |i| {
                    (0..n).filter(|&j| j != i).collect()
                })?;
                log::info!("unannotated sweep: {size} documents");
                out.push(point(size, records));
            }
            Ok(out)
        }
    }
}
