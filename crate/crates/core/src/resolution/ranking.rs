use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::detection::ZeroPronoun;
use crate::error::{Error, Result};

use super::candidates::AntecedentCandidate;
use super::{Factors, Scorer};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoredCandidate {
    pub candidate: AntecedentCandidate,
    /// `P(a|φ)`.
    pub resolution_prob: f64,
    /// `P(a|φ)·P_zero(c|v)`.
    pub combined_prob: f64,
    /// 1-based.
    pub rank: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertaintyConfig {
    /// Weight of the top probability against the top-two margin.
    pub t: f64,
    /// Minimum certainty for an output to be emitted.
    pub threshold: f64,
}

impl Default for CertaintyConfig {
    fn default() -> Self {
        CertaintyConfig {
            t: 0.5,
            threshold: 0.0,
        }
    }
}

impl CertaintyConfig {
    pub fn new(t: f64, threshold: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) || !(0.0..=1.0).contains(&threshold) {
            return Err(Error::config(format!(
                "t and certainty threshold must lie in [0, 1], got t={t} threshold={threshold}"
            )));
        }
        Ok(CertaintyConfig { t, threshold })
    }
}

/// Total order used for ranking: probability descending, then smaller
/// distance, then later position.
pub(crate) fn rank_order(a: (f64, &AntecedentCandidate), b: (f64, &AntecedentCandidate)) -> Ordering {
    b.0.partial_cmp(&a.0)
        .unwrap_or(Ordering::Equal)
        .then(a.1.distance.cmp(&b.1.distance))
        .then(b.1.location.cmp(&a.1.location))
}

/// Ranks candidates by `P(a|φ)·P_zero(c|v)` and keeps the best `k`.
pub fn resolve(
    scorer: &Scorer<'_>,
    zp: &ZeroPronoun,
    candidates: &[AntecedentCandidate],
    k: usize,
) -> Vec<ScoredCandidate> {
    let scored: Vec<(f64, f64, &AntecedentCandidate)> = candidates
        .iter()
        .map(|c| {
            let p = scorer.score(zp, c);
            (p, p * zp.detection_prob, c)
        })
        .collect();
    rank_scored(scored, k)
}

/// Same ranking from precomputed factors.
pub fn resolve_factors(
    zp: &ZeroPronoun,
    candidates: &[(Factors, AntecedentCandidate)],
    k: usize,
) -> Vec<ScoredCandidate> {
    let scored = candidates
        .iter()
        .map(|(f, c)| {
            let p = f.product();
            (p, p * zp.detection_prob, c)
        })
        .collect();
    rank_scored(scored, k)
}

fn rank_scored(mut scored: Vec<(f64, f64, &AntecedentCandidate)>, k: usize) -> Vec<ScoredCandidate> {
    // stable: remaining ties keep input order
    scored.sort_by(|a, b| rank_order((a.1, a.2), (b.1, b.2)));
    scored
        .into_iter()
        .take(k)
        .enumerate()
        .map(|(i, (resolution_prob, combined_prob, c))| ScoredCandidate {
            candidate: c.clone(),
            resolution_prob,
            combined_prob,
            rank: i + 1,
        })
        .collect()
}

/// `C = t·P1 + (1−t)·(P1 − P2)` over the top two combined probabilities;
/// a missing second candidate counts as 0 and an empty list gives 0.
pub fn certainty(scored: &[ScoredCandidate], t: f64) -> f64 {
    let p1 = scored.first().map_or(0.0, |s| s.combined_prob);
    let p2 = scored.get(1).map_or(0.0, |s| s.combined_prob);
    certainty_from(p1, p2, t)
}

pub fn certainty_from(p1: f64, p2: f64, t: f64) -> f64 {
    t * p1 + (1.0 - t) * (p1 - p2)
}
