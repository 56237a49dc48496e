//! Hand-weighted rule baseline: particle salience, sentence distance,
//! relative-clause membership and conjunctive-particle linkage. No semantic
//! information is consulted.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{AnalyzedDocument, Pos};
use crate::detection::ZeroPronoun;
use crate::error::{Error, Result};
use crate::resolution::AntecedentCandidate;

/// Weight key for bare nouns and particles missing from the table.
pub const UNK_WEIGHT: &str = "UNK";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleTable {
    pub distance_penalty: i64,
    pub relative_clause_penalty: i64,
    pub conjunctive_bonus: i64,
    /// Lemmas of particle tokens that join clauses.
    pub conjunctive_particles: BTreeSet<String>,
    pub particle_weights: BTreeMap<String, i64>,
}

impl Default for RuleTable {
    fn default() -> Self {
        RuleTable {
            distance_penalty: 1,
            relative_clause_penalty: 2,
            conjunctive_bonus: 1,
            conjunctive_particles: ["te", "node", "kara", "nagara", "ba", "shi"]
                .into_iter()
                .map(String::from)
                .collect(),
            particle_weights: [("wa", 4), ("ga", 3), ("wo", 2), ("ni", 1), (UNK_WEIGHT, 0)]
                .into_iter()
                .map(|(p, w)| (p.to_string(), w))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RuleScored {
    pub candidate: AntecedentCandidate,
    pub score: i64,
    pub rank: usize,
}

impl RuleTable {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(format!("rule table: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("rule table serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml()).map_err(|e| Error::io(path, e))
    }

    pub fn particle_weight(&self, particle: Option<&str>) -> i64 {
        particle
            .and_then(|p| self.particle_weights.get(p))
            .or_else(|| self.particle_weights.get(UNK_WEIGHT))
            .copied()
            .unwrap_or(0)
    }

    /// A same-sentence candidate whose clause is joined to the predicate's
    /// clause by a conjunctive particle token between them.
    pub fn conjunctive_link(&self, doc: &AnalyzedDocument, zp: &ZeroPronoun, cand: &AntecedentCandidate) -> bool {
        if cand.distance != 0 {
            return false;
        }
        let Some(sentence) = doc.sentences.get(zp.sentence) else {
            return false;
        };
        let end = zp.predicate_token.min(sentence.tokens.len());
        let start = (cand.location.token + 1).min(end);
        sentence.tokens[start..end]
            .iter()
            .any(|t| t.pos == Pos::Particle && self.conjunctive_particles.contains(&t.lemma))
    }

    pub fn score(&self, doc: &AnalyzedDocument, zp: &ZeroPronoun, cand: &AntecedentCandidate) -> i64 {
        let mut s = self.particle_weight(cand.particle.as_deref())
            - cand.distance as i64 * self.distance_penalty;
        if cand.in_relative_clause {
            s -= self.relative_clause_penalty;
        }
        if self.conjunctive_link(doc, zp, cand) {
            s += self.conjunctive_bonus;
        }
        s
    }

    /// Ranks by score, then recency, then input order; keeps the best `k`.
    pub fn rank(
        &self,
        doc: &AnalyzedDocument,
        zp: &ZeroPronoun,
        candidates: &[AntecedentCandidate],
        k: usize,
    ) -> Vec<RuleScored> {
        let mut scored: Vec<(i64, &AntecedentCandidate)> =
            candidates.iter().map(|c| (self.score(doc, zp, c), c)).collect();
        scored.sort_by(|a, b| b.0.cmp(&a.0).then(b.1.location.cmp(&a.1.location)));
        scored
            .into_iter()
            .take(k)
            .enumerate()
            .map(|(i, (score, c))| RuleScored {
                candidate: c.clone(),
                score,
                rank: i + 1,
            })
            .collect()
    }
}
