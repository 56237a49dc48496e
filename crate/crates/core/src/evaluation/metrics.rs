use serde::{Deserialize, Serialize};

use super::harness::EvalRecord;

/// Share of resolvable records whose gold antecedent is among the top `k`.
///
/// The denominator counts detected gold zero pronouns with a textual
/// antecedent; `None` when there are none.
pub fn accuracy_at_k(records: &[EvalRecord], k: usize) -> Option<f64> {
    assert!(k >= 1, "k must be >= 1");
    let (hits, total) = records
        .iter()
        .filter(|r| r.is_resolvable())
        .fold((0usize, 0usize), |(h, t), r| (h + r.correct_at(k) as usize, t + 1));
    (total > 0).then(|| hits as f64 / total as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveMode {
    /// coverage = correct detections / gold zero pronouns;
    /// accuracy = correct detections / detections.
    Detection,
    /// coverage = emitted antecedents / correctly detected zero pronouns;
    /// accuracy = correct top-1 antecedents / emitted antecedents.
    Resolution,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub threshold: f64,
    pub coverage: f64,
    pub accuracy: Option<f64>,
    /// Numerator of coverage.
    pub covered: usize,
    /// Denominator of coverage.
    pub coverage_total: usize,
    /// Numerator of accuracy.
    pub correct: usize,
    /// Denominator of accuracy.
    pub emitted: usize,
}

fn passes(r: &EvalRecord, threshold: f64) -> bool {
    r.detected && r.certainty.is_some_and(|c| c >= threshold)
}

/// Coverage and accuracy after withholding outputs whose certainty falls
/// below each threshold.
pub fn coverage_accuracy_curve(records: &[EvalRecord], thresholds: &[f64], mode: CurveMode) -> Vec<CurvePoint> {
    thresholds
        .iter()
        .map(|&threshold| {
            let (covered, coverage_total, correct, emitted) = match mode {
                CurveMode::Detection => {
                    let total = records.iter().filter(|r| r.is_gold()).count();
                    let emitted: Vec<_> = records.iter().filter(|r| passes(r, threshold)).collect();
                    let correct = emitted.iter().filter(|r| r.is_gold()).count();
                    (correct, total, correct, emitted.len())
                }
                CurveMode::Resolution => {
                    let base: Vec<_> = records.iter().filter(|r| r.is_resolvable()).collect();
                    let emitted: Vec<_> = base
                        .iter()
                        .filter(|r| passes(r, threshold) && !r.output.is_empty())
                        .collect();
                    let correct = emitted.iter().filter(|r| r.correct_at(1)).count();
                    (emitted.len(), base.len(), correct, emitted.len())
                }
            };
            CurvePoint {
                threshold,
                coverage: if coverage_total > 0 {
                    covered as f64 / coverage_total as f64
                } else {
                    0.0
                },
                accuracy: (emitted > 0).then(|| correct as f64 / emitted as f64),
                covered,
                coverage_total,
                correct,
                emitted,
            }
        })
        .collect()
}

/// Zero plus the percentiles of observed certainty values, ascending and
/// deduplicated.
pub fn certainty_thresholds(records: &[EvalRecord], steps: usize) -> Vec<f64> {
    let mut values: Vec<f64> = records
        .iter()
        .filter(|r| r.detected)
        .filter_map(|r| r.certainty)
        .collect();
    values.sort_by(f64::total_cmp);
    let mut out = vec![0.0];
    if !values.is_empty() {
        for i in 1..=steps {
            let idx = ((values.len() - 1) * i) / steps.max(1);
            out.push(values[idx]);
        }
        // one step past the maximum empties the output
        out.push(values[values.len() - 1] * 1.5 + f64::MIN_POSITIVE);
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Candidate-count statistics and the uniform-random reference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomFloor {
    pub resolvable: usize,
    pub mean_candidates: f64,
    /// `1 / mean_candidates`.
    pub floor: f64,
    /// Expected top-1 accuracy of picking uniformly among the candidates.
    pub expected_random_accuracy: f64,
}

pub fn random_floor(records: &[EvalRecord]) -> Option<RandomFloor> {
    let base: Vec<_> = records.iter().filter(|r| r.is_resolvable()).collect();
    if base.is_empty() {
        return None;
    }
    let n = base.len() as f64;
    let mean_candidates = base.iter().map(|r| r.candidate_count as f64).sum::<f64>() / n;
    let expected = base
        .iter()
        .filter(|r| r.gold_in_candidates && r.candidate_count > 0)
        .map(|r| 1.0 / r.candidate_count as f64)
        .sum::<f64>()
        / n;
    Some(RandomFloor {
        resolvable: base.len(),
        mean_candidates,
        floor: if mean_candidates > 0.0 { 1.0 / mean_candidates } else { 0.0 },
        expected_random_accuracy: expected,
    })
}

/// Accuracy of `curve` at `coverage`, linearly interpolated between the
/// neighbouring points that have an accuracy.
pub fn accuracy_at_coverage(curve: &[CurvePoint], coverage: f64) -> Option<f64> {
    let mut pts: Vec<(f64, f64)> = curve
        .iter()
        .filter_map(|p| p.accuracy.map(|a| (p.coverage, a)))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| a.0 == b.0);
    let (first, last) = (pts.first()?, pts.last()?);
    if coverage < first.0 || coverage > last.0 {
        return None;
    }
    let i = pts.partition_point(|p| p.0 < coverage);
    let hi = pts[i];
    if hi.0 == coverage || i == 0 {
        return Some(hi.1);
    }
    let lo = pts[i - 1];
    let w = (coverage - lo.0) / (hi.0 - lo.0);
    Some(lo.1 + w * (hi.1 - lo.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Antecedent, CaseMarker, Location};
    use crate::evaluation::harness::RankedOutput;

    fn record(gold: Option<Antecedent>, detected: bool, ranks: &[usize], certainty: f64) -> EvalRecord {
        EvalRecord {
            doc_id: "d".into(),
            sentence: 1,
            predicate_token: 9,
            verb: "v".into(),
            case: CaseMarker::Ga,
            gold,
            detected,
            detection_prob: 1.0,
            candidate_count: 4,
            gold_in_candidates: true,
            output: ranks
                .iter()
                .map(|&t| RankedOutput {
                    location: Location::new(0, t),
                    score: 0.1,
                })
                .collect(),
            certainty: detected.then_some(certainty),
        }
    }

    fn mention(t: usize) -> Option<Antecedent> {
        Some(Antecedent::Mention(Location::new(0, t)))
    }

    #[test]
    fn k_best_accuracy() {
        // gold at rank 1 and rank 3
        let recs = vec![
            record(mention(0), true, &[0, 1, 2], 0.5),
            record(mention(2), true, &[0, 1, 2], 0.5),
        ];
        assert_eq!(accuracy_at_k(&recs, 1), Some(0.5));
        assert_eq!(accuracy_at_k(&recs, 2), Some(0.5));
        assert_eq!(accuracy_at_k(&recs, 3), Some(1.0));
        assert_eq!(accuracy_at_k(&[], 1), None);
        let undetected = vec![record(mention(0), false, &[], 0.0)];
        assert_eq!(accuracy_at_k(&undetected, 1), None);
    }

    #[test]
    fn exophoric_and_spurious_records_are_not_resolvable() {
        let recs = vec![
            record(Some(Antecedent::Exophoric), true, &[0], 0.5),
            record(None, true, &[0], 0.5),
            record(mention(0), true, &[0], 0.5),
        ];
        assert_eq!(accuracy_at_k(&recs, 1), Some(1.0));
    }

    #[test]
    fn detection_curve_counts() {
        let recs = vec![
            record(mention(0), true, &[0], 0.9),
            record(None, true, &[0], 0.2),
            record(mention(1), false, &[], 0.0),
            record(Some(Antecedent::Exophoric), true, &[0], 0.6),
        ];
        let curve = coverage_accuracy_curve(&recs, &[0.0, 0.5, 0.95], CurveMode::Detection);
        assert_eq!((curve[0].covered, curve[0].coverage_total, curve[0].emitted), (2, 3, 3));
        assert_eq!(curve[1].accuracy, Some(1.0));
        assert_eq!(curve[2].coverage, 0.0);
        assert_eq!(curve[2].accuracy, None);
    }

    #[test]
    fn resolution_curve_counts() {
        let recs = vec![
            record(mention(0), true, &[0], 0.9),
            record(mention(1), true, &[0], 0.3),
            record(None, true, &[0], 0.9),
        ];
        let curve = coverage_accuracy_curve(&recs, &[0.0, 0.5], CurveMode::Resolution);
        assert_eq!(curve[0].coverage, 1.0);
        assert_eq!(curve[0].accuracy, Some(0.5));
        assert_eq!(curve[1].coverage, 0.5);
        assert_eq!(curve[1].accuracy, Some(1.0));
    }

    #[test]
    fn thresholds_include_zero_and_an_empty_point() {
        let recs = vec![record(mention(0), true, &[0], 0.2), record(mention(0), true, &[0], 0.4)];
        let th = certainty_thresholds(&recs, 4);
        assert_eq!(th[0], 0.0);
        assert!(th.windows(2).all(|w| w[0] < w[1]));
        let curve = coverage_accuracy_curve(&recs, &th, CurveMode::Resolution);
        assert_eq!(curve.last().unwrap().coverage, 0.0);
    }

    #[test]
    fn interpolation() {
        let pt = |coverage: f64, accuracy: f64| CurvePoint {
            threshold: 0.0,
            coverage,
            accuracy: Some(accuracy),
            covered: 0,
            coverage_total: 0,
            correct: 0,
            emitted: 0,
        };
        let curve = vec![pt(1.0, 0.5), pt(0.5, 0.7)];
        assert_eq!(accuracy_at_coverage(&curve, 0.75), Some(0.6));
        assert_eq!(accuracy_at_coverage(&curve, 0.5), Some(0.7));
        assert_eq!(accuracy_at_coverage(&curve, 0.2), None);
    }

    #[test]
    fn random_floor_stats() {
        let mut a = record(mention(0), true, &[0], 0.1);
        a.candidate_count = 2;
        let mut b = record(mention(0), true, &[0], 0.1);
        b.candidate_count = 6;
        b.gold_in_candidates = false;
        let f = random_floor(&[a, b]).unwrap();
        assert_eq!(f.mean_candidates, 4.0);
        assert_eq!(f.floor, 0.25);
        assert_eq!(f.expected_random_accuracy, 0.25);
    }
}
