use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::Antecedent;
use crate::error::Result;

use super::harness::{DetectionSource, EvalRecord, ModelKind};
use super::metrics::{accuracy_at_k, random_floor, CurvePoint, RandomFloor};
use super::sweep::SweepPoint;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KAccuracy {
    pub k: usize,
    pub accuracy: Option<f64>,
    pub correct: usize,
}

/// Counts and accuracies of one evaluation run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub model: ModelKind,
    pub detection: DetectionSource,
    pub use_detection_prob: bool,
    /// Gold zero pronouns, exophoric ones included.
    pub gold: usize,
    pub exophoric: usize,
    pub detected_gold: usize,
    pub spurious: usize,
    /// Detected gold zero pronouns with a textual antecedent; the accuracy
    /// denominator.
    pub resolvable: usize,
    pub gold_in_candidates: usize,
    pub accuracy: Vec<KAccuracy>,
    pub random: Option<RandomFloor>,
}

impl MetricsReport {
    pub fn new(
        model: ModelKind,
        detection: DetectionSource,
        use_detection_prob: bool,
        records: &[EvalRecord],
        ks: &[usize],
    ) -> Self {
        let count = |f: &dyn Fn(&EvalRecord) -> bool| records.iter().filter(|r| f(r)).count();
        MetricsReport {
            model,
            detection,
            use_detection_prob,
            gold: count(&|r| r.is_gold()),
            exophoric: count(&|r| r.gold == Some(Antecedent::Exophoric)),
            detected_gold: count(&|r| r.is_gold() && r.detected),
            spurious: count(&|r| !r.is_gold()),
            resolvable: count(&|r| r.is_resolvable()),
            gold_in_candidates: count(&|r| r.is_resolvable() && r.gold_in_candidates),
            accuracy: ks
                .iter()
                .map(|&k| KAccuracy {
                    k,
                    accuracy: accuracy_at_k(records, k),
                    correct: count(&|r| r.is_resolvable() && r.correct_at(k)),
                })
                .collect(),
            random: random_floor(records),
        }
    }

    pub fn accuracy_at(&self, k: usize) -> Option<f64> {
        self.accuracy.iter().find(|a| a.k == k).and_then(|a| a.accuracy)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let ranking = if self.use_detection_prob {
            "P(a|phi)*P_zero"
        } else {
            "P(a|phi)"
        };
        let detection = match self.detection {
            DetectionSource::Gold => "gold",
            DetectionSource::System => "system",
        };
        let _ = writeln!(s, "model      {}", self.model);
        let _ = writeln!(s, "detection  {detection}");
        let _ = writeln!(s, "ranking    {ranking}");
        let _ = writeln!(s, "gold zero pronouns     {:>6}", self.gold);
        let _ = writeln!(s, "  exophoric            {:>6}", self.exophoric);
        let _ = writeln!(s, "  detected             {:>6}", self.detected_gold);
        let _ = writeln!(s, "spurious detections    {:>6}", self.spurious);
        let _ = writeln!(s, "resolvable             {:>6}", self.resolvable);
        let _ = writeln!(s, "gold among candidates  {:>6}", self.gold_in_candidates);
        let _ = writeln!(s);
        let _ = writeln!(s, "{:>3}  {:>8}  {:>7}", "k", "accuracy", "correct");
        for a in &self.accuracy {
            let _ = writeln!(s, "{:>3}  {:>8}  {:>7}", a.k, percent(a.accuracy), a.correct);
        }
        if let Some(r) = &self.random {
            let _ = writeln!(s);
            let _ = writeln!(s, "mean candidates        {:.2}", r.mean_candidates);
            let _ = writeln!(s, "random floor           {}", percent(Some(r.floor)));
            let _ = writeln!(s, "expected random top-1  {}", percent(Some(r.expected_random_accuracy)));
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "note: exophoric zero pronouns are excluded from accuracy");
        if self.model == ModelKind::Rule {
            let _ = writeln!(s, "note: conjunctive linkage is approximated by conjunctive particle lemmas");
        }
        s
    }
}

fn percent(x: Option<f64>) -> String {
    match x {
        Some(x) => format!("{:.1}%", 100.0 * x),
        None => "-".to_string(),
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_curve_csv<W: Write>(w: W, points: &[CurvePoint]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "threshold",
        "coverage",
        "accuracy",
        "covered",
        "coverage_total",
        "correct",
        "emitted",
    ])?;
    for p in points {
        out.write_record([
            p.threshold.to_string(),
            p.coverage.to_string(),
            opt(p.accuracy),
            p.covered.to_string(),
            p.coverage_total.to_string(),
            p.correct.to_string(),
            p.emitted.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_sweep_csv<W: Write>(w: W, points: &[SweepPoint]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["size", "accuracy", "resolvable"])?;
    for p in points {
        out.write_record([p.size.to_string(), opt(p.accuracy), p.resolvable.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_records<W: Write>(mut w: W, records: &[EvalRecord]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{CaseMarker, Location};
    use crate::evaluation::harness::RankedOutput;

    fn rec(gold: Option<Antecedent>, detected: bool, hit: bool) -> EvalRecord {
        EvalRecord {
            doc_id: "d".into(),
            sentence: 0,
            predicate_token: 5,
            verb: "v".into(),
            case: CaseMarker::Wo,
            gold,
            detected,
            detection_prob: 0.5,
            candidate_count: 2,
            gold_in_candidates: true,
            output: vec![RankedOutput {
                location: Location::new(0, if hit { 1 } else { 2 }),
                score: 0.25,
            }],
            certainty: Some(0.2),
        }
    }

    #[test]
    fn report_counts() {
        let m = Some(Antecedent::Mention(Location::new(0, 1)));
        let recs = vec![
            rec(m, true, true),
            rec(m, true, false),
            rec(m, false, false),
            rec(Some(Antecedent::Exophoric), true, false),
            rec(None, true, false),
        ];
        let r = MetricsReport::new(ModelKind::Both2, DetectionSource::System, true, &recs, &[1, 2]);
        assert_eq!((r.gold, r.exophoric, r.detected_gold, r.spurious, r.resolvable), (4, 1, 3, 1, 2));
        assert_eq!(r.accuracy_at(1), Some(0.5));
        assert_eq!(r.accuracy[0].correct, 1);
        let text = r.to_text();
        assert!(text.contains("50.0%"));
        assert!(text.contains("both2"));
    }

    #[test]
    fn curve_csv_leaves_absent_accuracy_empty() {
        let p = CurvePoint {
            threshold: 0.5,
            coverage: 0.0,
            accuracy: None,
            covered: 0,
            coverage_total: 3,
            correct: 0,
            emitted: 0,
        };
        let mut buf = Vec::new();
        write_curve_csv(&mut buf, &[p]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "threshold,coverage,accuracy,covered,coverage_total,correct,emitted\n0.5,0,,0,3,0,0\n"
        );
    }
}
