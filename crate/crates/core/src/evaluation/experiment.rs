use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::corpus::{AnalyzedDocument, AnnotatedDocument};
use crate::error::{Error, Result};

use super::harness::{loocv, DetectionSource, EvalConfig, EvalRecord, Resources};
use super::metrics::{certainty_thresholds, coverage_accuracy_curve, CurveMode, CurvePoint};
use super::report::{write_curve_csv, write_records, write_sweep_csv, MetricsReport};
use super::sweep::{corpus_size_sweep, SweepAxis, SweepPoint};

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub eval: EvalConfig,
    pub ks: Vec<usize>,
    /// Explicit certainty thresholds; percentiles of the observed
    /// certainties when absent.
    pub thresholds: Option<Vec<f64>>,
    pub threshold_steps: usize,
    /// Curves from system detection, ranked with and without `P_zero`.
    pub curves: bool,
    pub sweep_annotated: Vec<usize>,
    pub sweep_unannotated: Vec<usize>,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            eval: EvalConfig::default(),
            ks: vec![1, 2, 3],
            thresholds: None,
            threshold_steps: 20,
            curves: true,
            sweep_annotated: Vec::new(),
            sweep_unannotated: Vec::new(),
            seed: 0,
        }
    }
}

/// Curves of one system-detection run.
#[derive(Clone, Debug, Serialize)]
pub struct CurveRun {
    pub use_detection_prob: bool,
    pub report: MetricsReport,
    pub detection: Vec<CurvePoint>,
    pub resolution: Vec<CurvePoint>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentOutput {
    /// Gold detection, ranked by `P(a|φ)`.
    pub table: MetricsReport,
    pub curves: Vec<CurveRun>,
    pub sweep_annotated: Vec<SweepPoint>,
    pub sweep_unannotated: Vec<SweepPoint>,
    #[serde(skip)]
    pub records: Vec<EvalRecord>,
}

pub fn run_experiment(
    corpus: &[AnnotatedDocument],
    unannotated: &[AnalyzedDocument],
    res: Resources<'_>,
    cfg: &ExperimentConfig,
) -> Result<ExperimentOutput> {
    if cfg.ks.is_empty() || cfg.ks.contains(&0) {
        return Err(Error::config("k values must be >= 1"));
    }
    let k_max = *cfg.ks.iter().max().unwrap_or(&1);
    let table_cfg = EvalConfig {
        k: k_max,
        detection: DetectionSource::Gold,
        use_detection_prob: false,
        ..cfg.eval.clone()
    };
    let records = loocv(corpus, res, &table_cfg)?;
    let table = MetricsReport::new(table_cfg.model, DetectionSource::Gold, false, &records, &cfg.ks);

    let mut curves = Vec::new();
    if cfg.curves && cfg.eval.model.is_statistical() {
        let runs: Vec<(bool, Vec<EvalRecord>)> = [true, false]
            .into_iter()
            .map(|use_detection_prob| {
                let run_cfg = EvalConfig {
                    k: k_max,
                    detection: DetectionSource::System,
                    use_detection_prob,
                    ..cfg.eval.clone()
                };
                loocv(corpus, res, &run_cfg).map(|r| (use_detection_prob, r))
            })
            .collect::<Result<_>>()?;
        let thresholds = match &cfg.thresholds {
            Some(t) => {
                if !t.windows(2).all(|w| w[0] <= w[1]) {
                    return Err(Error::config("thresholds must be ascending"));
                }
                t.clone()
            }
            None => {
                let mut all: Vec<f64> = runs
                    .iter()
                    .flat_map(|(_, r)| certainty_thresholds(r, cfg.threshold_steps))
                    .collect();
                all.sort_by(f64::total_cmp);
                all.dedup();
                all
            }
        };
        for (use_detection_prob, recs) in runs {
            curves.push(CurveRun {
                use_detection_prob,
                report: MetricsReport::new(
                    cfg.eval.model,
                    DetectionSource::System,
                    use_detection_prob,
                    &recs,
                    &cfg.ks,
                ),
                detection: coverage_accuracy_curve(&recs, &thresholds, CurveMode::Detection),
                resolution: coverage_accuracy_curve(&recs, &thresholds, CurveMode::Resolution),
            });
        }
    }

    let sweep = |sizes: &[usize], axis| {
        if sizes.is_empty() {
            Ok(Vec::new())
        } else {
            corpus_size_sweep(corpus, unannotated, res, &cfg.eval, sizes, axis, cfg.seed)
        }
    };
    let sweep_annotated = sweep(&cfg.sweep_annotated, SweepAxis::Annotated)?;
    let sweep_unannotated = sweep(&cfg.sweep_unannotated, SweepAxis::Unannotated)?;

    Ok(ExperimentOutput {
        table,
        curves,
        sweep_annotated,
        sweep_unannotated,
        records,
    })
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    File::create(&path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

impl ExperimentOutput {
    pub fn report_text(&self) -> String {
        let mut s = self.table.to_text();
        for run in &self.curves {
            s.push('\n');
            s.push_str(&run.report.to_text());
        }
        if !self.curves.is_empty() {
            s.push_str("\nresolution curves count a hit when the gold antecedent is ranked first among emitted answers\n");
        }
        for (name, points) in [
            ("annotated", &self.sweep_annotated),
            ("unannotated", &self.sweep_unannotated),
        ] {
            if points.is_empty() {
                continue;
            }
            s.push_str(&format!("\n{name} sweep\n{:>6}  {:>8}\n", "size", "acc@1"));
            for p in points {
                let acc = p.accuracy.map(|a| format!("{:.1}%", 100.0 * a)).unwrap_or_else(|| "-".into());
                s.push_str(&format!("{:>6}  {acc:>8}\n", p.size));
            }
        }
        s
    }

    /// Writes every report into `dir` and returns the paths written.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut written = Vec::new();
        let mut add = |name: &str| {
            written.push(dir.join(name));
            create(dir, name)
        };
        let mut text = add("metrics.txt")?;
        text.write_all(self.report_text().as_bytes())?;
        text.flush()?;
        let mut json = add("metrics.json")?;
        serde_json::to_writer_pretty(&mut json, self)?;
        json.write_all(b"\n")?;
        json.flush()?;
        write_records(add("records.jsonl")?, &self.records)?;
        for run in &self.curves {
            let tag = if run.use_detection_prob { "eq1" } else { "phi" };
            write_curve_csv(add(&format!("curve_detection_{tag}.csv"))?, &run.detection)?;
            write_curve_csv(add(&format!("curve_resolution_{tag}.csv"))?, &run.resolution)?;
        }
        if !self.sweep_annotated.is_empty() {
            write_sweep_csv(add("sweep_annotated.csv")?, &self.sweep_annotated)?;
        }
        if !self.sweep_unannotated.is_empty() {
            write_sweep_csv(add("sweep_unannotated.csv")?, &self.sweep_unannotated)?;
        }
        Ok(written)
    }
}
