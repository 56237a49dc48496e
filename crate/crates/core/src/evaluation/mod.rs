//! Leave-one-out evaluation, k-best accuracy, coverage–accuracy curves,
//! corpus-size sweeps and a synthetic corpus generator with known truth.

mod experiment;
mod harness;
mod metrics;
mod report;
mod sweep;
pub mod synth;

pub use experiment::{run_experiment, CurveRun, ExperimentConfig, ExperimentOutput};
pub use harness::{
    fold_training_ids, loocv, DetectionSource, EvalConfig, EvalRecord, ModelKind, RankedOutput, Resources,
};
pub use metrics::{
    accuracy_at_coverage, accuracy_at_k, certainty_thresholds, coverage_accuracy_curve, random_floor, CurveMode,
    CurvePoint, RandomFloor,
};
pub use report::{write_curve_csv, write_records, write_sweep_csv, KAccuracy, MetricsReport};
pub use sweep::{corpus_size_sweep, SweepAxis, SweepPoint};
pub use synth::{generate_synthetic_corpus, SynthParams, SyntheticCorpus, VerbSpec};
