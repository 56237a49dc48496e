use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use zeroref::cooccurrence::extract_sharded;
use zeroref::corpus::read_documents;
use zeroref::evaluation::{
    generate_synthetic_corpus, run_experiment, EvalConfig, ExperimentConfig, ModelKind, SynthParams,
};
use zeroref::pipeline::{self, resolve_document, CorpusDir, ModelBundle, ResolveOptions};
use zeroref::resolution::CertaintyConfig;
use zeroref::{ClassWeighting, CaseFrameLexicon, CooccurrenceCounts, DetectConfig, Thesaurus};

mod config;

use config::{usize_list, FileConfig, Usage};

#[derive(Parser)]
#[command(name = "zeroref", version, about = "Japanese zero pronoun detection and resolution")]
struct Cli {
    /// Flat `key = value` file; flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Seed for synthetic generation and sweep shuffles.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count verb/case/class co-occurrences in unannotated text.
    Extract {
        /// Documents (JSONL) or a corpus directory.
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        thesaurus: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train models on a corpus directory.
    Train {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        model: Option<ModelKind>,
        #[command(flatten)]
        smoothing: Smoothing,
    },
    /// Detect zero pronouns.
    Detect {
        #[arg(long)]
        doc: PathBuf,
        #[arg(long)]
        frames: PathBuf,
        #[arg(long)]
        counts: PathBuf,
        #[arg(long)]
        theta_detect: Option<f64>,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Detect zero pronouns and rank their antecedents.
    Resolve {
        #[arg(long)]
        doc: PathBuf,
        #[arg(long)]
        models: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        certainty_threshold: Option<f64>,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        theta_detect: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Leave-one-out evaluation with curves and optional sweeps.
    Eval(EvalArgs),
    /// Write a synthetic corpus directory.
    Synth {
        #[arg(long)]
        out: PathBuf,
        /// Annotated documents.
        #[arg(long)]
        documents: Option<usize>,
        /// Unannotated documents.
        #[arg(long)]
        unannotated: Option<usize>,
    },
}

#[derive(Args)]
struct Smoothing {
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    lambda_syn: Option<f64>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    model: Option<ModelKind>,
    /// Comma-separated k values.
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    theta_detect: Option<f64>,
    #[command(flatten)]
    smoothing: Smoothing,
    /// Comma-separated certainty thresholds for the curves.
    #[arg(long, value_delimiter = ',')]
    thresholds: Vec<f64>,
    /// Percentile steps when thresholds are derived from the data.
    #[arg(long)]
    threshold_steps: Option<usize>,
    /// Skip the system-detection curve runs.
    #[arg(long)]
    no_curves: bool,
    /// Comma-separated annotated training sizes.
    #[arg(long, value_delimiter = ',')]
    sweep_annotated: Vec<usize>,
    /// Comma-separated unannotated corpus sizes.
    #[arg(long, value_delimiter = ',')]
    sweep_unannotated: Vec<usize>,
}

fn open_out(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_jsonl<T: Serialize>(w: &mut dyn Write, items: impl IntoIterator<Item = T>) -> anyhow::Result<()> {
    for item in items {
        serde_json::to_writer(&mut *w, &item)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

fn in_unit(name: &str, x: f64) -> Result<f64, Usage> {
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(Usage(format!("{name} must lie in [0, 1], got {x}")))
    }
}

fn eval_config(file: &FileConfig, model: Option<ModelKind>, smoothing: &Smoothing) -> anyhow::Result<EvalConfig> {
    let d = EvalConfig::default();
    let model = match model {
        Some(m) => m,
        None => match file.raw("model") {
            Some(s) => s.parse().map_err(|e: zeroref::Error| Usage(e.to_string()))?,
            None => d.model,
        },
    };
    Ok(EvalConfig {
        model,
        lambda: file.pick(smoothing.lambda, "lambda", d.lambda)?,
        lambda_syn: file.pick(smoothing.lambda_syn, "lambda_syn", d.lambda_syn)?,
        ..d
    })
}

fn detect_config(file: &FileConfig, theta: Option<f64>) -> anyhow::Result<DetectConfig> {
    Ok(DetectConfig {
        theta: in_unit("theta-detect", file.pick(theta, "theta_detect", 0.0)?)?,
        ..DetectConfig::default()
    })
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let seed = file.pick(cli.seed, "seed", 0u64)?;

    match cli.command {
        Command::Extract { corpus, thesaurus, out } => {
            let source = if corpus.is_dir() {
                corpus.join(pipeline::UNANNOTATED)
            } else {
                corpus
            };
            let docs = read_documents(&source)?;
            let thesaurus = Thesaurus::load(&thesaurus)?;
            let counts = extract_sharded(&docs, &thesaurus, ClassWeighting::PerClass, 64);
            counts.save(&out)?;
            log::info!("{} pairs from {} documents", counts.total_pairs(), docs.len());
        }
        Command::Train {
            corpus,
            out,
            model,
            smoothing,
        } => {
            let cfg = eval_config(&file, model, &smoothing)?;
            let corpus = CorpusDir::load(&corpus)?;
            ModelBundle::train(&corpus, &cfg)?.save(&out)?;
        }
        Command::Detect {
            doc,
            frames,
            counts,
            theta_detect,
            out,
        } => {
            let cfg = detect_config(&file, theta_detect)?;
            let docs = read_documents(&doc)?;
            let lexicon = CaseFrameLexicon::load(&frames)?;
            let counts = CooccurrenceCounts::load(&counts)?;
            let mut w = open_out(out.as_deref())?;
            for d in &docs {
                write_jsonl(&mut *w, zeroref::detect_zero_pronouns(d, &lexicon, &counts, cfg))?;
            }
            w.flush()?;
        }
        Command::Resolve {
            doc,
            models,
            k,
            t,
            certainty_threshold,
            window,
            theta_detect,
            out,
        } => {
            let d = ResolveOptions::default();
            let opts = ResolveOptions {
                k: file.pick(k, "k", d.k)?,
                window: file.pick(window, "window", d.window)?,
                certainty: CertaintyConfig::new(
                    file.pick(t, "t", d.certainty.t)?,
                    file.pick(certainty_threshold, "certainty_threshold", d.certainty.threshold)?,
                )
                .map_err(|e| Usage(e.to_string()))?,
                detect: detect_config(&file, theta_detect)?,
            };
            if opts.k == 0 {
                return Err(Usage("k must be >= 1".into()).into());
            }
            let bundle = ModelBundle::load(&models)?;
            let docs = read_documents(&doc)?;
            let mut w = open_out(out.as_deref())?;
            for d in &docs {
                write_jsonl(&mut *w, resolve_document(&bundle, d, &opts)?)?;
            }
            w.flush()?;
        }
        Command::Eval(args) => {
            let base = eval_config(&file, args.model, &args.smoothing)?;
            let d = ExperimentConfig::default();
            let ks = if !args.k.is_empty() {
                args.k
            } else {
                match file.raw("k") {
                    Some(s) => usize_list(s).map_err(Usage)?,
                    None => d.ks.clone(),
                }
            };
            if ks.is_empty() || ks.contains(&0) {
                return Err(Usage("k values must be >= 1".into()).into());
            }
            let eval = EvalConfig {
                window: file.pick(args.window, "window", base.window)?,
                t: in_unit("t", file.pick(args.t, "t", base.t)?)?,
                detect: detect_config(&file, args.theta_detect)?,
                ..base
            };
            let cfg = ExperimentConfig {
                eval,
                ks,
                thresholds: (!args.thresholds.is_empty()).then_some(args.thresholds),
                threshold_steps: file.pick(args.threshold_steps, "threshold_steps", d.threshold_steps)?,
                curves: !args.no_curves,
                sweep_annotated: args.sweep_annotated,
                sweep_unannotated: args.sweep_unannotated,
                seed,
            };
            let corpus = CorpusDir::load(&args.corpus)?;
            let output = run_experiment(&corpus.documents, &corpus.unannotated, corpus.resources(), &cfg)?;
            output.write_to(&args.out)?;
            print!("{}", output.report_text());
        }
        Command::Synth {
            out,
            documents,
            unannotated,
        } => {
            let mut params = SynthParams::fixture();
            if let Some(n) = documents {
                params.documents = n;
            }
            if let Some(n) = unannotated {
                params.unannotated_documents = n;
            }
            let corpus = generate_synthetic_corpus(&params, seed)?;
            pipeline::write_synthetic(&corpus, &out)?;
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Usage>().is_some() {
        return 1;
    }
    match err.downcast_ref::<zeroref::Error>() {
        Some(zeroref::Error::Config(_)) => 1,
        Some(e) if e.is_data_error() => 2,
        _ => 3,
    }
}

fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.chain().any(|e| {
        let kind = match e.downcast_ref::<serde_json::Error>() {
            Some(e) => e.io_error_kind(),
            None => e.downcast_ref::<io::Error>().map(io::Error::kind),
        };
        kind == Some(io::ErrorKind::BrokenPipe)
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
