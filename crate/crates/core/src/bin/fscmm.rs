use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::LevelFilter;

use fscmm::commands::{self, KnnConfig, RunConfig};
use fscmm::features::DEFAULT_THRESHOLD;
use fscmm::{CorpusFormat, Error, FeatureMode, Hyperparams, TrainSettings};

#[derive(Parser)]
#[command(name = "fscmm", version, about = "Fuzzy similarity based text categorization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Features {
    Raw,
    Fuzzy,
}

impl From<Features> for FeatureMode {
    fn from(f: Features) -> Self {
        match f {
            Features::Raw => FeatureMode::Raw,
            Features::Fuzzy => FeatureMode::Fuzzy,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Jsonl,
    Dir,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model from a labeled corpus.
    Train {
        #[arg(long)]
        corpus: PathBuf,
        /// Corpus layout; detected from the path when omitted.
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        stopwords: PathBuf,
        #[arg(long)]
        thesaurus: PathBuf,
        /// Minimum corpus-total frequency of a kept feature.
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: u64,
        #[arg(long, value_enum, default_value = "fuzzy")]
        features: Features,
        /// Soft-margin penalty.
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 200)]
        epochs: usize,
        /// Hold out this share of the corpus and report accuracy on it.
        #[arg(long, default_value_t = 0.0)]
        test_fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify documents, writing one JSON line per document.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a model against a labeled corpus.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        /// Emit the report as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// List the highest-frequency features with their class memberships.
    InspectFeatures {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 20)]
        top: usize,
        #[arg(long)]
        json: bool,
    },
    /// Nearest-neighbour baseline over raw feature counts.
    Knn {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        stopwords: PathBuf,
        #[arg(long)]
        thesaurus: PathBuf,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: u64,
        #[arg(long)]
        k: usize,
        #[arg(long = "in")]
        input: PathBuf,
        /// Write predictions here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print an evaluation report (requires labeled input) instead of
        /// predictions.
        #[arg(long)]
        report: bool,
        #[arg(long)]
        json: bool,
    },
}

fn init_logging() {
    let level = match std::env::var("FSCMM_LOG").as_deref() {
        Ok("debug") => LevelFilter::Debug,
        Ok("info") => LevelFilter::Info,
        _ => LevelFilter::Off,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .target(env_logger::Target::Stderr)
        .init();
}

fn run(cli: Cli) -> Result<(), Error> {
    let stdout = io::stdout();
    let mut stdout = stdout.lock();
    let print = |out: &mut dyn Write, text: &str| {
        out.write_all(text.as_bytes())
            .map_err(|e| Error::Io { path: "<stdout>".into(), source: e })
    };

    match cli.command {
        Command::Train {
            corpus,
            format,
            stopwords,
            thesaurus,
            threshold,
            features,
            c,
            epochs,
            test_fraction,
            seed,
            out,
        } => {
            let config = RunConfig {
                corpus,
                format: format.map(|f| match f {
                    Format::Jsonl => CorpusFormat::Jsonl,
                    Format::Dir => CorpusFormat::DirCsv,
                }),
                stopwords,
                thesaurus,
                settings: TrainSettings {
                    threshold,
                    feature_mode: features.into(),
                    hyperparams: Hyperparams { c, epochs, ..Hyperparams::default() },
                },
                test_fraction,
                seed,
                out,
            };
            let summary = commands::cmd_train(&config)?;
            print(&mut stdout, &summary.render())
        }
        Command::Predict { model, input, out } => {
            let n = commands::cmd_predict(&model, &input, &out)?;
            log::info!("wrote {n} predictions to {}", out.display());
            Ok(())
        }
        Command::Evaluate { model, input, json } => {
            let report = commands::cmd_evaluate(&model, &input)?;
            if json {
                print(&mut stdout, &(serde_json::to_string_pretty(&report)? + "\n"))
            } else {
                print(&mut stdout, &report.render_table())
            }
        }
        Command::InspectFeatures { model, top, json } => {
            let listing = commands::cmd_inspect_features(&model, top)?;
            if json {
                print(&mut stdout, &(serde_json::to_string_pretty(&listing)? + "\n"))
            } else {
                print(&mut stdout, &listing.render())
            }
        }
        Command::Knn {
            corpus,
            stopwords,
            thesaurus,
            threshold,
            k,
            input,
            out,
            report,
            json,
        } => {
            let outcome = commands::cmd_knn(&KnnConfig { corpus, stopwords, thesaurus, threshold, k, input })?;
            if report {
                let report = outcome.report.ok_or_else(|| {
                    Error::InvalidArgument("--report needs every query document labeled with a known class".into())
                })?;
                return if json {
                    print(&mut stdout, &(serde_json::to_string_pretty(&report)? + "\n"))
                } else {
                    print(&mut stdout, &report.render_table())
                };
            }
            match out {
                Some(path) => {
                    let file = File::create(&path).map_err(|e| Error::Io { path: path.clone(), source: e })?;
                    commands::write_jsonl(&outcome.predictions, BufWriter::new(file))
                }
                None => commands::write_jsonl(&outcome.predictions, &mut stdout),
            }
        }
    }
}

fn main() -> ExitCode {
    init_logging();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_internal() { 3 } else { 2 })
        }
    }
}
