use std::fs::{self, File};
use std::io::{self, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use longner::chunker::{predict_limited, ContextLimit};
use longner::corpus::merge_offset;
use longner::eval::{evaluate, pct, token_accuracy, EvalMode, EvalReport};
use longner::experiment::{emit_report, run_matrix, ExperimentConfig, ReportFormat, OUTPUT_ENV};
use longner::format::{read_corpus, write_corpus, Format};
use longner::iob::{validate_iob, Validation, ValidationMode};
use longner::rng::derive_seed;
use longner::stats::corpus_stats_with_buckets;
use longner::synth::{build_dataset, concat_k, provenance_sidecar, BuildOptions, Scheme};
use longner::tagger::{train_with_observer, TaggerModel, TrainConfig};
use longner::{Corpus, LabelStyle};

/// Corpus tooling, a perceptron tagger and the train × test matrix for
/// long-range NER experiments.
#[derive(Parser, Debug)]
#[command(name = "longner", version)]
struct Cli {
    /// Master seed for synthesis and training shuffles
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output format for reports printed to stdout
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Human)]
    format: OutputFormat,

    /// Suppress progress and summary messages on stderr
    #[arg(long, short, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Human,
    Json,
    Markdown,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FileFormat {
    ThreeColumn,
    Conll,
}

impl From<FileFormat> for Format {
    fn from(f: FileFormat) -> Format {
        match f {
            FileFormat::ThreeColumn => Format::ThreeColumn,
            FileFormat::Conll => Format::Conll,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StyleArg {
    PaperRaw,
    Hyphenated,
}

impl From<StyleArg> for LabelStyle {
    fn from(s: StyleArg) -> LabelStyle {
        match s {
            StyleArg::PaperRaw => LabelStyle::PaperRaw,
            StyleArg::Hyphenated => LabelStyle::Hyphenated,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Concat2,
    Concat3,
    ConcatSimilar,
    Combined,
    /// Concatenate groups of `--k` sentences
    ConcatK,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ValidateMode {
    Strict,
    Repair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Strict,
    Lenient,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Input corpus (stdin when absent)
    #[arg(long = "in")]
    input: Option<PathBuf>,

    /// Input layout; detected when absent
    #[arg(long, value_enum)]
    input_format: Option<FileFormat>,
}

#[derive(Args, Debug)]
struct WindowArgs {
    /// Context limit in tokens
    #[arg(long)]
    window: Option<usize>,

    /// Window stride; defaults to half the window
    #[arg(long, requires = "window", conflicts_with = "truncate")]
    stride: Option<usize>,

    /// Tag only the first --window tokens and pad the rest with O
    #[arg(long, requires = "window")]
    truncate: bool,

    /// Decode without IOB transition constraints
    #[arg(long)]
    no_constrain: bool,
}

impl WindowArgs {
    fn limit(&self) -> Option<ContextLimit> {
        let size = self.window?;
        Some(if self.truncate {
            ContextLimit::Truncate { size }
        } else {
            ContextLimit::Sliding { size, stride: self.stride.unwrap_or((size / 2).max(1)) }
        })
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Read one or more corpora and write them in another layout or label style
    Parse {
        /// Input corpora; ids clashing with an earlier file are offset
        #[arg(long = "in", required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, value_enum)]
        input_format: Option<FileFormat>,
        #[arg(long, value_enum, default_value_t = FileFormat::ThreeColumn)]
        output_format: FileFormat,
        /// Label spelling; defaults to the style of the input
        #[arg(long, value_enum)]
        label_style: Option<StyleArg>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Label counts and sentence-length statistics
    Stats {
        #[command(flatten)]
        input: InputArgs,
        /// Width of the length histogram buckets, in tokens
        #[arg(long, default_value_t = 10)]
        bucket_width: usize,
    },
    /// Report or repair orphan I tags
    Validate {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = ValidateMode::Strict)]
        mode: ValidateMode,
        /// Where repair mode writes the corpus (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a concatenated dataset; writes `<out>.provenance.tsv` alongside
    Synthesize {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum)]
        scheme: SchemeArg,
        /// Group size for concat-k
        #[arg(long)]
        k: Option<usize>,
        /// Emit the leftover sentences as a shorter final group
        #[arg(long)]
        allow_remainder: bool,
        /// Include concat-similar in the combined set
        #[arg(long)]
        with_similar: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train an averaged perceptron
    Train {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 5)]
        epochs: u32,
        #[arg(long, default_value_t = 1.0)]
        learning_rate: f64,
        #[arg(long, default_value_t = 1)]
        batch_size: usize,
        /// Held-out corpus scored after every epoch
        #[arg(long)]
        valid: Option<PathBuf>,
    },
    /// Tag a corpus with a trained model
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Score predictions against gold, from a file or a model
    Evaluate {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long, required_unless_present = "model", conflicts_with = "model")]
        pred: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, value_enum)]
        input_format: Option<FileFormat>,
        #[arg(long, value_enum, default_value_t = ModeArg::Lenient)]
        mode: ModeArg,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Run the train × test matrix described by a JSON config
    RunMatrix {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the config and $LONGNER_OUT
        #[arg(long, env = OUTPUT_ENV)]
        out: Option<PathBuf>,
    },
}

/// Exit code for a failed matrix cell or a failed check.
const EXIT_FAILURE: u8 = 1;
/// Exit code for bad configuration or unreadable input.
const EXIT_CONFIG: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn read_input(path: Option<&Path>, format: Option<FileFormat>) -> Result<Corpus> {
    let format = format.map(Format::from);
    match path {
        Some(p) => {
            let f = File::open(p).with_context(|| format!("opening {}", p.display()))?;
            read_corpus(BufReader::new(f), format).with_context(|| format!("reading {}", p.display()))
        }
        None => {
            let mut buf = Vec::new();
            io::stdin().read_to_end(&mut buf)?;
            read_corpus(&buf[..], format).context("reading stdin")
        }
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::BufWriter::new(io::stdout())),
    })
}

fn eval_table(report: &EvalReport, sep: &str, markdown: bool) -> String {
    let mut out = String::new();
    let line = |cols: [&str; 4]| if markdown { format!("| {} |\n", cols.join(" | ")) } else { format!("{}\n", cols.join(sep)) };
    out += &line(["Type", "F1-Score", "Precision", "Recall"]);
    if markdown {
        out += "|---|---|---|---|\n";
    }
    for (ty, s) in &report.per_type {
        out += &line([ty, &pct(s.f1), &pct(s.precision), &pct(s.recall)]);
    }
    out += &line(["micro", &pct(report.f1()), &pct(report.precision()), &pct(report.recall())]);
    out
}

fn print_eval(cli: &Cli, report: &EvalReport, accuracy: f64) -> Result<()> {
    match cli.format {
        OutputFormat::Human => println!("{report}token accuracy: {}", pct(accuracy)),
        OutputFormat::Json => {
            let mut v = serde_json::to_value(report)?;
            v["token_accuracy"] = accuracy.into();
            println!("{}", serde_json::to_string_pretty(&v)?);
        }
        OutputFormat::Markdown => print!("{}", eval_table(report, "", true)),
        OutputFormat::Csv => print!("{}", eval_table(report, ",", false)),
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Parse { inputs, input_format, output_format, label_style, out } => {
            let corpora = inputs.iter().map(|p| read_input(Some(p), *input_format)).collect::<Result<Vec<_>>>()?;
            let (corpus, remaps) = merge_offset(corpora);
            if !cli.quiet {
                for r in &remaps {
                    eprintln!("{}: {} sentence ids shifted by {}", inputs[r.source].display(), r.remapped, r.offset);
                }
            }
            let style = label_style.map(LabelStyle::from).unwrap_or(corpus.label_style());
            let mut w = output(out.as_deref())?;
            write_corpus(&mut w, &corpus, (*output_format).into(), style)?;
            w.flush()?;
        }
        Command::Stats { input, bucket_width } => {
            if *bucket_width == 0 {
                bail!("--bucket-width must be at least 1");
            }
            let corpus = read_input(input.input.as_deref(), input.input_format)?;
            let report = corpus_stats_with_buckets(&corpus, *bucket_width);
            match cli.format {
                OutputFormat::Json => println!("{}", report.to_json()),
                _ => print!("{report}"),
            }
        }
        Command::Validate { input, mode, out } => {
            let corpus = read_input(input.input.as_deref(), input.input_format)?;
            match validate_iob(&corpus, if *mode == ValidateMode::Strict { ValidationMode::Strict } else { ValidationMode::Repair }) {
                Validation::Issues(issues) => {
                    if cli.format == OutputFormat::Json {
                        println!("{}", serde_json::to_string_pretty(&issues)?);
                    } else {
                        for i in &issues {
                            println!("sentence {} token {}: orphan {}", i.sentence_id, i.index, i.tag);
                        }
                    }
                    if !cli.quiet {
                        eprintln!("{} issue(s)", issues.len());
                    }
                    if !issues.is_empty() {
                        return Ok(EXIT_FAILURE);
                    }
                }
                Validation::Repaired(repaired) => {
                    let mut w = output(out.as_deref())?;
                    write_corpus(&mut w, &repaired, Format::ThreeColumn, corpus.label_style())?;
                    w.flush()?;
                }
            }
        }
        Command::Synthesize { input, scheme, k, allow_remainder, with_similar, out } => {
            let corpus = read_input(input.input.as_deref(), input.input_format)?;
            let opts = BuildOptions { allow_remainder: *allow_remainder, combined_includes_similar: *with_similar };
            let named = match scheme {
                SchemeArg::Concat2 => Some(Scheme::Concat2),
                SchemeArg::Concat3 => Some(Scheme::Concat3),
                SchemeArg::ConcatSimilar => Some(Scheme::ConcatSimilar),
                SchemeArg::Combined => Some(Scheme::Combined),
                SchemeArg::ConcatK => None,
            };
            let synthesis = match named {
                Some(s) => {
                    if k.is_some() {
                        bail!("--k only applies to --scheme concat-k");
                    }
                    build_dataset(&corpus, s, cli.seed, opts)?
                }
                None => {
                    let k = k.context("--scheme concat-k needs --k")?;
                    concat_k(&corpus, k, derive_seed(cli.seed, &format!("concat{k}")), *allow_remainder)?
                }
            };
            let mut w = output(Some(out))?;
            write_corpus(&mut w, &synthesis.corpus, Format::ThreeColumn, corpus.label_style())?;
            w.flush()?;
            let mut sidecar = out.clone().into_os_string();
            sidecar.push(".provenance.tsv");
            fs::write(&sidecar, provenance_sidecar(&synthesis.corpus))?;
            if !cli.quiet {
                eprintln!("{} sentences written, {} input sentences unused", synthesis.corpus.len(), synthesis.unused.len());
            }
        }
        Command::Train { input, out, epochs, learning_rate, batch_size, valid } => {
            let corpus = read_input(input.input.as_deref(), input.input_format)?;
            let valid = valid.as_deref().map(|p| read_input(Some(p), input.input_format)).transpose()?;
            let config = TrainConfig { epochs: *epochs, shuffle_seed: cli.seed, learning_rate: *learning_rate, batch_size: *batch_size };
            let model = train_with_observer(&corpus, &config, |epoch, model| {
                if cli.quiet {
                    return;
                }
                match &valid {
                    Some(v) => {
                        let f1 = predict_limited(model, v, None, true)
                            .ok()
                            .and_then(|p| evaluate(v, &p, EvalMode::Lenient).ok())
                            .map_or(0.0, |r| r.f1());
                        eprintln!("epoch {epoch}: validation F1 {}", pct(f1));
                    }
                    None => eprintln!("epoch {epoch} done"),
                }
            })?;
            fs::write(out, model.save()).with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Predict { model, input, out, window } => {
            let model = load_model(model)?;
            let corpus = read_input(input.input.as_deref(), input.input_format)?;
            let pred = predict_limited(&model, &corpus, window.limit(), !window.no_constrain)?;
            let mut w = output(out.as_deref())?;
            write_corpus(&mut w, &pred, Format::ThreeColumn, corpus.label_style())?;
            w.flush()?;
        }
        Command::Evaluate { gold, pred, model, input_format, mode, window } => {
            let gold = read_input(Some(gold), *input_format)?;
            let pred = match (pred, model) {
                (Some(p), _) => read_input(Some(p), *input_format)?,
                (None, Some(m)) => predict_limited(&load_model(m)?, &gold, window.limit(), !window.no_constrain)?,
                (None, None) => bail!("either --pred or --model is required"),
            };
            let mode = if *mode == ModeArg::Strict { EvalMode::Strict } else { EvalMode::Lenient };
            let report = evaluate(&gold, &pred, mode)?;
            print_eval(cli, &report, token_accuracy(&gold, &pred)?)?;
        }
        Command::RunMatrix { config, out } => {
            let mut config = ExperimentConfig::load(config)?;
            if let Some(out) = out {
                config.output_dir = Some(out.clone());
            }
            let run = run_matrix(&config)?;
            let format = match cli.format {
                OutputFormat::Json => ReportFormat::Json,
                OutputFormat::Csv => ReportFormat::Csv,
                OutputFormat::Human | OutputFormat::Markdown => ReportFormat::Markdown,
            };
            print!("{}", emit_report(&run.result, format));
            let failed = run.result.failed_cells();
            if !cli.quiet {
                for cell in run.result.cells.iter().filter(|c| c.error.is_some()) {
                    eprintln!("{} / {}: {}", cell.train, cell.test, cell.error.as_deref().unwrap_or_default());
                }
                eprintln!("{} cells, {failed} failed; artifacts in {}", run.result.cells.len(), run.output_dir.display());
            }
            if failed > 0 {
                return Ok(EXIT_FAILURE);
            }
        }
    }
    Ok(0)
}

fn load_model(path: &Path) -> Result<TaggerModel> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    TaggerModel::load(&text).with_context(|| format!("loading {}", path.display()))
}
