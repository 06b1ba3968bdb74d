use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tbm_cli::commands::{self, MatrixKind, MatrixSource, Rule};
use tbm_cli::{CliError, DocKind, EvidenceDocument};
use tbm_core::belief::Kind;
use tbm_core::verify::{RunConfig, CHECKS};
use tbm_core::Frame;

/// Belief-function calculus on evidence files.
///
/// Exit codes: 0 success, 1 verification failure, 2 input error,
/// 3 precondition error (singularity, total conflict, size cap).
#[derive(Parser)]
#[command(name = "tbm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rewrite a document as another representation.
    Convert {
        input: PathBuf,
        #[arg(long, value_enum)]
        to: Target,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Combine two or more documents, folding from the left.
    Combine {
        #[arg(required = true, num_args = 2..)]
        inputs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "conjunctive")]
        rule: RuleArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Condition on a subset key such as "a|b" ("" is the empty set).
    Condition {
        input: PathBuf,
        #[arg(long)]
        on: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Remove previously combined evidence.
    Retract {
        input: PathBuf,
        #[arg(long)]
        evidence: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Make the elements of a subset indiscernible.
    Enlarge {
        input: PathBuf,
        #[arg(long)]
        on: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Export an operator matrix.
    Matrix {
        /// Evidence document; with --conditioning it only supplies the frame.
        input: Option<PathBuf>,
        /// Build the conditioning matrix for this subset key.
        #[arg(long)]
        conditioning: Option<String>,
        /// Frame labels for --conditioning without an input file.
        #[arg(long, value_delimiter = ',')]
        frame: Option<Vec<String>>,
        #[arg(long, value_enum)]
        kind: Option<MatrixKindArg>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the theorem checks.
    Check {
        /// Checks to run; defaults to all.
        #[arg(long, value_delimiter = ',', value_parser = clap::builder::PossibleValuesParser::new(CHECKS))]
        theorems: Option<Vec<String>>,
        /// Frame sizes.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
        n: Vec<usize>,
        /// Samples per check; defaults to each check's own count.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit the reports as JSON instead of text.
        #[arg(long)]
        json: bool,
        #[arg(long, hide = true)]
        inject_fault: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Mass,
    Bel,
    Pl,
    Q,
    B,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Conjunctive,
    Normalized,
    Disjunctive,
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixKindArg {
    Specialization,
    Dempsterian,
    Despecialization,
    Disjunctive,
}

fn read_input(path: &Path) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<EvidenceDocument, CliError> {
    EvidenceDocument::parse(&read_input(path)?)
        .map_err(|e| match e {
            CliError::Input(msg) => CliError::Input(format!("{}: {msg}", path.display())),
            other => other,
        })
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Convert { input, to, output } => {
            let target = match to {
                Target::Mass => DocKind::Mass,
                Target::Bel => DocKind::Value(Kind::Bel),
                Target::Pl => DocKind::Value(Kind::Pl),
                Target::Q => DocKind::Value(Kind::Q),
                Target::B => DocKind::Value(Kind::B),
            };
            let out = commands::convert(&load(&input)?, target)?;
            emit(output.as_deref(), &out.print())
        }
        Command::Combine { inputs, rule, output } => {
            let docs = inputs.iter().map(|p| load(p)).collect::<Result<Vec<_>, _>>()?;
            let rule = match rule {
                RuleArg::Conjunctive => Rule::Conjunctive,
                RuleArg::Normalized => Rule::Normalized,
                RuleArg::Disjunctive => Rule::Disjunctive,
            };
            emit(output.as_deref(), &commands::combine(&docs, rule)?.print())
        }
        Command::Condition { input, on, output } => {
            let out = commands::condition_on(&load(&input)?, &on)?;
            emit(output.as_deref(), &out.print())
        }
        Command::Retract { input, evidence, output } => {
            let out = commands::retract_evidence(&load(&input)?, &load(&evidence)?)?;
            emit(output.as_deref(), &out.print())
        }
        Command::Enlarge { input, on, output } => {
            let out = commands::enlarge_on(&load(&input)?, &on)?;
            emit(output.as_deref(), &out.print())
        }
        Command::Matrix { input, conditioning, frame, kind, output } => {
            let doc = input.as_deref().map(load).transpose()?;
            let text = match (conditioning, &doc) {
                (Some(key), _) => {
                    let frame = match (&doc, frame) {
                        (Some(d), None) => d.frame.clone(),
                        (None, Some(labels)) => Frame::new(&labels)?,
                        _ => {
                            return Err(CliError::Input(
                                "--conditioning needs exactly one of an input file or --frame".into(),
                            ))
                        }
                    };
                    let kind = match kind {
                        None | Some(MatrixKindArg::Specialization) => MatrixKind::Specialization,
                        Some(_) => {
                            return Err(CliError::Input(
                                "--conditioning only builds specialization matrices".into(),
                            ))
                        }
                    };
                    commands::matrix(MatrixSource::Conditioning(&frame, &key), kind)?
                }
                (None, Some(d)) => {
                    let kind = match kind.unwrap_or(MatrixKindArg::Dempsterian) {
                        MatrixKindArg::Specialization | MatrixKindArg::Dempsterian => {
                            MatrixKind::Dempsterian
                        }
                        MatrixKindArg::Despecialization => MatrixKind::Despecialization,
                        MatrixKindArg::Disjunctive => MatrixKind::Disjunctive,
                    };
                    commands::matrix(MatrixSource::Evidence(d), kind)?
                }
                (None, None) => {
                    return Err(CliError::Input("matrix needs an input file or --conditioning".into()))
                }
            };
            emit(output.as_deref(), &text)
        }
        Command::Check { theorems, n, samples, seed, json, inject_fault, output } => {
            let config = RunConfig {
                checks: theorems.unwrap_or_else(|| CHECKS.iter().map(|s| s.to_string()).collect()),
                sizes: n,
                samples,
                seed,
                inject_fault,
            };
            let reports = tbm_core::verify::run_all(&config)?;
            let passed = reports.iter().all(|r| r.passed());
            let text = if json {
                let mut s = serde_json::to_string_pretty(&reports).expect("reports serialize");
                s.push('\n');
                s
            } else {
                commands::format_reports(&config, &reports)
            };
            emit(output.as_deref(), &text)?;
            if passed {
                Ok(())
            } else {
                Err(CliError::Verification)
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::Verification) {
                eprintln!("tbm: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
