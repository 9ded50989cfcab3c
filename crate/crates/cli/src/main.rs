//! `liemod`: exact computations with finite-dimensional Lie algebra
//! structures presented as codifferentials.
//!
//! Subcommands check the Jacobi identity, compute adjoint cohomology with
//! a splitting, classify three-dimensional structures with a rational
//! equivalence witness, build miniversal deformations with their base
//! relations, and emit the moduli-space stratification graph.
//!
//! Exit codes: 0 success (and mathematically positive), 1 mathematical
//! negative (Jacobi violated, certification failed, truncation too small),
//! 2 usage or parse error.

mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use liemod::catalog::CatalogLabel;
use liemod::classify3::{classify, verify_equiv};
use liemod::coder::{jacobi_residual, Codifferential};
use liemod::cohomology::cohomology_report_with;
use liemod::deform::{miniversal, moduli_graph};
use liemod::{catalog, scalars::Rational};

use input::{from_label, AlgebraFile, ParsedAlgebra};
use report::Report;

#[derive(Parser)]
#[command(name = "liemod", version, about = "Exact Lie algebra cohomology and deformations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Dot,
    Json,
}

/// Where the structure comes from: a JSON file or a catalog label.
#[derive(Args)]
struct Source {
    /// Path to an algebra file (JSON with dim and structure entries).
    #[arg(value_name = "FILE", required_unless_present = "fixtures")]
    file: Option<PathBuf>,
    /// Use a catalog structure instead of a file (d1, d2, d3, d_1_1,
    /// d_1_0, d_1_m1, d_lambda_mu(p,q), abelian). Also selects the curated
    /// splitting where one exists.
    #[arg(long, value_name = "LABEL", conflicts_with = "file")]
    fixtures: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the Jacobi identity and report the residual.
    Jacobi {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Adjoint cohomology dimensions and harmonic prebases.
    Cohomology {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Highest degree to report.
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
    },
    /// Classify a three-dimensional structure with a rational witness.
    Classify {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Miniversal deformation with base relations.
    Miniversal {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Truncation degree for the correction solve.
        #[arg(long, default_value_t = 4)]
        truncation: u32,
    },
    /// Stratification graph of the three-dimensional moduli space.
    ModuliGraph {
        #[arg(long, value_enum, default_value = "dot")]
        emit: Emit,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Also include the zero structure and its jumps.
        #[arg(long)]
        include_abelian: bool,
    },
}

/// Failures that map onto the nonzero exit codes.
enum Failure {
    /// Exit 1: the mathematics said no.
    Negative(String),
    /// Exit 2: the invocation or input is malformed.
    Usage(String),
}

fn load(source: &Source) -> Result<(ParsedAlgebra, Option<CatalogLabel>), Failure> {
    if let Some(name) = &source.fixtures {
        let label = CatalogLabel::parse(name).map_err(|e| Failure::Usage(e.to_string()))?;
        return Ok((from_label(&label), Some(label)));
    }
    let path = source.file.as_ref().expect("clap enforces file or fixtures");
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let parsed = AlgebraFile::parse(&text).map_err(Failure::Usage)?;
    Ok((parsed, None))
}

/// Certifies the parsed structure, mapping a Jacobi failure to exit 1.
fn certified(parsed: &ParsedAlgebra) -> Result<Codifferential<Rational>, Failure> {
    Codifferential::certify(parsed.body.clone())
        .map_err(|e| Failure::Negative(format!("input is not certified: {e}")))
}

fn emit(report: &Report, format: Format, text: String) {
    let out = match format {
        Format::Text => text,
        Format::Json => report.to_json(),
    };
    // Tolerate a closed pipe (e.g. piping into `head`) instead of
    // panicking; the command's own verdict still decides the exit code.
    // Any other write error is reported on stderr.
    use std::io::Write;
    if let Err(e) = writeln!(std::io::stdout(), "{out}") {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("cannot write output: {e}");
            std::process::exit(1);
        }
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Jacobi { source, format } => {
            let (parsed, _) = load(&source)?;
            let residual = jacobi_residual(&parsed.body);
            let report = Report::new(
                "jacobi",
                Some(parsed.digest()),
                report::jacobi_payload(&residual),
            );
            emit(&report, format, report::jacobi_text(&residual));
            Ok(residual.is_zero())
        }
        Command::Cohomology { source, format, max_degree } => {
            let (parsed, label) = load(&source)?;
            let d = certified(&parsed)?;
            let overrides = label.as_ref().map(catalog::fixture_prebases).unwrap_or_default();
            let coh = cohomology_report_with(&d, max_degree, &overrides)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            let report = Report::new(
                "cohomology",
                Some(parsed.digest()),
                report::cohomology_payload(&coh),
            );
            emit(&report, format, report::cohomology_text(&coh));
            Ok(true)
        }
        Command::Classify { source, format } => {
            let (parsed, _) = load(&source)?;
            if parsed.normalized.dim != 3 {
                return Err(Failure::Usage(format!(
                    "classification needs dim 3, got {}",
                    parsed.normalized.dim
                )));
            }
            let d = certified(&parsed)?;
            let out = classify(&d);
            let verified = verify_equiv(&out.representative, &d, out.witness.g());
            let report = Report::new(
                "classify",
                Some(parsed.digest()),
                report::classify_payload(&out, verified),
            );
            emit(&report, format, report::classify_text(&out, verified));
            Ok(verified)
        }
        Command::Miniversal { source, format, truncation } => {
            let (parsed, label) = load(&source)?;
            if truncation < 2 {
                return Err(Failure::Usage("truncation degree must be at least 2".into()));
            }
            let d = certified(&parsed)?;
            let overrides = label.as_ref().map(catalog::fixture_prebases).unwrap_or_default();
            let coh = cohomology_report_with(&d, 3, &overrides)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            let mv = miniversal(&d, &coh, truncation)
                .map_err(|e| Failure::Negative(e.to_string()))?;
            let report = Report::new(
                "miniversal",
                Some(parsed.digest()),
                report::miniversal_payload(&mv),
            );
            emit(&report, format, report::miniversal_text(&mv));
            Ok(true)
        }
        Command::ModuliGraph { emit: what, format, include_abelian } => {
            let graph = moduli_graph(include_abelian);
            let (payload, text) = match what {
                Emit::Dot => {
                    let dot = graph.to_dot();
                    (serde_json::json!({ "dot": dot }), dot.trim_end().to_string())
                }
                Emit::Json => {
                    let payload = report::graph_payload(&graph);
                    let text = serde_json::to_string_pretty(&payload).expect("graphs serialize");
                    (payload, text)
                }
            };
            let report = Report::new("moduli-graph", None, payload);
            emit(&report, format, text);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Negative(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
