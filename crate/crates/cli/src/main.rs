//! `stablegc`: run surgery scripts, build the two families, classify crossing
//! forms and validate divisor graphs.
//!
//! Exit codes: 0 on success, 1 on a domain error (including unreadable files),
//! 2 when the input does not parse.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use stablegc::divisor::DivisorGraph;
use stablegc::exchange::{self, PointClassDocument};
use stablegc::family::{self, FamilyError, FamilyKind, FamilySpec, Verdict};
use stablegc::report::{self, Format, InvariantsReport};
use stablegc::script::{self, RunError};

#[derive(Parser)]
#[command(name = "stablegc", version, about = "Surgery calculus for self-crossing stable generalized complex structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a surgery script and report every `report`ed state.
    Run {
        script: PathBuf,
        #[arg(long, default_value = "text")]
        format: Format,
    },
    /// Build a family member and compare with the closed-form verdict.
    Family {
        #[arg(long)]
        kind: FamilyKind,
        #[arg(long)]
        n: u32,
        /// Number of CP2bar summands (XHAT only).
        #[arg(long, default_value_t = 0)]
        m: u32,
        #[arg(long)]
        l: u32,
        #[arg(long, default_value = "text")]
        format: Format,
    },
    /// Classify the 2-form in a form document (JSON).
    Classify {
        #[arg(long)]
        form: PathBuf,
        #[arg(long, default_value = "text")]
        format: Format,
    },
    /// Check a graph exchange document (JSON) against the divisor rules.
    Validate {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = "text")]
        format: Format,
    },
}

/// What went wrong, and which exit code it maps to.
enum Failure {
    Domain(String),
    Parse(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Parse(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Domain(m) | Failure::Parse(m) => m,
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct NamedReport {
    name: String,
    report: InvariantsReport,
}

fn run(path: &Path, format: Format) -> Result<String, Failure> {
    let text = read(path)?;
    let reports = script::run(&text).map_err(|e| match e {
        RunError::Parse(e) => Failure::Parse(format!("{}:{e}", path.display())),
        RunError::Exec(e) => Failure::Domain(format!("{}:{e}", path.display())),
    })?;
    let reports: Vec<NamedReport> = reports
        .iter()
        .map(|(name, state)| NamedReport { name: name.clone(), report: report::invariants_report(state) })
        .collect();
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(&reports).expect("reports serialize") + "\n",
        Format::Text => {
            let mut out = String::new();
            for (i, r) in reports.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                let _ = writeln!(out, "== {} ==", r.name);
                out.push_str(&r.report.to_text());
            }
            out
        }
    })
}

#[derive(Serialize)]
struct FamilyDocument {
    spec: FamilySpec,
    name: String,
    verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<InvariantsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

/// Prints the verdict even when the build is refused; a refused build still
/// exits 1.
fn family(spec: FamilySpec, format: Format) -> (String, Option<Failure>) {
    let verdict = family::theorem_verdict(&spec);
    let built = family::build_family(&spec);
    let failure = built.as_ref().err().map(|e: &FamilyError| Failure::Domain(e.to_string()));
    let doc = FamilyDocument {
        spec,
        name: spec.to_string(),
        verdict,
        report: built.as_ref().ok().map(report::invariants_report),
        error: built.as_ref().err().map(|e| e.to_string()),
    };
    let out = match format {
        Format::Json => serde_json::to_string_pretty(&doc).expect("family document serializes") + "\n",
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "family: {}", doc.name);
            let _ = writeln!(out, "verdict: {} ({})", if verdict.admissible { "admissible" } else { "not admissible" }, verdict.reason);
            let _ = writeln!(out, "euler: {}", spec.euler());
            if let Some(r) = &doc.report {
                let _ = writeln!(out, "engine stable: {}", r.stable);
                out.push('\n');
                out.push_str(&r.to_text());
            }
            out
        }
    };
    (out, failure)
}

fn classify(path: &Path, format: Format) -> Result<String, Failure> {
    let text = read(path)?;
    let doc = exchange::classify_document(&text).map_err(|e| {
        let message = format!("{}: {e}", path.display());
        if e.is_parse_error() {
            Failure::Parse(message)
        } else {
            Failure::Domain(message)
        }
    })?;
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(&doc).expect("classification serializes") + "\n",
        Format::Text => classification_text(&doc),
    })
}

fn classification_text(doc: &PointClassDocument) -> String {
    let optional = |s: &Option<String>| s.clone().unwrap_or_else(|| "undefined".into());
    let residues: Vec<String> =
        doc.elliptic_residues.iter().map(|z| format!("{} + {}i", z.re, z.im)).collect();
    let mut out = String::new();
    let _ = writeln!(out, "nondegenerate: {}", doc.nondegenerate);
    let _ = writeln!(out, "elliptic_residues: [{}]", residues.join(", "));
    let _ = writeln!(out, "in_im_image: {}", doc.in_im_image);
    let _ = writeln!(out, "locally_complex: {}", doc.locally_complex);
    let _ = writeln!(out, "branch: {}", serde_json::to_value(doc.branch).expect("branch").as_str().unwrap_or("?"));
    let _ = writeln!(out, "index: {}", doc.index.map_or("undefined".to_string(), |s| s.to_string()));
    let _ = writeln!(out, "imaginary_parameter: {}", doc.imaginary_parameter);
    let _ = writeln!(out, "lambda1: {}", optional(&doc.lambda1));
    let _ = writeln!(out, "lambda2: {}", optional(&doc.lambda2));
    let _ = writeln!(out, "param_modulus: {}", optional(&doc.param_modulus));
    out
}

#[derive(Serialize)]
struct ValidationDocument {
    valid: bool,
    components: usize,
    crossings: usize,
    violations: Vec<String>,
}

fn validate(path: &Path, format: Format) -> (String, Option<Failure>) {
    let graph = match read(path).and_then(|text| {
        DivisorGraph::from_json(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
    }) {
        Ok(graph) => graph,
        Err(failure) => return (String::new(), Some(failure)),
    };
    let violations: Vec<String> = match graph.validate() {
        Ok(()) => Vec::new(),
        Err(list) => list.iter().map(|v| v.to_string()).collect(),
    };
    let doc = ValidationDocument {
        valid: violations.is_empty(),
        components: graph.components().len(),
        crossings: graph.crossing_count(),
        violations,
    };
    let failure = (!doc.valid).then(|| Failure::Domain(format!("{} violation(s)", doc.violations.len())));
    let out = match format {
        Format::Json => serde_json::to_string_pretty(&doc).expect("validation serializes") + "\n",
        Format::Text if doc.valid => format!("ok: {} components, {} crossings\n", doc.components, doc.crossings),
        Format::Text => doc.violations.iter().map(|v| format!("violation: {v}\n")).collect(),
    };
    (out, failure)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (out, failure) = match cli.command {
        Command::Run { script, format } => split(run(&script, format)),
        Command::Family { kind, n, m, l, format } => {
            let spec = match kind {
                FamilyKind::X => FamilySpec::x(n, l),
                FamilyKind::Xhat => FamilySpec::xhat(n, m, l),
            };
            family(spec, format)
        }
        Command::Classify { form, format } => split(classify(&form, format)),
        Command::Validate { graph, format } => validate(&graph, format),
    };
    print!("{out}");
    match failure {
        None => ExitCode::SUCCESS,
        Some(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

fn split(result: Result<String, Failure>) -> (String, Option<Failure>) {
    match result {
        Ok(out) => (out, None),
        Err(failure) => (String::new(), Some(failure)),
    }
}
