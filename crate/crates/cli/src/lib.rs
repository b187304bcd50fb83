//! Command-line frontend for the cognitive-map linter.
//!
//! [`run`] parses arguments and dispatches to a subcommand; it never exits
//! the process so tests can drive it with in-memory streams.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use cogmaplint_core::curation::{parse_curation, pretty_print, CurationError};
use cogmaplint_core::diagram::{build_diagram, paths_between};
use cogmaplint_core::ingest::{write_assertions, write_cognitive_map, CorpusBundle, IngestError};
use cogmaplint_core::model::{CausalDiagram, Code, CurationSpec, DiagramError};
use cogmaplint_core::report::{
    exit_status, render_dot, render_json, render_text, InputDigest, ReportDocument,
};
use cogmaplint_core::rules::{lint, lint_diagram, LintRun, LintSettings};
use cogmaplint_core::synth::{generate, parse_plants, SynthError};

/// Exit status for usage, I/O and parse failures.
pub const USAGE_FAILURE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: {source}")]
    Ingest { path: String, source: IngestError },
    #[error("{path}:{source}")]
    Curation { path: String, source: CurationError },
    #[error("{path}: {source}")]
    Diagram { path: String, source: DiagramError },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("writing output: {0}")]
    Output(#[source] io::Error),
}

#[derive(Debug, Parser)]
#[command(
    name = "cogmaplint",
    version,
    about = "Lint cognitive maps into well-formed causal diagrams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every rule check and print a report.
    Lint(LintArgs),
    /// Write the lifted causal diagram as DOT or JSON.
    Export(ExportArgs),
    /// List the causal paths between two nodes.
    Paths(PathsArgs),
    /// Print the repair suggestions attached to denied-relation findings.
    SuggestSplits(InputArgs),
    /// Generate a synthetic corpus with planted violations.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Cognitive-map CSV (index,text_entity,cluster). Repeatable.
    #[arg(long = "map", required = true, value_name = "FILE")]
    maps: Vec<PathBuf>,
    /// Assertion CSV (cause,effect,cluster). Repeatable.
    #[arg(long = "relations", required = true, value_name = "FILE")]
    relations: Vec<PathBuf>,
    /// Curation spec.
    #[arg(long, value_name = "FILE")]
    spec: PathBuf,
    /// Use this diagram JSON instead of lifting one from the inputs.
    #[arg(long, value_name = "FILE")]
    diagram: Option<PathBuf>,
    /// Longest path, in nodes, considered by the transitivity check.
    #[arg(long, value_name = "N")]
    max_path_len: Option<usize>,
    /// Token Jaccard similarity at which labels count as near-duplicates.
    #[arg(long, value_name = "T")]
    near_dup_threshold: Option<f64>,
}

#[derive(Debug, Args)]
struct LintArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Exit with status 1 on warnings too.
    #[arg(long)]
    warnings_as_errors: bool,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("target").required(true).args(["dot", "json"])))]
struct ExportArgs {
    #[command(flatten)]
    input: InputArgs,
    /// DOT output file, `-` for standard output.
    #[arg(long, value_name = "FILE")]
    dot: Option<String>,
    /// JSON output file, `-` for standard output.
    #[arg(long, value_name = "FILE")]
    json: Option<String>,
}

#[derive(Debug, Args)]
struct PathsArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    from: String,
    #[arg(long)]
    to: String,
    /// Longest path in nodes; defaults to the spec's max_path_len.
    #[arg(long, value_name = "N")]
    max_len: Option<usize>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    seed: u64,
    /// Number of clean variables.
    #[arg(long)]
    vars: usize,
    /// Violations to plant, e.g. `R4-CYCLE=2,R1-NEARDUP=1`.
    #[arg(long, value_name = "CODE=COUNT,...")]
    plant: Option<String>,
    /// Output directory, created if missing.
    #[arg(short = 'o', long = "out", value_name = "DIR")]
    out: PathBuf,
}

/// Options of one `lint` invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub maps: Vec<PathBuf>,
    pub relations: Vec<PathBuf>,
    pub spec: PathBuf,
    pub diagram: Option<PathBuf>,
    pub format: Format,
    pub max_path_len: Option<usize>,
    pub near_dup_threshold: Option<f64>,
    pub warnings_as_errors: bool,
}

/// Parsed inputs plus their digests, in command-line order.
struct Inputs {
    bundle: CorpusBundle,
    spec: CurationSpec,
    diagram: Option<CausalDiagram>,
    digests: Vec<InputDigest>,
    settings: LintSettings,
}

impl Inputs {
    fn lint(self) -> (LintRun, Vec<InputDigest>) {
        let run = match self.diagram {
            Some(diagram) => {
                let (_, resolution) = build_diagram(&self.bundle, &self.spec);
                lint_diagram(
                    &self.bundle,
                    &self.spec,
                    diagram,
                    &resolution,
                    self.settings,
                )
            }
            None => lint(&self.bundle, &self.spec, self.settings),
        };
        (run, self.digests)
    }

    fn diagram(&self) -> CausalDiagram {
        match &self.diagram {
            Some(d) => d.clone(),
            None => build_diagram(&self.bundle, &self.spec).0,
        }
    }
}

fn display(path: &Path) -> String {
    path.to_string_lossy().into_owned()
}

fn read(path: &Path, digests: &mut Vec<InputDigest>) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|source| CliError::Io {
        path: display(path),
        source,
    })?;
    digests.push(InputDigest::of(display(path), &bytes));
    String::from_utf8(bytes).map_err(|e| CliError::Io {
        path: display(path),
        source: io::Error::new(io::ErrorKind::InvalidData, e),
    })
}

fn load(
    maps: &[PathBuf],
    relations: &[PathBuf],
    spec_path: &Path,
    diagram_path: Option<&Path>,
    max_path_len: Option<usize>,
    near_dup_threshold: Option<f64>,
) -> Result<Inputs, CliError> {
    let mut digests = Vec::new();
    let mut bundle = CorpusBundle::default();
    for path in maps {
        let text = read(path, &mut digests)?;
        bundle
            .add_map(&display(path), &text)
            .map_err(|source| CliError::Ingest {
                path: display(path),
                source,
            })?;
    }
    for path in relations {
        let text = read(path, &mut digests)?;
        bundle
            .add_relations(&display(path), &text)
            .map_err(|source| CliError::Ingest {
                path: display(path),
                source,
            })?;
    }
    let spec =
        parse_curation(&read(spec_path, &mut digests)?).map_err(|source| CliError::Curation {
            path: display(spec_path),
            source,
        })?;
    let diagram = diagram_path
        .map(|path| {
            let text = read(path, &mut digests)?;
            CausalDiagram::from_json(&text).map_err(|source| CliError::Diagram {
                path: display(path),
                source,
            })
        })
        .transpose()?;

    let mut settings = LintSettings::from_spec(&spec);
    if let Some(n) = max_path_len {
        if n < 3 {
            return Err(CliError::Usage(format!(
                "--max-path-len must be at least 3, got {n}"
            )));
        }
        settings.max_path_len = n;
    }
    if let Some(t) = near_dup_threshold {
        if !(0.0..=1.0).contains(&t) {
            return Err(CliError::Usage(format!(
                "--near-dup-threshold must lie in [0, 1], got {t}"
            )));
        }
        settings.near_dup_threshold = t;
    }
    Ok(Inputs {
        bundle,
        spec,
        diagram,
        digests,
        settings,
    })
}

fn load_args(args: &InputArgs) -> Result<Inputs, CliError> {
    load(
        &args.maps,
        &args.relations,
        &args.spec,
        args.diagram.as_deref(),
        args.max_path_len,
        args.near_dup_threshold,
    )
}

/// Runs the full pipeline and writes the report to `out`. Returns the exit
/// status for the report.
pub fn run_lint(config: &CliConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    let inputs = load(
        &config.maps,
        &config.relations,
        &config.spec,
        config.diagram.as_deref(),
        config.max_path_len,
        config.near_dup_threshold,
    )?;
    let (run, digests) = inputs.lint();
    let doc = ReportDocument::new(digests, run.diagnostics, run.notices);
    let rendered = match config.format {
        Format::Text => render_text(&doc),
        Format::Json => render_json(&doc),
    };
    out.write_all(rendered.as_bytes())
        .map_err(CliError::Output)?;
    Ok(exit_status(&doc, config.warnings_as_errors))
}

fn write_target(target: &str, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    if target == "-" {
        out.write_all(text.as_bytes()).map_err(CliError::Output)
    } else {
        fs::write(target, text).map_err(|source| CliError::Io {
            path: target.to_string(),
            source,
        })
    }
}

fn run_export(args: &ExportArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let diagram = load_args(&args.input)?.diagram();
    if let Some(target) = &args.dot {
        write_target(target, &render_dot(&diagram), out)?;
    }
    if let Some(target) = &args.json {
        write_target(target, &diagram.to_json(), out)?;
    }
    Ok(0)
}

fn run_paths(args: &PathsArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let inputs = load_args(&args.input)?;
    let max_len = args.max_len.unwrap_or(inputs.settings.max_path_len);
    let diagram = inputs.diagram();
    let paths = paths_between(&diagram, 2, max_len, Some(&args.from), Some(&args.to))
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut text = String::new();
    for path in &paths {
        text.push_str(&path.to_string());
        text.push('\n');
    }
    if paths.is_empty() {
        text = format!(
            "no causal path from {} to {} within {max_len} nodes\n",
            args.from, args.to
        );
    }
    out.write_all(text.as_bytes()).map_err(CliError::Output)?;
    Ok(0)
}

fn run_suggest(args: &InputArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let (run, _) = load_args(args)?.lint();
    let mut text = String::new();
    for d in run
        .diagnostics
        .iter()
        .filter(|d| d.code == Code::R4Transitivity)
    {
        text.push_str(&format!("{}\n", d.message));
        let Some(s) = &d.suggestion else {
            text.push_str("    no 3-node path to repair\n");
            continue;
        };
        for split in &s.splits {
            text.push_str(&format!(
                "    split `{}` into `{}` (incoming: {}) and `{}` (outgoing: {})\n",
                split.mediator,
                split.part_a,
                split.incoming.join(", "),
                split.part_b,
                split.outgoing.join(", ")
            ));
        }
        for r in &s.reclassifications {
            text.push_str(&format!("    reclassify `{}`: {}\n", r.mediator, r.note));
        }
    }
    if text.is_empty() {
        text.push_str("no denied relation is realized by a causal path\n");
    }
    out.write_all(text.as_bytes()).map_err(CliError::Output)?;
    Ok(0)
}

fn run_synth(args: &SynthArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let plants = parse_plants(args.plant.as_deref().unwrap_or(""))?;
    let corpus = generate(args.seed, args.vars, &plants)?;
    let mut files = vec![
        ("map.csv", write_cognitive_map(&corpus.bundle.entities)),
        ("relations.csv", write_assertions(&corpus.bundle.assertions)),
        ("spec.cdsl", pretty_print(&corpus.spec)),
        (
            "ledger.json",
            serde_json::to_string_pretty(&corpus.ledger).expect("ledger is serializable") + "\n",
        ),
    ];
    if corpus.needs_diagram_file() {
        files.push(("diagram.json", corpus.diagram().0.to_json()));
    }
    fs::create_dir_all(&args.out).map_err(|source| CliError::Io {
        path: display(&args.out),
        source,
    })?;
    for (name, contents) in files {
        let path = args.out.join(name);
        fs::write(&path, contents).map_err(|source| CliError::Io {
            path: display(&path),
            source,
        })?;
        writeln!(out, "wrote {}", display(&path)).map_err(CliError::Output)?;
    }
    Ok(0)
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                USAGE_FAILURE
            } else {
                let _ = out.write_all(text.as_bytes());
                0
            };
        }
    };
    let result = match &cli.command {
        Command::Lint(a) => {
            let config = CliConfig {
                maps: a.input.maps.clone(),
                relations: a.input.relations.clone(),
                spec: a.input.spec.clone(),
                diagram: a.input.diagram.clone(),
                format: a.format,
                max_path_len: a.input.max_path_len,
                near_dup_threshold: a.input.near_dup_threshold,
                warnings_as_errors: a.warnings_as_errors,
            };
            run_lint(&config, out)
        }
        Command::Export(a) => run_export(a, out),
        Command::Paths(a) => run_paths(a, out),
        Command::SuggestSplits(a) => run_suggest(a, out),
        Command::Synth(a) => run_synth(a, out),
    };
    match result {
        Ok(status) => status,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            USAGE_FAILURE
        }
    }
}
