//! Command-line tools for the Cross Array Task engine: batch runs, a REPL,
//! schema checks, scoring, dataset analysis and the HTTP service.

pub mod repl;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use cat_core::analysis::{
    render, strategy_distribution, success_by_schema, time_by_interaction, AgeBands, ReportFormat,
};
use cat_core::board::Schema;
use cat_core::catalog::{self, Module};
use cat_core::interp::{run_program, RunOptions};
use cat_core::lang::{parse_program, validate_static};
use cat_core::scorer::{cat_score, check_success, classify_dimension, InteractionDimension, Rubric};
use cat_core::telemetry::{pseudonymise, Dataset};
use cat_core::CrossBoard;
use cat_service::Lang;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

pub use repl::{Repl, Reply};

/// Exit status of `run` when the board does not match the schema.
pub const EXIT_MISMATCH: i32 = 3;
pub const EXIT_INTERPRETER: i32 = 2;
pub const EXIT_FAILURE: i32 = 1;

#[derive(Debug, Parser)]
#[command(name = "cat", version, about = "Cross Array Task engine")]
pub struct Cli {
    /// Storage root for datasets; relative dataset paths are looked up here too.
    #[arg(long, env = "CAT_DATA_DIR", global = true)]
    pub data_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportKind {
    Times,
    Success,
    Strategies,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Run a program on an empty cross and compare it with a schema.
    Run {
        program: PathBuf,
        /// Schema file, or the id of a bundled schema such as V05.
        #[arg(long)]
        schema: Option<String>,
        #[arg(long)]
        rubric: Option<PathBuf>,
        /// Interaction category used for the score (GF, G, PF or P).
        #[arg(long, default_value = "P")]
        interaction: String,
        #[arg(long, default_value = "text")]
        format: ReportFormat,
    },
    /// Interactive session, one command per line.
    Repl {
        #[arg(long)]
        schema: Option<String>,
        #[arg(long)]
        rubric: Option<PathBuf>,
        #[arg(long, default_value = "en")]
        lang: Lang,
    },
    /// Check schema files (.json) and programs (anything else).
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Algorithmic dimension and score of a program.
    Score {
        program: PathBuf,
        #[arg(long)]
        rubric: Option<PathBuf>,
        #[arg(long, default_value = "P")]
        interaction: String,
        #[arg(long, default_value = "text")]
        format: ReportFormat,
    },
    /// Reports over a dataset.
    Analyze {
        report: ReportKind,
        dataset: PathBuf,
        /// Age bands such as 3-6,7-9,10-13.
        #[arg(long)]
        bands: Option<AgeBands>,
        #[arg(long, default_value = "text")]
        format: ReportFormat,
    },
    /// Re-emit a dataset, optionally pseudonymised.
    Export {
        dataset: PathBuf,
        #[arg(long)]
        pseudo: bool,
        #[arg(long, env = "CAT_SALT")]
        salt: Option<String>,
        /// Where to write the code table of a pseudonymised export (CSV).
        #[arg(long)]
        mapping: Option<PathBuf>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// List the bundled schemas.
    Schemas {
        #[arg(long)]
        module: Option<String>,
        /// Also write each schema as <id>.json into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "text")]
        format: ReportFormat,
    },
    /// Start the HTTP service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
        #[arg(long)]
        rubric: Option<PathBuf>,
        #[arg(long, env = "CAT_SALT")]
        salt: Option<String>,
    },
}

/// Captured result of one non-interactive command.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Outcome {
        Outcome { stdout, stderr: String::new(), code: 0 }
    }
}

pub fn load_rubric(path: Option<&Path>) -> anyhow::Result<Rubric> {
    match path {
        Some(p) => Rubric::load(p).with_context(|| format!("rubric {}", p.display())),
        None => Ok(Rubric::default()),
    }
}

/// A schema file, or a bundled schema id when no such file exists.
pub fn load_schema(arg: &str) -> anyhow::Result<Schema> {
    let path = Path::new(arg);
    if path.exists() {
        return Schema::load(path).with_context(|| format!("schema {arg}"));
    }
    match catalog::find(arg) {
        Some(entry) => Ok(entry.schema.clone()),
        None => bail!("no schema file or bundled schema named `{arg}`"),
    }
}

fn resolve(path: &Path, data_dir: Option<&Path>) -> PathBuf {
    match data_dir {
        Some(dir) if !path.exists() && path.is_relative() => dir.join(path),
        _ => path.to_path_buf(),
    }
}

fn read_program(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn interaction(category: &str) -> anyhow::Result<InteractionDimension> {
    InteractionDimension::from_category(category)
        .with_context(|| format!("unknown interaction `{category}` (GF, G, PF or P)"))
}

/// Runs every subcommand except `repl` and `serve`.
pub fn execute(cli: &Cli) -> anyhow::Result<Outcome> {
    let data_dir = cli.data_dir.as_deref();
    match &cli.command {
        Cmd::Run { program, schema, rubric, interaction: cat, format } => {
            let rubric = load_rubric(rubric.as_deref())?;
            let schema = schema.as_deref().map(load_schema).transpose()?;
            let interaction = interaction(cat)?;
            run(&read_program(program)?, schema.as_ref(), &rubric, interaction, *format)
        }
        Cmd::Validate { files } => Ok(validate(files)),
        Cmd::Score { program, rubric, interaction: cat, format } => {
            let rubric = load_rubric(rubric.as_deref())?;
            score(&read_program(program)?, &rubric, interaction(cat)?, *format)
        }
        Cmd::Analyze { report, dataset, bands, format } => {
            let dataset = Dataset::load(resolve(dataset, data_dir))?;
            Ok(analyze(&dataset, *report, &bands.clone().unwrap_or_default(), *format))
        }
        Cmd::Export { dataset, pseudo, salt, mapping, out } => {
            let dataset = Dataset::load(resolve(dataset, data_dir))?;
            let text = export(&dataset, *pseudo, salt.as_deref(), mapping.as_deref())?;
            match out {
                Some(path) => {
                    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
                    Ok(Outcome::default())
                }
                None => Ok(Outcome::ok(text)),
            }
        }
        Cmd::Schemas { module, out, format } => schemas(module.as_deref(), out.as_deref(), *format),
        Cmd::Repl { .. } | Cmd::Serve { .. } => bail!("interactive commands are started by the binary"),
    }
}

pub fn run(
    source: &str,
    schema: Option<&Schema>,
    rubric: &Rubric,
    interaction: InteractionDimension,
    format: ReportFormat,
) -> anyhow::Result<Outcome> {
    let program = match parse_program(source) {
        Ok(p) => p,
        Err(e) => return Ok(Outcome { stdout: String::new(), stderr: format!("parse error: {e}\n"), code: EXIT_FAILURE }),
    };
    let (state, result) = run_program(&program, CrossBoard::empty(), &RunOptions::default());
    let board = state.board();
    let dimension = classify_dimension(&program).ok();
    let success = schema.map(|s| check_success(board, s));
    let score = match (result.is_ok(), success, dimension) {
        (true, Some(true) | None, Some(d)) => Some(cat_score(d, interaction, rubric)?),
        _ => None,
    };
    let code = match (&result, success) {
        (Err(_), _) => EXIT_INTERPRETER,
        (Ok(()), Some(false)) => EXIT_MISMATCH,
        _ => 0,
    };
    let mut stderr = String::new();
    if let Err(e) = &result {
        writeln!(stderr, "error: {} in command {} `{}`: {}", e.kind, e.index + 1, e.command, e.message)?;
        writeln!(stderr, "hint: {}", e.suggestion)?;
    }
    let stdout = match format {
        ReportFormat::Json => {
            let doc = json!({
                "board": board,
                "schema": schema.map(|s| s.id.clone()),
                "success": success,
                "dimension": dimension,
                "interaction": interaction,
                "score": score,
                "error": result.as_ref().err(),
            });
            format!("{}\n", serde_json::to_string_pretty(&doc)?)
        }
        ReportFormat::Text | ReportFormat::Csv => {
            let mut out = board.render_grid();
            if let Some(s) = schema {
                let verdict = if success == Some(true) { "match" } else { "no match" };
                writeln!(out, "schema: {} ({verdict}, {}/20 cells coloured)", s.id, board.coloured_count())?;
            }
            match dimension {
                Some(d) => writeln!(out, "dimension: {} ({})", d.name(), d.label())?,
                None => writeln!(out, "dimension: - (no painting command)")?,
            }
            match &score {
                Some(s) => writeln!(
                    out,
                    "score: {} ({interaction}: algorithm {} + artefact {} + autonomy {}, rubric {})",
                    s.total, s.algorithm_points, s.artefact_points, s.autonomy_points, s.rubric_id
                )?,
                None => writeln!(out, "score: -")?,
            }
            out
        }
    };
    Ok(Outcome { stdout, stderr, code })
}

pub fn score(
    source: &str,
    rubric: &Rubric,
    interaction: InteractionDimension,
    format: ReportFormat,
) -> anyhow::Result<Outcome> {
    let program = match parse_program(source) {
        Ok(p) => p,
        Err(e) => return Ok(Outcome { stdout: String::new(), stderr: format!("parse error: {e}\n"), code: EXIT_FAILURE }),
    };
    let Ok(dimension) = classify_dimension(&program) else {
        return Ok(Outcome {
            stdout: String::new(),
            stderr: "unclassifiable: the program contains no painting command\n".into(),
            code: EXIT_FAILURE,
        });
    };
    let s = cat_score(dimension, interaction, rubric)?;
    let stdout = match format {
        ReportFormat::Json => format!(
            "{}\n",
            serde_json::to_string_pretty(&json!({"dimension": dimension, "interaction": interaction, "score": s}))?
        ),
        ReportFormat::Csv => format!(
            "dimension,interaction,algorithm,artefact,autonomy,total\n{},{interaction},{},{},{},{}\n",
            dimension.name(),
            s.algorithm_points,
            s.artefact_points,
            s.autonomy_points,
            s.total
        ),
        ReportFormat::Text => format!(
            "dimension: {} ({})\nscore: {} ({interaction}: algorithm {} + artefact {} + autonomy {}, rubric {})\n",
            dimension.name(),
            dimension.label(),
            s.total,
            s.algorithm_points,
            s.artefact_points,
            s.autonomy_points,
            s.rubric_id
        ),
    };
    Ok(Outcome::ok(stdout))
}

pub fn validate(files: &[PathBuf]) -> Outcome {
    let mut outcome = Outcome::default();
    for path in files {
        let shown = path.display();
        let is_schema = path.extension().is_some_and(|e| e == "json");
        let line = if is_schema {
            match Schema::load(path) {
                Ok(s) => Ok(format!("ok {shown}: schema {}", s.id)),
                Err(e) => Err(format!("{shown}: {e}")),
            }
        } else {
            match std::fs::read_to_string(path).map_err(|e| e.to_string()).and_then(|t| parse_program(&t).map_err(|e| e.to_string())) {
                Err(e) => Err(format!("{shown}: {e}")),
                Ok(program) => {
                    let diagnostics = validate_static(&program);
                    if diagnostics.is_empty() {
                        Ok(format!("ok {shown}: {} commands", program.len()))
                    } else {
                        Err(diagnostics.iter().map(|d| format!("{shown}: {d}")).collect::<Vec<_>>().join("\n"))
                    }
                }
            }
        };
        match line {
            Ok(l) => outcome.stdout.push_str(&format!("{l}\n")),
            Err(l) => {
                outcome.stderr.push_str(&format!("{l}\n"));
                outcome.code = EXIT_FAILURE;
            }
        }
    }
    outcome
}

pub fn analyze(dataset: &Dataset, kind: ReportKind, bands: &AgeBands, format: ReportFormat) -> Outcome {
    match kind {
        ReportKind::Times => Outcome::ok(render(&time_by_interaction(dataset), format)),
        ReportKind::Success => Outcome::ok(render(&success_by_schema(dataset, bands), format)),
        ReportKind::Strategies => {
            let report = strategy_distribution(dataset, bands);
            let stderr = report.warnings.iter().map(|w| format!("warning: {w}\n")).collect();
            Outcome { stdout: render(&report, format), stderr, code: 0 }
        }
    }
}

pub fn export(dataset: &Dataset, pseudo: bool, salt: Option<&str>, mapping: Option<&Path>) -> anyhow::Result<String> {
    if !pseudo {
        return Ok(dataset.to_jsonl());
    }
    let Some(salt) = salt.filter(|s| !s.is_empty()) else {
        bail!("--pseudo needs a salt (--salt or CAT_SALT)");
    };
    let (released, table) = pseudonymise(dataset, salt);
    if let Some(path) = mapping {
        let mut writer = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
        for entry in &table {
            writer.serialize(entry)?;
        }
        writer.flush()?;
    }
    Ok(released.to_jsonl())
}

pub fn schemas(module: Option<&str>, out: Option<&Path>, format: ReportFormat) -> anyhow::Result<Outcome> {
    let modules = match module {
        None => vec![Module::Training, Module::Validation],
        Some(name) => vec![Module::from_name(name).with_context(|| format!("unknown module `{name}`"))?],
    };
    let entries: Vec<&catalog::CatalogEntry> = modules.into_iter().flat_map(catalog::entries).collect();
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        for e in &entries {
            std::fs::write(dir.join(format!("{}.json", e.schema.id)), e.schema.to_json())?;
        }
    }
    let stdout = match format {
        ReportFormat::Json => {
            let docs: Vec<serde_json::Value> = entries
                .iter()
                .map(|e| {
                    json!({
                        "id": e.schema.id,
                        "module": e.module,
                        "index": e.index,
                        "board": e.schema.cells,
                        "complexity_hint": e.schema.complexity_hint,
                        "instructions": e.instructions,
                    })
                })
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&docs)?)
        }
        ReportFormat::Csv => {
            let mut s = String::from("id,module,index,board,complexity_hint\n");
            for e in &entries {
                let hint = e.schema.complexity_hint.map(|h| h.to_string()).unwrap_or_default();
                writeln!(s, "{},{},{},{},{hint}", e.schema.id, e.module, e.index, e.schema.cells.to_compact())?;
            }
            s
        }
        ReportFormat::Text => {
            let mut s = String::new();
            for e in &entries {
                writeln!(s, "{} ({} {}): {}", e.schema.id, e.module, e.index, e.instructions)?;
                s.push_str(&e.schema.cells.render_grid());
                s.push('\n');
            }
            s
        }
    };
    Ok(Outcome::ok(stdout))
}
