//! Line-at-a-time command loop against one schema.

use cat_core::board::Schema;
use cat_core::interp::ExecState;
use cat_core::lang::{parse_program, Command, Program};
use cat_core::scorer::{cat_score, check_success, classify_dimension, Artefact, InteractionDimension, Rubric};
use cat_service::{labels, Labels, Lang};

pub const HELP: &str = "\
commands are entered in the CAT language, one or more per line
  :feedback on|off   show or hide the colouring cross
  :score             algorithmic dimension and score of the program so far
  :program           confirmed commands
  :reset             start the schema again
  :surrender         give up on the schema
  :help              this text
  :quit              leave
";

/// What one input line produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reply {
    pub output: String,
    pub quit: bool,
}

impl Reply {
    fn text(output: impl Into<String>) -> Reply {
        Reply { output: output.into(), quit: false }
    }
}

pub struct Repl {
    schema: Option<Schema>,
    rubric: Rubric,
    labels: Labels,
    state: ExecState,
    program: Vec<Command>,
    feedback: bool,
    feedback_used: bool,
    surrendered: bool,
}

impl Repl {
    pub fn new(schema: Option<Schema>, rubric: Rubric, lang: Lang) -> Repl {
        Repl {
            schema,
            rubric,
            labels: labels(lang),
            state: ExecState::default(),
            program: Vec::new(),
            feedback: true,
            feedback_used: true,
            surrendered: false,
        }
    }

    pub fn state(&self) -> &ExecState {
        &self.state
    }

    pub fn feedback(&self) -> bool {
        self.feedback
    }

    pub fn banner(&self) -> String {
        let mut out = String::from("CAT interactive session; :help lists the commands\n");
        out.push_str(&self.boards());
        out
    }

    pub fn handle(&mut self, line: &str) -> Reply {
        let line = line.trim();
        if line.is_empty() {
            return Reply::text("");
        }
        if let Some(rest) = line.strip_prefix(':') {
            return self.meta(rest.trim());
        }
        if self.surrendered {
            return Reply::text(format!("{}; :reset to start again\n", self.labels.skipped));
        }
        let program = match parse_program(line) {
            Ok(p) => p,
            Err(e) => return Reply::text(format!("parse error: {e}\n")),
        };
        let mut out = String::new();
        for command in program.commands {
            match self.state.execute(&command) {
                Ok(_) => self.program.push(command),
                Err(e) => {
                    out.push_str(&format!("error: {} at `{}`: {}\nhint: {}\n", e.kind, e.command, e.message, e.suggestion));
                    break;
                }
            }
        }
        out.push_str(&self.boards());
        if self.solved() {
            out.push_str(&format!("{}!\n", self.labels.correct));
        }
        Reply::text(out)
    }

    fn meta(&mut self, rest: &str) -> Reply {
        let mut words = rest.split_whitespace();
        match (words.next().unwrap_or(""), words.next()) {
            ("feedback", Some("on")) => {
                self.feedback = true;
                self.feedback_used = true;
                Reply::text(self.boards())
            }
            ("feedback", Some("off")) => {
                self.feedback = false;
                Reply::text(self.boards())
            }
            ("score", None) => Reply::text(self.score_line()),
            ("program", None) => Reply::text(format!("{}\n", Program::new(self.program.clone()))),
            ("reset", None) => {
                self.state = ExecState::default();
                self.program.clear();
                self.surrendered = false;
                self.feedback_used = self.feedback;
                Reply::text(self.boards())
            }
            ("surrender", None) => {
                self.surrendered = true;
                Reply::text(format!("{}\n", self.labels.skipped))
            }
            ("help", None) => Reply::text(HELP),
            ("quit" | "q" | "exit", None) => Reply { output: String::new(), quit: true },
            _ => Reply::text(format!("unknown command `:{rest}`; :help lists the commands\n")),
        }
    }

    fn solved(&self) -> bool {
        self.schema.as_ref().is_some_and(|s| check_success(self.state.board(), s))
    }

    fn score_line(&self) -> String {
        let program = Program::new(self.program.clone());
        match classify_dimension(&program) {
            Err(e) => format!("{}: - ({e})\n", self.labels.score),
            Ok(d) => {
                let interaction = InteractionDimension::new(Artefact::P, self.feedback_used);
                match cat_score(d, interaction, &self.rubric) {
                    Ok(s) => format!(
                        "{}: {} ({} {}, algorithm {} + artefact {} + autonomy {})\n",
                        self.labels.score,
                        s.total,
                        d.name(),
                        interaction,
                        s.algorithm_points,
                        s.artefact_points,
                        s.autonomy_points
                    ),
                    Err(e) => format!("{}: - ({e})\n", self.labels.score),
                }
            }
        }
    }

    fn boards(&self) -> String {
        let mut out = String::new();
        if let Some(schema) = &self.schema {
            out.push_str(&format!("{} ({})\n{}", self.labels.reference, schema.id, schema.cells.render_grid()));
        }
        if self.feedback {
            out.push_str(&format!("{}\n{}", self.labels.colouring, self.state.board().render_grid()));
        } else {
            out.push_str(&format!("{}: off\n", self.labels.feedback));
        }
        out
    }
}
