//! Algorithm classification, interaction dimension, CAT score and success check.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::board::{CrossBoard, Schema};
use crate::lang::{Command, Program};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AlgorithmDimension {
    D0,
    D1,
    D2,
}

impl AlgorithmDimension {
    pub const ALL: [AlgorithmDimension; 3] = [AlgorithmDimension::D0, AlgorithmDimension::D1, AlgorithmDimension::D2];

    pub fn name(self) -> &'static str {
        match self {
            AlgorithmDimension::D0 => "D0",
            AlgorithmDimension::D1 => "D1",
            AlgorithmDimension::D2 => "D2",
        }
    }

    /// Short label used in reports: 0D, 1D, 2D.
    pub fn label(self) -> &'static str {
        match self {
            AlgorithmDimension::D0 => "0D",
            AlgorithmDimension::D1 => "1D",
            AlgorithmDimension::D2 => "2D",
        }
    }
}

impl fmt::Display for AlgorithmDimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// G is the gesture interface, P the block-based programming interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
pub enum Artefact {
    #[default]
    G,
    P,
}

impl Artefact {
    pub fn name(self) -> &'static str {
        match self {
            Artefact::G => "G",
            Artefact::P => "P",
        }
    }

    pub fn from_name(s: &str) -> Option<Artefact> {
        match s {
            "G" | "g" => Some(Artefact::G),
            "P" | "p" => Some(Artefact::P),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InteractionDimension {
    pub artefact: Artefact,
    pub feedback: bool,
}

impl InteractionDimension {
    /// The four categories in report order.
    pub const ALL: [InteractionDimension; 4] = [
        InteractionDimension { artefact: Artefact::G, feedback: true },
        InteractionDimension { artefact: Artefact::G, feedback: false },
        InteractionDimension { artefact: Artefact::P, feedback: true },
        InteractionDimension { artefact: Artefact::P, feedback: false },
    ];

    pub fn new(artefact: Artefact, feedback: bool) -> InteractionDimension {
        InteractionDimension { artefact, feedback }
    }

    /// "GF", "G", "PF" or "P".
    pub fn category(self) -> &'static str {
        match (self.artefact, self.feedback) {
            (Artefact::G, true) => "GF",
            (Artefact::G, false) => "G",
            (Artefact::P, true) => "PF",
            (Artefact::P, false) => "P",
        }
    }

    pub fn from_category(s: &str) -> Option<InteractionDimension> {
        InteractionDimension::ALL.into_iter().find(|i| i.category() == s)
    }

    /// Position in [`InteractionDimension::ALL`].
    pub fn ordinal(self) -> usize {
        InteractionDimension::ALL.iter().position(|i| *i == self).expect("all categories listed")
    }
}

impl fmt::Display for InteractionDimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.category())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CatScore {
    pub algorithm_points: u32,
    pub artefact_points: u32,
    pub autonomy_points: u32,
    pub total: u32,
    pub rubric_id: String,
}

/// Outcome of one schema for one student.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskOutcome {
    pub schema_id: String,
    pub attempted: bool,
    pub solved: bool,
    pub surrendered: bool,
    /// Seconds, millisecond precision.
    pub duration: f64,
    pub dimension: Option<AlgorithmDimension>,
    pub interaction: Option<InteractionDimension>,
    pub score: Option<CatScore>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("the program contains no painting command")]
pub struct Unclassifiable;

fn distinct_colours(colors: &[crate::board::Color]) -> usize {
    let mut seen = colors.to_vec();
    seen.sort_by_key(|c| c.letter());
    seen.dedup();
    seen.len()
}

/// Class of a single command; `None` for commands that paint nothing.
pub fn command_dimension(command: &Command) -> Option<AlgorithmDimension> {
    use AlgorithmDimension::*;
    match command {
        Command::GoCell(_) | Command::Go { .. } => None,
        Command::PaintSingleCell(_) => Some(D0),
        Command::FillEmpty(_) => Some(D1),
        Command::PaintPattern { colors, .. } | Command::PaintMultipleCells { colors, .. } => {
            Some(if distinct_colours(colors) > 1 { D2 } else { D1 })
        }
        Command::CopyCells { .. } | Command::MirrorBoard(_) | Command::MirrorCells { .. } => Some(D2),
        Command::RepeatCommands { commands, .. } | Command::MirrorCommands { commands, .. } => {
            commands.iter().any(|c| command_dimension(c).is_some()).then_some(D2)
        }
    }
}

/// Highest class over the program's commands.
pub fn classify_dimension(program: &Program) -> Result<AlgorithmDimension, Unclassifiable> {
    program.commands.iter().filter_map(command_dimension).max().ok_or(Unclassifiable)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RubricError {
    #[error("rubric `{rubric}` has no `{table}` entry for `{key}`")]
    Missing { rubric: String, table: &'static str, key: String },
    #[error("malformed rubric: {0}")]
    Malformed(String),
}

/// Point tables for the three score components.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rubric {
    #[serde(default = "default_rubric_id")]
    pub id: String,
    pub algorithm: BTreeMap<String, u32>,
    pub artefact: BTreeMap<String, u32>,
    pub autonomy: BTreeMap<String, u32>,
}

fn default_rubric_id() -> String {
    "custom".to_string()
}

pub const DEFAULT_RUBRIC_JSON: &str = r#"{
  "id": "default",
  "algorithm": {"D0": 0, "D1": 1, "D2": 2},
  "artefact": {"G": 0, "P": 1},
  "autonomy": {"feedback": 0, "no_feedback": 1}
}"#;

impl Default for Rubric {
    fn default() -> Rubric {
        Rubric::from_json(DEFAULT_RUBRIC_JSON).expect("built-in rubric parses")
    }
}

impl Rubric {
    pub fn from_json(text: &str) -> Result<Rubric, RubricError> {
        let rubric: Rubric = serde_json::from_str(text).map_err(|e| RubricError::Malformed(e.to_string()))?;
        rubric.check()?;
        Ok(rubric)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Rubric, RubricError> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| RubricError::Malformed(e.to_string()))?;
        Rubric::from_json(&text)
    }

    /// Every table must cover every value of its component.
    pub fn check(&self) -> Result<(), RubricError> {
        for d in AlgorithmDimension::ALL {
            self.lookup("algorithm", &self.algorithm, d.name())?;
        }
        for a in [Artefact::G, Artefact::P] {
            self.lookup("artefact", &self.artefact, a.name())?;
        }
        for key in ["feedback", "no_feedback"] {
            self.lookup("autonomy", &self.autonomy, key)?;
        }
        Ok(())
    }

    fn lookup(&self, table: &'static str, map: &BTreeMap<String, u32>, key: &str) -> Result<u32, RubricError> {
        map.get(key).copied().ok_or_else(|| RubricError::Missing {
            rubric: self.id.clone(),
            table,
            key: key.to_string(),
        })
    }
}

pub fn cat_score(
    dimension: AlgorithmDimension,
    interaction: InteractionDimension,
    rubric: &Rubric,
) -> Result<CatScore, RubricError> {
    let algorithm_points = rubric.lookup("algorithm", &rubric.algorithm, dimension.name())?;
    let artefact_points = rubric.lookup("artefact", &rubric.artefact, interaction.artefact.name())?;
    let autonomy_key = if interaction.feedback { "feedback" } else { "no_feedback" };
    let autonomy_points = rubric.lookup("autonomy", &rubric.autonomy, autonomy_key)?;
    Ok(CatScore {
        algorithm_points,
        artefact_points,
        autonomy_points,
        total: algorithm_points + artefact_points + autonomy_points,
        rubric_id: rubric.id.clone(),
    })
}

/// True iff every one of the 20 cells matches the reference.
pub fn check_success(board: &CrossBoard, schema: &Schema) -> bool {
    *board == schema.cells
}

/// What the interaction derivation needs to know from a task's events.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InteractionSignal {
    Interface(Artefact),
    Feedback(bool),
    Confirm,
    Surrender,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InteractionError {
    #[error("the task has no confirmation or surrender")]
    NotConcluded,
    #[error("the task log records no interface")]
    NoInterface,
}

/// Artefact active at the last confirmation (or surrender when nothing was
/// confirmed); feedback true if it was switched on at any point.
pub fn derive_interaction(signals: &[InteractionSignal]) -> Result<InteractionDimension, InteractionError> {
    let mut interface = None;
    let mut at_end = None;
    let mut feedback = false;
    for signal in signals {
        match *signal {
            InteractionSignal::Interface(a) => interface = Some(a),
            InteractionSignal::Feedback(on) => feedback |= on,
            InteractionSignal::Confirm | InteractionSignal::Surrender => at_end = Some(interface),
        }
    }
    let artefact = at_end.ok_or(InteractionError::NotConcluded)?.ok_or(InteractionError::NoInterface)?;
    Ok(InteractionDimension { artefact, feedback })
}
