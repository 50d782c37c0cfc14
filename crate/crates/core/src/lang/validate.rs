//! Statically decidable faults. Anything that depends on the cursor or the
//! board is left to the interpreter.

use std::fmt;

use serde::Serialize;

use super::ast::{Command, Direction, PatternKind, Pattern, Program};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiagnosticKind {
    /// Square and L shapes colour exactly `expected` cells.
    PatternArity { pattern: String, expected: u32, found: u32 },
    LengthMismatch { origin: usize, destination: usize },
    ZigzagDirections { first: String, second: String },
    EmptyList { parameter: &'static str },
    NestedComposite { command: &'static str },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    /// Top-level command index.
    pub index: usize,
    /// Position inside a nested command list, when the fault is there.
    pub nested: Option<usize>,
    #[serde(flatten)]
    pub kind: DiagnosticKind,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "command {}", self.index + 1)?;
        if let Some(n) = self.nested {
            write!(f, " (nested {})", n + 1)?;
        }
        f.write_str(": ")?;
        match &self.kind {
            DiagnosticKind::PatternArity { pattern, expected, found } => {
                write!(f, "{pattern} colours exactly {expected} dots, repetitions is {found}")
            }
            DiagnosticKind::LengthMismatch { origin, destination } => {
                write!(f, "copy needs as many destinations as origins ({origin} vs {destination})")
            }
            DiagnosticKind::ZigzagDirections { first, second } => {
                write!(f, "zigzag directions {first} and {second} must differ and not be opposite")
            }
            DiagnosticKind::EmptyList { parameter } => write!(f, "`{parameter}` must not be empty"),
            DiagnosticKind::NestedComposite { command } => write!(f, "`{command}` cannot be nested"),
        }
    }
}

pub(crate) fn zigzag_is_valid(first: Direction, second: Direction) -> bool {
    first != second && first != second.opposite()
}

fn check(cmd: &Command, nested_depth: usize, out: &mut Vec<DiagnosticKind>) {
    match cmd {
        Command::PaintPattern { colors, repetitions, pattern } => {
            if colors.is_empty() {
                out.push(DiagnosticKind::EmptyList { parameter: "colors" });
            }
            if let Some(expected) = pattern.fixed_len() {
                if *repetitions != expected {
                    let name = if pattern.kind() == PatternKind::Square { "square" } else { "L" };
                    out.push(DiagnosticKind::PatternArity {
                        pattern: name.to_string(),
                        expected,
                        found: *repetitions,
                    });
                }
            }
            if let Pattern::Zigzag { first, second } = *pattern {
                if !zigzag_is_valid(first, second) {
                    out.push(DiagnosticKind::ZigzagDirections {
                        first: first.name().into(),
                        second: second.name().into(),
                    });
                }
            }
        }
        Command::PaintMultipleCells { colors, cells } => {
            if colors.is_empty() {
                out.push(DiagnosticKind::EmptyList { parameter: "colors" });
            }
            if cells.is_empty() {
                out.push(DiagnosticKind::EmptyList { parameter: "cellsPositions" });
            }
        }
        Command::CopyCells { origin, destination } if origin.len() != destination.len() => {
            out.push(DiagnosticKind::LengthMismatch { origin: origin.len(), destination: destination.len() });
        }
        Command::RepeatCommands { commands, positions } => {
            if commands.is_empty() {
                out.push(DiagnosticKind::EmptyList { parameter: "commands" });
            }
            if positions.is_empty() {
                out.push(DiagnosticKind::EmptyList { parameter: "positions" });
            }
        }
        Command::MirrorCommands { commands, .. } if commands.is_empty() => {
            out.push(DiagnosticKind::EmptyList { parameter: "commands" });
        }
        _ => {}
    }
    if nested_depth > 0 && cmd.is_composite() {
        out.push(DiagnosticKind::NestedComposite { command: cmd.name() });
    }
}

/// Lists static faults; an empty result means the program is statically clean.
pub fn validate_static(program: &Program) -> Vec<Diagnostic> {
    let mut diagnostics = Vec::new();
    for (index, cmd) in program.commands.iter().enumerate() {
        let mut kinds = Vec::new();
        check(cmd, 0, &mut kinds);
        diagnostics.extend(kinds.into_iter().map(|kind| Diagnostic { index, nested: None, kind }));
        for (n, inner) in cmd.nested().iter().enumerate() {
            let mut kinds = Vec::new();
            check(inner, 1, &mut kinds);
            diagnostics.extend(kinds.into_iter().map(|kind| Diagnostic { index, nested: Some(n), kind }));
        }
    }
    diagnostics
}
