//! Canonical text form: `name(arg,arg)`, `{a,b}` sets, no spaces, one
//! command per line.

use std::fmt::{self, Display, Write};

use super::ast::{Command, Pattern, Program};
use super::parser::{parse_command, ParseError};

impl Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Pattern::Line(d) => f.write_str(d.name()),
            Pattern::Square { first, second } => {
                write!(f, "square_{}_{}_{}", first.name(), second.name(), first.opposite().name())
            }
            Pattern::L { first, second } => write!(f, "l_{}_{}", first.name(), second.name()),
            Pattern::Zigzag { first, second } => write!(f, "zigzag_{}_{}", first.name(), second.name()),
        }
    }
}

fn set<T: Display>(items: &[T]) -> String {
    let mut out = String::from("{");
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "{item}").unwrap();
    }
    out.push('}');
    out
}

impl Command {
    /// Canonical text of each argument, in parameter order.
    pub fn argument_texts(&self) -> Vec<String> {
        match self {
            Command::GoCell(c) => vec![c.to_string()],
            Command::Go { direction, repetitions } => vec![direction.name().into(), repetitions.to_string()],
            Command::PaintSingleCell(c) | Command::FillEmpty(c) => vec![c.to_string()],
            Command::PaintPattern { colors, repetitions, pattern } => {
                vec![set(colors), repetitions.to_string(), pattern.to_string()]
            }
            Command::PaintMultipleCells { colors, cells } => vec![set(colors), set(cells)],
            Command::RepeatCommands { commands, positions } => vec![set(commands), set(positions)],
            Command::CopyCells { origin, destination } => vec![set(origin), set(destination)],
            Command::MirrorBoard(axis) => vec![axis.name().into()],
            Command::MirrorCells { cells, axis } => vec![set(cells), axis.name().into()],
            Command::MirrorCommands { commands, axis } => vec![set(commands), axis.name().into()],
        }
    }

    /// Returns a copy with one argument replaced by `text`, re-validated
    /// through the parser. Used for block property edits.
    pub fn with_argument(&self, parameter: &str, text: &str) -> Result<Command, ParseError> {
        let mut args = self.argument_texts();
        let slot = self
            .parameters()
            .iter()
            .position(|p| *p == parameter)
            .ok_or_else(|| ParseError::unknown_parameter(self.name(), parameter))?;
        args[slot] = text.to_string();
        parse_command(&format!("{}({})", self.name(), args.join(",")))
    }
}

impl Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name(), self.argument_texts().join(","))
    }
}

impl Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, command) in self.commands.iter().enumerate() {
            if i > 0 {
                f.write_char('\n')?;
            }
            write!(f, "{command}")?;
        }
        Ok(())
    }
}

pub fn format_program(program: &Program) -> String {
    program.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::{Color, MirrorAxis};
    use crate::lang::ast::Direction;

    #[test]
    fn canonical_examples() {
        assert_eq!(Command::GoCell("C3".parse().unwrap()).to_string(), "goCell(C3)");
        let row: Vec<_> = (1..=6).map(|c| format!("C{c}").parse().unwrap()).collect();
        assert_eq!(
            Command::MirrorCells { cells: row, axis: MirrorAxis::Horizontal }.to_string(),
            "mirrorCells({C1,C2,C3,C4,C5,C6},horizontal)"
        );
        assert_eq!(format_program(&Program::default()), "");
        let square = Command::PaintPattern {
            colors: vec![Color::Green, Color::Blue],
            repetitions: 4,
            pattern: Pattern::square(Direction::Right, Direction::Up).unwrap(),
        };
        assert_eq!(square.to_string(), "paintPattern({green,blue},4,square_right_up_left)");
    }

    #[test]
    fn argument_edit() {
        let go = Command::Go { direction: Direction::Right, repetitions: 2 };
        assert_eq!(go.with_argument("move", "up").unwrap().to_string(), "go(up,2)");
        assert_eq!(go.with_argument("repetitions", "5").unwrap().to_string(), "go(right,5)");
        assert!(go.with_argument("repetitions", "0").is_err());
        assert!(go.with_argument("color", "red").is_err());
        let paint = Command::PaintSingleCell(Color::Yellow);
        assert_eq!(paint.with_argument("color", "red").unwrap(), Command::PaintSingleCell(Color::Red));
    }
}
