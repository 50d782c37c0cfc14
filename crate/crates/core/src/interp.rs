//! Executes colouring programs against a [`CrossBoard`] with a cursor.
//!
//! Every top-level command is applied atomically: a command that fails leaves
//! the board and cursor exactly as the previous command left them, and the run
//! halts there.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::board::{Color, Coord, CrossBoard, MirrorAxis};
use crate::lang::{zigzag_is_valid, Command, Direction, Pattern, Program};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ExecErrorKind {
    OutOfBoard,
    NoPosition,
    PatternOverflow,
    InvalidPattern,
    LengthMismatch,
    NoColor,
}

impl ExecErrorKind {
    pub fn suggestion(self) -> &'static str {
        match self {
            ExecErrorKind::OutOfBoard => "keep every move and coordinate on the dots of the cross",
            ExecErrorKind::NoPosition => "start with goCell to choose a dot first",
            ExecErrorKind::PatternOverflow => "use fewer repetitions or a direction that stays on the cross",
            ExecErrorKind::InvalidPattern => "square and L patterns colour exactly 4 dots; zigzag needs two different, non-opposite directions",
            ExecErrorKind::LengthMismatch => "give as many destination dots as origin dots",
            ExecErrorKind::NoColor => "select a colour first",
        }
    }
}

impl fmt::Display for ExecErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ExecErrorKind::OutOfBoard => "OUT_OF_BOARD",
            ExecErrorKind::NoPosition => "NO_POSITION",
            ExecErrorKind::PatternOverflow => "PATTERN_OVERFLOW",
            ExecErrorKind::InvalidPattern => "INVALID_PATTERN",
            ExecErrorKind::LengthMismatch => "LENGTH_MISMATCH",
            ExecErrorKind::NoColor => "NO_COLOR",
        };
        f.write_str(s)
    }
}

/// A failed command: which one, what went wrong and how to fix it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecError {
    pub kind: ExecErrorKind,
    pub index: usize,
    pub command: String,
    pub message: String,
    pub suggestion: String,
}

impl fmt::Display for ExecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} in command {} `{}`: {} (hint: {})",
            self.kind,
            self.index + 1,
            self.command,
            self.message,
            self.suggestion
        )
    }
}

impl std::error::Error for ExecError {}

/// Failure of a single operation, before it is tied to a program index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fault {
    pub kind: ExecErrorKind,
    pub message: String,
}

impl Fault {
    fn new(kind: ExecErrorKind, message: impl Into<String>) -> Fault {
        Fault { kind, message: message.into() }
    }

    fn at(self, index: usize, command: &Command) -> ExecError {
        ExecError {
            kind: self.kind,
            index,
            command: command.to_string(),
            message: self.message,
            suggestion: self.kind.suggestion().to_string(),
        }
    }
}

fn no_position() -> Fault {
    Fault::new(ExecErrorKind::NoPosition, "there is no current dot yet")
}

fn off_board(coord: Coord) -> Fault {
    Fault::new(ExecErrorKind::OutOfBoard, format!("{coord} is not a dot of the cross"))
}

fn ensure_on_board(cells: &[Coord]) -> Result<(), Fault> {
    match cells.iter().find(|c| !c.is_valid()) {
        Some(&bad) => Err(off_board(bad)),
        None => Ok(()),
    }
}

fn describe_step(from: Coord, direction: Direction) -> String {
    let (dr, dc) = direction.delta();
    match from.offset(dr, dc) {
        Some(to) => format!("{to}"),
        None => format!("beyond {from} going {}", direction.name()),
    }
}

/// The ordered cells a pattern visits from `start`, including `start`.
pub fn pattern_cells(start: Coord, pattern: &Pattern, repetitions: u32) -> Result<Vec<Coord>, Fault> {
    if let Some(expected) = pattern.fixed_len() {
        if repetitions != expected {
            return Err(Fault::new(
                ExecErrorKind::InvalidPattern,
                format!("{pattern} colours exactly {expected} dots, not {repetitions}"),
            ));
        }
    }
    if let Pattern::Zigzag { first, second } = *pattern {
        if !zigzag_is_valid(first, second) {
            return Err(Fault::new(ExecErrorKind::InvalidPattern, format!("{pattern} does not zigzag")));
        }
    }
    if repetitions == 0 {
        return Err(Fault::new(ExecErrorKind::InvalidPattern, "a pattern colours at least one dot"));
    }
    let steps = repetitions as usize - 1;
    let moves: Vec<Direction> = match *pattern {
        Pattern::Line(d) => vec![d; steps],
        Pattern::Square { first, second } => vec![first, second, first.opposite()],
        Pattern::L { first, second } => vec![first, first, second],
        Pattern::Zigzag { first, second } => (0..steps).map(|i| if i % 2 == 0 { first } else { second }).collect(),
    };
    if !start.is_valid() {
        return Err(off_board(start));
    }
    let mut cells = Vec::with_capacity(moves.len() + 1);
    cells.push(start);
    let mut at = start;
    for d in moves {
        let (dr, dc) = d.delta();
        match at.offset(dr, dc).filter(|c| c.is_valid()) {
            Some(next) => {
                cells.push(next);
                at = next;
            }
            None => {
                return Err(Fault::new(
                    ExecErrorKind::PatternOverflow,
                    format!("{pattern} from {start} leaves the cross at {}", describe_step(at, d)),
                ))
            }
        }
    }
    Ok(cells)
}

/// Structural reflection of a command: coordinates through the mirror map,
/// directions and pattern names through the reflection table.
pub fn mirror_command(command: &Command, axis: MirrorAxis) -> Command {
    let cells = |v: &[Coord]| v.iter().map(|c| c.mirror(axis)).collect::<Vec<_>>();
    let nested = |v: &[Command]| v.iter().map(|c| mirror_command(c, axis)).collect::<Vec<_>>();
    match command {
        Command::GoCell(c) => Command::GoCell(c.mirror(axis)),
        Command::Go { direction, repetitions } => {
            Command::Go { direction: direction.reflect(axis), repetitions: *repetitions }
        }
        Command::PaintSingleCell(_) | Command::FillEmpty(_) | Command::MirrorBoard(_) => command.clone(),
        Command::PaintPattern { colors, repetitions, pattern } => Command::PaintPattern {
            colors: colors.clone(),
            repetitions: *repetitions,
            pattern: pattern.reflect(axis),
        },
        Command::PaintMultipleCells { colors, cells: c } => {
            Command::PaintMultipleCells { colors: colors.clone(), cells: cells(c) }
        }
        Command::RepeatCommands { commands, positions } => {
            Command::RepeatCommands { commands: nested(commands), positions: cells(positions) }
        }
        Command::CopyCells { origin, destination } => {
            Command::CopyCells { origin: cells(origin), destination: cells(destination) }
        }
        Command::MirrorCells { cells: c, axis: a } => Command::MirrorCells { cells: cells(c), axis: *a },
        Command::MirrorCommands { commands, axis: a } => Command::MirrorCommands { commands: nested(commands), axis: *a },
    }
}

/// Board plus cursor: the part of the execution state commands act on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Machine {
    pub board: CrossBoard,
    pub cursor: Option<Coord>,
}

fn paint_sequence(board: &mut CrossBoard, colors: &[Color], cells: &[Coord]) {
    for (k, &cell) in cells.iter().enumerate() {
        board.set(cell, colors[k % colors.len()]);
    }
}

impl Machine {
    pub fn new(board: CrossBoard) -> Machine {
        Machine { board, cursor: None }
    }

    fn cursor(&self) -> Result<Coord, Fault> {
        self.cursor.ok_or_else(no_position)
    }

    pub fn go_cell(&mut self, cell: Coord) -> Result<(), Fault> {
        ensure_on_board(&[cell])?;
        self.cursor = Some(cell);
        Ok(())
    }

    pub fn go(&mut self, direction: Direction, repetitions: u32) -> Result<(), Fault> {
        let mut at = self.cursor()?;
        let (dr, dc) = direction.delta();
        for _ in 0..repetitions {
            at = at.offset(dr, dc).filter(|c| c.is_valid()).ok_or_else(|| {
                Fault::new(ExecErrorKind::OutOfBoard, format!("moving {} reaches {}", direction.name(), describe_step(at, direction)))
            })?;
        }
        self.cursor = Some(at);
        Ok(())
    }

    pub fn paint_single(&mut self, color: Option<Color>) -> Result<(), Fault> {
        let at = self.cursor()?;
        let color = color.ok_or_else(|| Fault::new(ExecErrorKind::NoColor, "no colour selected"))?;
        self.board.set(at, color);
        Ok(())
    }

    pub fn paint_pattern(&mut self, colors: &[Color], repetitions: u32, pattern: &Pattern) -> Result<(), Fault> {
        let start = self.cursor()?;
        let cells = pattern_cells(start, pattern, repetitions)?;
        if colors.is_empty() {
            return Err(Fault::new(ExecErrorKind::NoColor, "the colour list is empty"));
        }
        paint_sequence(&mut self.board, colors, &cells);
        self.cursor = cells.last().copied();
        Ok(())
    }

    pub fn paint_multiple(&mut self, colors: &[Color], cells: &[Coord]) -> Result<(), Fault> {
        ensure_on_board(cells)?;
        if colors.is_empty() {
            return Err(Fault::new(ExecErrorKind::NoColor, "the colour list is empty"));
        }
        paint_sequence(&mut self.board, colors, cells);
        if let Some(&last) = cells.last() {
            self.cursor = Some(last);
        }
        Ok(())
    }

    pub fn fill_empty(&mut self, color: Option<Color>) -> Result<(), Fault> {
        let color = color.ok_or_else(|| Fault::new(ExecErrorKind::NoColor, "fillEmpty was used without a colour"))?;
        for cell in Coord::all_valid() {
            if self.board.get(cell).is_none() {
                self.board.set(cell, color);
            }
        }
        Ok(())
    }

    pub fn repeat(&mut self, commands: &[Command], positions: &[Coord]) -> Result<(), Fault> {
        ensure_on_board(positions)?;
        for &position in positions {
            self.cursor = Some(position);
            for cmd in commands {
                self.execute(cmd).map_err(|f| Fault {
                    kind: f.kind,
                    message: format!("at {position}, `{cmd}`: {}", f.message),
                })?;
            }
        }
        Ok(())
    }

    pub fn copy(&mut self, origin: &[Coord], destination: &[Coord]) -> Result<(), Fault> {
        if origin.len() != destination.len() {
            return Err(Fault::new(
                ExecErrorKind::LengthMismatch,
                format!("{} origin dots but {} destination dots", origin.len(), destination.len()),
            ));
        }
        ensure_on_board(origin)?;
        ensure_on_board(destination)?;
        let snapshot = self.board;
        for (&from, &to) in origin.iter().zip(destination) {
            if let Some(color) = snapshot.get(from) {
                self.board.set(to, color);
            }
        }
        Ok(())
    }

    fn mirror_sources(&mut self, sources: impl Iterator<Item = Coord>, axis: MirrorAxis) {
        let snapshot = self.board;
        for source in sources {
            if let Some(color) = snapshot.get(source) {
                let target = source.mirror(axis);
                if self.board.get(target).is_none() {
                    self.board.set(target, color);
                }
            }
        }
    }

    pub fn mirror_board(&mut self, axis: MirrorAxis) -> Result<(), Fault> {
        self.mirror_sources(Coord::all_valid(), axis);
        Ok(())
    }

    pub fn mirror_cells(&mut self, cells: &[Coord], axis: MirrorAxis) -> Result<(), Fault> {
        ensure_on_board(cells)?;
        self.mirror_sources(cells.iter().copied(), axis);
        Ok(())
    }

    pub fn mirror_commands(&mut self, commands: &[Command], axis: MirrorAxis) -> Result<(), Fault> {
        for cmd in commands {
            let mirrored = mirror_command(cmd, axis);
            self.execute(&mirrored).map_err(|f| Fault {
                kind: f.kind,
                message: format!("mirrored `{mirrored}`: {}", f.message),
            })?;
        }
        Ok(())
    }

    /// Runs one command. On failure the machine may be partially updated;
    /// [`ExecState::execute`] is the transactional entry point.
    pub fn execute(&mut self, command: &Command) -> Result<(), Fault> {
        match command {
            Command::GoCell(c) => self.go_cell(*c),
            Command::Go { direction, repetitions } => self.go(*direction, *repetitions),
            Command::PaintSingleCell(c) => self.paint_single(Some(*c)),
            Command::PaintPattern { colors, repetitions, pattern } => self.paint_pattern(colors, *repetitions, pattern),
            Command::PaintMultipleCells { colors, cells } => self.paint_multiple(colors, cells),
            Command::FillEmpty(c) => self.fill_empty(Some(*c)),
            Command::RepeatCommands { commands, positions } => self.repeat(commands, positions),
            Command::CopyCells { origin, destination } => self.copy(origin, destination),
            Command::MirrorBoard(axis) => self.mirror_board(*axis),
            Command::MirrorCells { cells, axis } => self.mirror_cells(cells, *axis),
            Command::MirrorCommands { commands, axis } => self.mirror_commands(commands, *axis),
        }
    }
}

/// One executed (or failed) command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub index: usize,
    pub command: String,
    pub changed: Vec<Coord>,
    pub error: Option<ExecError>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExecState {
    machine: Machine,
    executed: usize,
    trace: Vec<TraceEntry>,
}

impl ExecState {
    pub fn new(board: CrossBoard) -> ExecState {
        ExecState { machine: Machine::new(board), executed: 0, trace: Vec::new() }
    }

    pub fn with_cursor(mut self, cursor: Option<Coord>) -> ExecState {
        self.machine.cursor = cursor.filter(|c| c.is_valid());
        self
    }

    pub fn board(&self) -> &CrossBoard {
        &self.machine.board
    }

    pub fn cursor(&self) -> Option<Coord> {
        self.machine.cursor
    }

    pub fn executed(&self) -> usize {
        self.executed
    }

    pub fn trace(&self) -> &[TraceEntry] {
        &self.trace
    }

    /// Executes the next command atomically and records it in the trace.
    pub fn execute(&mut self, command: &Command) -> Result<&TraceEntry, ExecError> {
        let index = self.trace.len();
        let mut next = self.machine;
        match next.execute(command) {
            Ok(()) => {
                let changed = self.machine.board.diff(&next.board);
                self.machine = next;
                self.executed += 1;
                self.trace.push(TraceEntry { index, command: command.to_string(), changed, error: None });
                Ok(self.trace.last().expect("just pushed"))
            }
            Err(fault) => {
                let err = fault.at(index, command);
                self.trace.push(TraceEntry {
                    index,
                    command: command.to_string(),
                    changed: Vec::new(),
                    error: Some(err.clone()),
                });
                Err(err)
            }
        }
    }

    /// `fillEmpty` as issued from the gesture palette, where the colour may
    /// not have been chosen yet.
    pub fn fill_empty(&mut self, color: Option<Color>) -> Result<&TraceEntry, ExecError> {
        match color {
            Some(c) => self.execute(&Command::FillEmpty(c)),
            None => {
                let index = self.trace.len();
                let err = ExecError {
                    kind: ExecErrorKind::NoColor,
                    index,
                    command: "fillEmpty".into(),
                    message: "fillEmpty was used without a colour".into(),
                    suggestion: ExecErrorKind::NoColor.suggestion().into(),
                };
                self.trace.push(TraceEntry { index, command: "fillEmpty".into(), changed: vec![], error: Some(err.clone()) });
                Err(err)
            }
        }
    }

    /// Newline-delimited JSON records of the trace.
    pub fn trace_jsonl(&self) -> String {
        let mut out = String::new();
        for entry in &self.trace {
            out.push_str(&serde_json::to_string(entry).expect("trace entries serialise"));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Cursor before the first command; unset by default.
    pub cursor: Option<Coord>,
}

/// Runs a program, calling `observe` after every command in order. Halts at
/// the first error.
pub fn run_program_observed(
    program: &Program,
    board: CrossBoard,
    options: &RunOptions,
    mut observe: impl FnMut(&TraceEntry, &ExecState),
) -> (ExecState, Result<(), ExecError>) {
    let mut state = ExecState::new(board).with_cursor(options.cursor);
    for command in &program.commands {
        let result = state.execute(command).map(|_| ()).map_err(|e| e.clone());
        let entry = state.trace.last().expect("execute records every command").clone();
        observe(&entry, &state);
        if let Err(err) = result {
            return (state, Err(err));
        }
    }
    (state, Ok(()))
}

pub fn run_program(program: &Program, board: CrossBoard, options: &RunOptions) -> (ExecState, Result<(), ExecError>) {
    run_program_observed(program, board, options, |_, _| {})
}
