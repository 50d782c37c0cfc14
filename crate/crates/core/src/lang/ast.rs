use crate::board::{Color, Coord, MirrorAxis};

/// One of the eight movement directions on the cross.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Up,
    Down,
    Left,
    Right,
    UpLeft,
    UpRight,
    DownLeft,
    DownRight,
}

impl Direction {
    pub const ALL: [Direction; 8] = [
        Direction::Up,
        Direction::Down,
        Direction::Left,
        Direction::Right,
        Direction::UpLeft,
        Direction::UpRight,
        Direction::DownLeft,
        Direction::DownRight,
    ];

    pub const CARDINAL: [Direction; 4] = [Direction::Up, Direction::Down, Direction::Left, Direction::Right];

    pub fn name(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
            Direction::Left => "left",
            Direction::Right => "right",
            Direction::UpLeft => "up_left",
            Direction::UpRight => "up_right",
            Direction::DownLeft => "down_left",
            Direction::DownRight => "down_right",
        }
    }

    pub fn from_name(name: &str) -> Option<Direction> {
        Direction::ALL.into_iter().find(|d| d.name() == name)
    }

    pub fn is_cardinal(self) -> bool {
        Direction::CARDINAL.contains(&self)
    }

    /// `(rows, cols)` step; up increases the row letter, right the column.
    pub fn delta(self) -> (i8, i8) {
        match self {
            Direction::Up => (1, 0),
            Direction::Down => (-1, 0),
            Direction::Left => (0, -1),
            Direction::Right => (0, 1),
            Direction::UpLeft => (1, -1),
            Direction::UpRight => (1, 1),
            Direction::DownLeft => (-1, -1),
            Direction::DownRight => (-1, 1),
        }
    }

    pub fn opposite(self) -> Direction {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
            Direction::Left => Direction::Right,
            Direction::Right => Direction::Left,
            Direction::UpLeft => Direction::DownRight,
            Direction::UpRight => Direction::DownLeft,
            Direction::DownLeft => Direction::UpRight,
            Direction::DownRight => Direction::UpLeft,
        }
    }

    pub fn is_perpendicular(self, other: Direction) -> bool {
        let (a, b) = (self.delta(), other.delta());
        a.0 * b.0 + a.1 * b.1 == 0
    }

    /// Reflection of the direction across a board axis.
    pub fn reflect(self, axis: MirrorAxis) -> Direction {
        let (dr, dc) = self.delta();
        let flipped = match axis {
            MirrorAxis::Horizontal => (-dr, dc),
            MirrorAxis::Vertical => (dr, -dc),
        };
        Direction::ALL
            .into_iter()
            .find(|d| d.delta() == flipped)
            .expect("reflection of a unit step is a unit step")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PatternKind {
    Cardinal,
    Diagonal,
    Square,
    L,
    Zigzag,
}

/// Cell-sequence shape for `paintPattern`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pattern {
    /// Straight run; cardinal or diagonal depending on the direction.
    Line(Direction),
    /// Four cells: start, then `first`, `second` and `first.opposite()`.
    /// Both moves are cardinal and perpendicular.
    Square { first: Direction, second: Direction },
    /// Four cells: start, two steps along `first`, one along `second`.
    L { first: Direction, second: Direction },
    /// Start, then alternating single steps along `first` and `second`.
    Zigzag { first: Direction, second: Direction },
}

impl Pattern {
    pub fn kind(&self) -> PatternKind {
        match self {
            Pattern::Line(d) if d.is_cardinal() => PatternKind::Cardinal,
            Pattern::Line(_) => PatternKind::Diagonal,
            Pattern::Square { .. } => PatternKind::Square,
            Pattern::L { .. } => PatternKind::L,
            Pattern::Zigzag { .. } => PatternKind::Zigzag,
        }
    }

    /// Number of cells for fixed-size shapes.
    pub fn fixed_len(&self) -> Option<u32> {
        match self {
            Pattern::Square { .. } | Pattern::L { .. } => Some(4),
            _ => None,
        }
    }

    pub fn square(first: Direction, second: Direction) -> Option<Pattern> {
        (first.is_cardinal() && second.is_cardinal() && first.is_perpendicular(second))
            .then_some(Pattern::Square { first, second })
    }

    pub fn l(first: Direction, second: Direction) -> Option<Pattern> {
        (first.is_cardinal() && second.is_cardinal() && first.is_perpendicular(second))
            .then_some(Pattern::L { first, second })
    }

    /// Every directional component, in name order.
    pub fn directions(&self) -> Vec<Direction> {
        match *self {
            Pattern::Line(d) => vec![d],
            Pattern::Square { first, second } => vec![first, second, first.opposite()],
            Pattern::L { first, second } | Pattern::Zigzag { first, second } => vec![first, second],
        }
    }

    pub fn reflect(&self, axis: MirrorAxis) -> Pattern {
        match *self {
            Pattern::Line(d) => Pattern::Line(d.reflect(axis)),
            Pattern::Square { first, second } => {
                Pattern::Square { first: first.reflect(axis), second: second.reflect(axis) }
            }
            Pattern::L { first, second } => Pattern::L { first: first.reflect(axis), second: second.reflect(axis) },
            Pattern::Zigzag { first, second } => {
                Pattern::Zigzag { first: first.reflect(axis), second: second.reflect(axis) }
            }
        }
    }

    /// Every pattern name the language accepts (zigzags include the ones
    /// static validation rejects).
    pub fn all() -> Vec<Pattern> {
        let mut out: Vec<Pattern> = Direction::ALL.into_iter().map(Pattern::Line).collect();
        for first in Direction::CARDINAL {
            for second in Direction::CARDINAL {
                if let Some(p) = Pattern::square(first, second) {
                    out.push(p);
                }
                if let Some(p) = Pattern::l(first, second) {
                    out.push(p);
                }
            }
        }
        for first in Direction::ALL {
            for second in Direction::ALL {
                out.push(Pattern::Zigzag { first, second });
            }
        }
        out
    }
}

/// A statement of the colouring language.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Command {
    GoCell(Coord),
    Go { direction: Direction, repetitions: u32 },
    PaintSingleCell(Color),
    PaintPattern { colors: Vec<Color>, repetitions: u32, pattern: Pattern },
    PaintMultipleCells { colors: Vec<Color>, cells: Vec<Coord> },
    FillEmpty(Color),
    RepeatCommands { commands: Vec<Command>, positions: Vec<Coord> },
    CopyCells { origin: Vec<Coord>, destination: Vec<Coord> },
    MirrorBoard(MirrorAxis),
    MirrorCells { cells: Vec<Coord>, axis: MirrorAxis },
    MirrorCommands { commands: Vec<Command>, axis: MirrorAxis },
}

impl Command {
    /// Surface name as written in programs.
    pub fn name(&self) -> &'static str {
        match self {
            Command::GoCell(_) => "goCell",
            Command::Go { .. } => "go",
            Command::PaintSingleCell(_) => "paintSingleCell",
            Command::PaintPattern { .. } => "paintPattern",
            Command::PaintMultipleCells { .. } => "paintMultipleCells",
            Command::FillEmpty(_) => "fillEmpty",
            Command::RepeatCommands { .. } => "repeatCommands",
            Command::CopyCells { .. } => "copyCells",
            Command::MirrorBoard(_) => "mirrorBoard",
            Command::MirrorCells { .. } => "mirrorCells",
            Command::MirrorCommands { .. } => "mirrorCommands",
        }
    }

    /// Parameter names in argument order.
    pub fn parameters(&self) -> &'static [&'static str] {
        parameters_of(self.name()).expect("every command has a signature")
    }

    pub fn is_composite(&self) -> bool {
        matches!(self, Command::RepeatCommands { .. } | Command::MirrorCommands { .. })
    }

    pub fn nested(&self) -> &[Command] {
        match self {
            Command::RepeatCommands { commands, .. } | Command::MirrorCommands { commands, .. } => commands,
            _ => &[],
        }
    }
}

pub(crate) const SIGNATURES: [(&str, &[&str]); 11] = [
    ("goCell", &["cell"]),
    ("go", &["move", "repetitions"]),
    ("paintSingleCell", &["color"]),
    ("paintPattern", &["colors", "repetitions", "pattern"]),
    ("paintMultipleCells", &["colors", "cellsPositions"]),
    ("fillEmpty", &["color"]),
    ("repeatCommands", &["commands", "positions"]),
    ("copyCells", &["origin", "destination"]),
    ("mirrorBoard", &["direction"]),
    ("mirrorCells", &["cells", "direction"]),
    ("mirrorCommands", &["commands", "direction"]),
];

pub(crate) fn parameters_of(name: &str) -> Option<&'static [&'static str]> {
    SIGNATURES.iter().find(|(n, _)| *n == name).map(|(_, p)| *p)
}

/// An ordered list of commands.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Program {
    pub commands: Vec<Command>,
}

impl Program {
    pub fn new(commands: Vec<Command>) -> Program {
        Program { commands }
    }

    pub fn len(&self) -> usize {
        self.commands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.commands.is_empty()
    }
}

impl From<Vec<Command>> for Program {
    fn from(commands: Vec<Command>) -> Self {
        Program { commands }
    }
}
