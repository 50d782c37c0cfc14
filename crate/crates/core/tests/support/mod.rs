//! Shared generators, oracles and fixtures for the integration suites.
#![allow(dead_code)]

use std::collections::BTreeMap;

use cat_core::board::{Color, Coord, MirrorAxis};
use cat_core::lang::{Command, Direction, Pattern, Program};
use proptest::prelude::*;

pub const ROWS: &str = "ABCDEF";

/// Membership written out from the board picture.
pub fn oracle_on_cross(row: char, col: i32) -> bool {
    ROWS.contains(row) && (1..=6).contains(&col) && (row == 'C' || row == 'D' || col == 3 || col == 4)
}

pub fn oracle_cells() -> Vec<String> {
    let mut v = Vec::new();
    for r in ROWS.chars() {
        for c in 1..=6 {
            if oracle_on_cross(r, c) {
                v.push(format!("{r}{c}"));
            }
        }
    }
    v
}

fn step(dir: &str) -> (i32, i32) {
    match dir {
        "up" => (1, 0),
        "down" => (-1, 0),
        "left" => (0, -1),
        "right" => (0, 1),
        "up_left" => (1, -1),
        "up_right" => (1, 1),
        "down_left" => (-1, -1),
        "down_right" => (-1, 1),
        _ => panic!("not a direction: {dir}"),
    }
}

pub const DIRS: [&str; 8] = ["up", "down", "left", "right", "up_left", "up_right", "down_left", "down_right"];
pub const CARDINALS: [&str; 4] = ["up", "down", "left", "right"];

pub fn opposite(d: &str) -> &'static str {
    let (a, b) = step(d);
    DIRS.into_iter().find(|x| step(x) == (-a, -b)).unwrap()
}

fn perpendicular(a: &str, b: &str) -> bool {
    let (p, q) = step(a);
    let (r, s) = step(b);
    p * r + q * s == 0
}

/// A legal pattern name with the directions it was built from.
#[derive(Debug, Clone)]
pub struct LegalPattern {
    pub kind: &'static str,
    pub name: String,
    pub dirs: Vec<&'static str>,
}

/// Every pattern the oracle considers legal.
pub fn legal_patterns() -> Vec<LegalPattern> {
    let mut out = Vec::new();
    let mut push = |kind, name: String, dirs: Vec<&'static str>| out.push(LegalPattern { kind, name, dirs });
    for d in CARDINALS {
        push("cardinal", d.to_string(), vec![d]);
    }
    for d in &DIRS[4..] {
        push("diagonal", d.to_string(), vec![*d]);
    }
    for a in CARDINALS {
        for b in CARDINALS {
            if perpendicular(a, b) {
                push("square", format!("square_{a}_{b}_{}", opposite(a)), vec![a, b, opposite(a)]);
                push("l", format!("l_{a}_{b}"), vec![a, b]);
            }
        }
    }
    for a in DIRS {
        for b in DIRS {
            if a != b && b != opposite(a) {
                push("zigzag", format!("zigzag_{a}_{b}"), vec![a, b]);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleResult {
    Cells(Vec<String>),
    Overflow,
    Invalid,
}

/// Brute-force walk of a pattern.
pub fn oracle_pattern(p: &LegalPattern, start: &str, reps: u32) -> OracleResult {
    let d = &p.dirs;
    let moves: Vec<&str> = match p.kind {
        "cardinal" | "diagonal" => vec![d[0]; reps as usize - 1],
        "square" | "l" if reps != 4 => return OracleResult::Invalid,
        "square" => d.clone(),
        "l" => vec![d[0], d[0], d[1]],
        "zigzag" => (0..reps as usize - 1).map(|i| d[i % 2]).collect(),
        _ => unreachable!(),
    };
    let mut row = start.chars().next().unwrap();
    let mut col: i32 = start[1..].parse().unwrap();
    let mut cells = vec![start.to_string()];
    for m in moves {
        let (dr, dc) = step(m);
        let ri = ROWS.find(row).unwrap() as i32 + dr;
        col += dc;
        if !(0..6).contains(&ri) {
            return OracleResult::Overflow;
        }
        row = ROWS.chars().nth(ri as usize).unwrap();
        if !oracle_on_cross(row, col) {
            return OracleResult::Overflow;
        }
        cells.push(format!("{row}{col}"));
    }
    OracleResult::Cells(cells)
}

/// Reflection table written out cell by cell.
pub fn oracle_mirror_table(axis: &str) -> BTreeMap<String, String> {
    let pairs: &[(&str, &str)] = if axis == "horizontal" {
        &[
            ("A3", "F3"), ("A4", "F4"), ("B3", "E3"), ("B4", "E4"),
            ("C1", "D1"), ("C2", "D2"), ("C3", "D3"), ("C4", "D4"), ("C5", "D5"), ("C6", "D6"),
        ]
    } else {
        &[
            ("A3", "A4"), ("B3", "B4"), ("E3", "E4"), ("F3", "F4"),
            ("C1", "C6"), ("C2", "C5"), ("C3", "C4"), ("D1", "D6"), ("D2", "D5"), ("D3", "D4"),
        ]
    };
    let mut m = BTreeMap::new();
    for (a, b) in pairs {
        m.insert(a.to_string(), b.to_string());
        m.insert(b.to_string(), a.to_string());
    }
    m
}

pub fn arb_grid_coord() -> impl Strategy<Value = Coord> {
    (0u8..6, 1u8..=6).prop_map(|(r, c)| Coord::from_indices(r, c).unwrap())
}

pub fn arb_cross_coord() -> impl Strategy<Value = Coord> {
    prop::sample::select(Coord::all_valid().collect::<Vec<_>>())
}

pub fn arb_color() -> impl Strategy<Value = Color> {
    prop::sample::select(Color::ALL.to_vec())
}

pub fn arb_axis() -> impl Strategy<Value = MirrorAxis> {
    prop_oneof![Just(MirrorAxis::Horizontal), Just(MirrorAxis::Vertical)]
}

pub fn arb_direction() -> impl Strategy<Value = Direction> {
    prop::sample::select(Direction::ALL.to_vec())
}

pub fn arb_pattern() -> impl Strategy<Value = Pattern> {
    prop::sample::select(Pattern::all())
}

fn colors() -> impl Strategy<Value = Vec<Color>> {
    prop::collection::vec(arb_color(), 0..4)
}

fn coords() -> impl Strategy<Value = Vec<Coord>> {
    prop::collection::vec(arb_grid_coord(), 0..5)
}

/// Commands that are not composite.
pub fn arb_simple_command() -> impl Strategy<Value = Command> {
    prop_oneof![
        arb_grid_coord().prop_map(Command::GoCell),
        (arb_direction(), 1u32..10).prop_map(|(direction, repetitions)| Command::Go { direction, repetitions }),
        arb_color().prop_map(Command::PaintSingleCell),
        (colors(), 1u32..10, arb_pattern())
            .prop_map(|(colors, repetitions, pattern)| Command::PaintPattern { colors, repetitions, pattern }),
        (colors(), coords()).prop_map(|(colors, cells)| Command::PaintMultipleCells { colors, cells }),
        arb_color().prop_map(Command::FillEmpty),
        (coords(), coords()).prop_map(|(origin, destination)| Command::CopyCells { origin, destination }),
        arb_axis().prop_map(Command::MirrorBoard),
        (coords(), arb_axis()).prop_map(|(cells, axis)| Command::MirrorCells { cells, axis }),
    ]
}

pub fn arb_command() -> impl Strategy<Value = Command> {
    let inner = || prop::collection::vec(arb_simple_command(), 0..4);
    prop_oneof![
        6 => arb_simple_command(),
        1 => (inner(), coords()).prop_map(|(commands, positions)| Command::RepeatCommands { commands, positions }),
        1 => (inner(), arb_axis()).prop_map(|(commands, axis)| Command::MirrorCommands { commands, axis }),
    ]
}

pub fn arb_program() -> impl Strategy<Value = Program> {
    prop::collection::vec(arb_command(), 0..8).prop_map(Program::new)
}

/// Lexically plausible noise for the parser.
pub fn arb_token_soup() -> impl Strategy<Value = String> {
    let vocab = prop::sample::select(vec![
        "goCell", "go", "paintPattern", "repeatCommands", "mirrorCommands", "fillEmpty", "copyCells", "(", ")", "{",
        "}", ",", ";", "\n", "#x", "C3", "Z9", "red", "up_left", "square_right_up_left", "zigzag_up_up", "l_up",
        "0", "-3", "99999999999999999999", "horizontal", " ", "é", "\u{0}",
    ]);
    prop::collection::vec(vocab, 0..40).prop_map(|v| v.concat())
}

pub mod fixtures {
    use cat_core::board::CrossBoard;
    use cat_core::catalog::Module;
    use cat_core::scorer::{AlgorithmDimension, InteractionDimension, TaskOutcome};
    use cat_core::telemetry::{Dataset, SessionLine, StudentLine, TaskRecord};
    use chrono::NaiveDate;

    pub struct Task {
        pub student: &'static str,
        pub index: usize,
        pub attempted: bool,
        pub solved: bool,
        pub surrendered: bool,
        pub minutes: f64,
        pub dimension: Option<AlgorithmDimension>,
        pub interaction: Option<&'static str>,
    }

    impl Task {
        pub fn solved(student: &'static str, index: usize, minutes: f64, dim: AlgorithmDimension, interaction: &'static str) -> Task {
            Task {
                student,
                index,
                attempted: true,
                solved: true,
                surrendered: false,
                minutes,
                dimension: Some(dim),
                interaction: Some(interaction),
            }
        }

        pub fn failed(student: &'static str, index: usize) -> Task {
            Task {
                student,
                index,
                attempted: true,
                solved: false,
                surrendered: false,
                minutes: 1.0,
                dimension: None,
                interaction: None,
            }
        }
    }

    pub fn session_date() -> NaiveDate {
        NaiveDate::from_ymd_opt(2023, 3, 15).unwrap()
    }

    /// Students given by (id, age); `None` leaves the age unknown.
    pub fn dataset(students: &[(&'static str, Option<u32>)], tasks: &[Task]) -> Dataset {
        Dataset {
            session: SessionLine {
                format: "catlog/1".into(),
                session_id: "fixture".into(),
                date: session_date(),
                canton: "K-0".into(),
                school: "S-0".into(),
                grade_level: "G-0".into(),
                pseudonymised: true,
            },
            students: students
                .iter()
                .map(|(id, age)| StudentLine { student_id: id.to_string(), gender: "x".into(), birth_date: None, age: *age })
                .collect(),
            tasks: tasks
                .iter()
                .map(|t| TaskRecord {
                    student_id: t.student.into(),
                    module: Module::Validation,
                    index: t.index,
                    outcome: TaskOutcome {
                        schema_id: format!("V{:02}", t.index),
                        attempted: t.attempted,
                        solved: t.solved,
                        surrendered: t.surrendered,
                        duration: t.minutes * 60.0,
                        dimension: t.dimension,
                        interaction: t.interaction.map(|c| InteractionDimension::from_category(c).unwrap()),
                        score: None,
                    },
                    truncated: false,
                    board: CrossBoard::empty(),
                    program: String::new(),
                })
                .collect(),
            events: Vec::new(),
        }
    }
}

pub mod sessions {
    use cat_core::catalog::{self, Module};
    use cat_core::scorer::{check_success, Artefact};
    use cat_core::telemetry::{EventKind, EventLog, SessionInfo, StudentInfo, StudentState};
    use chrono::NaiveDate;
    use proptest::prelude::*;

    /// A student action as a client would send it.
    #[derive(Debug, Clone)]
    pub enum Action {
        Event(EventKind),
        Complete,
    }

    pub fn arb_action() -> impl Strategy<Value = Action> {
        let commands = prop::sample::select(vec![
            "fillEmpty(yellow)",
            "fillEmpty(red)",
            "goCell(C1)",
            "paintPattern({red},6,right)",
            "paintPattern({blue},3,up)",
            "paintSingleCell(green)",
            "mirrorBoard(vertical)",
            "goCell(A3)",
            "go(up,9)",
        ]);
        prop_oneof![
            4 => commands.prop_map(|c| Action::Event(EventKind::AddCommand { command: c.into() })),
            3 => Just(Action::Event(EventKind::ConfirmCommand)),
            1 => (0usize..3).prop_map(|p| Action::Event(EventKind::RemoveCommand { position: p })),
            1 => (0usize..3, 0usize..3).prop_map(|(from, to)| Action::Event(EventKind::ReorderCommands { from, to })),
            1 => any::<bool>().prop_map(|e| Action::Event(EventKind::FeedbackToggle { enabled: e })),
            1 => prop_oneof![Just(Artefact::G), Just(Artefact::P)]
                .prop_map(|i| Action::Event(EventKind::InterfaceSwitch { interface: i })),
            1 => Just(Action::Event(EventKind::Retry)),
            1 => Just(Action::Event(EventKind::Surrender)),
            2 => (1usize..=12).prop_map(|t| Action::Event(EventKind::Navigate { module: Module::Validation, target: t })),
            2 => Just(Action::Complete),
            1 => Just(Action::Event(EventKind::TaskAbandoned)),
        ]
    }

    pub fn session(school: &str, canton: &str) -> SessionInfo {
        SessionInfo {
            session_id: "prop".into(),
            date: NaiveDate::from_ymd_opt(2023, 3, 15).unwrap(),
            canton: canton.into(),
            school: school.into(),
            grade_level: "grade-level-text".into(),
        }
    }

    /// Drives students through the engine the way the service does: each
    /// action is applied to a copy of the student state and logged only if
    /// it is accepted. Returns the log and the live states.
    pub fn simulate(info: SessionInfo, students: &[&str], actions: &[(usize, Action, i64)]) -> (EventLog, Vec<StudentState>) {
        let mut log = EventLog::new(info);
        let mut states = Vec::new();
        for (i, id) in students.iter().enumerate() {
            log.add_student(StudentInfo {
                student_id: id.to_string(),
                gender: "f".into(),
                birth_date: NaiveDate::from_ymd_opt(2010 + i as i32, 2, 3).unwrap(),
            })
            .unwrap();
            states.push(StudentState::new(*id));
        }
        let mut clock = 0i64;
        for (who, action, dt) in actions {
            clock += dt;
            let state = &mut states[who % students.len()];
            let kind = match action {
                Action::Event(k) => k.clone(),
                Action::Complete => {
                    let Some(task) = state.current_task() else { continue };
                    let schema = &catalog::find(&task.schema_id).unwrap().schema;
                    EventKind::TaskCompleted { success: check_success(task.board(), schema) }
                }
            };
            let ts = log.stamp(&state.student_id, clock).unwrap();
            let mut next = state.clone();
            if next.apply(&kind, ts).is_ok() {
                let schema = state.schema_for(&kind);
                log.record_event(&state.student_id, schema, kind, ts).unwrap();
                *state = next;
            }
        }
        (log, states)
    }
}
