//! Engine for the Cross Array Task: a colouring language over a 20-dot cross,
//! its interpreter, algorithm scoring, session telemetry and dataset analysis.

pub mod analysis;
pub mod board;
pub mod catalog;
pub mod interp;
pub mod lang;
pub mod scorer;
pub mod telemetry;

pub use board::{is_valid_cell, mirror_coord, Color, Coord, CrossBoard, MirrorAxis, Schema, SchemaError};
pub use interp::{run_program, ExecError, ExecErrorKind, ExecState, RunOptions};
pub use lang::{format_program, parse_program, Command, Direction, Pattern, Program};
