//! The colouring language: AST, parser, canonical printer and static checks.

mod ast;
mod format;
mod parser;
mod validate;

pub use ast::{Command, Direction, Pattern, PatternKind, Program};
pub use format::format_program;
pub use parser::{parse_command, parse_program, ParseError, ParseErrorKind};
pub use validate::{validate_static, Diagnostic, DiagnosticKind};

pub(crate) use validate::zigzag_is_valid;
