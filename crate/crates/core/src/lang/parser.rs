//! Hand-written lexer and recursive-descent parser.
//!
//! Parsing runs in two stages: a generic call/set/atom tree is read first,
//! then each call is checked against its command signature.

use std::fmt;

use thiserror::Error;

use super::ast::{parameters_of, Command, Direction, Pattern, Program};
use crate::board::{Color, Coord, MirrorAxis};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken { expected: &'static str, found: String },
    UnknownCommand(String),
    UnknownDirection(String),
    UnknownColor(String),
    UnknownPattern(String),
    UnknownAxis(String),
    UnknownParameter { command: &'static str, parameter: String },
    Arity { command: String, expected: usize, found: usize },
    MalformedSet,
    NonPositiveRepetitions(String),
    InvalidNumber(String),
    InvalidCoordinate(String),
    NestedComposite(String),
    TrailingInput,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ParseErrorKind::*;
        match self {
            UnexpectedChar(c) => write!(f, "unexpected character {c:?}"),
            UnexpectedToken { expected, found } => write!(f, "expected {expected}, found {found}"),
            UnknownCommand(n) => write!(f, "unknown command `{n}`"),
            UnknownDirection(n) => write!(f, "unknown direction `{n}`"),
            UnknownColor(n) => write!(f, "unknown colour `{n}`"),
            UnknownPattern(n) => write!(f, "unknown pattern `{n}`"),
            UnknownAxis(n) => write!(f, "unknown mirror direction `{n}` (expected horizontal or vertical)"),
            UnknownParameter { command, parameter } => write!(f, "`{command}` has no parameter `{parameter}`"),
            Arity { command, expected, found } => {
                write!(f, "`{command}` takes {expected} argument(s), found {found}")
            }
            MalformedSet => write!(f, "malformed set literal"),
            NonPositiveRepetitions(n) => write!(f, "repetitions must be at least 1, found {n}"),
            InvalidNumber(n) => write!(f, "invalid number `{n}`"),
            InvalidCoordinate(n) => write!(f, "invalid coordinate `{n}`"),
            NestedComposite(n) => write!(f, "`{n}` cannot be nested inside another command list"),
            TrailingInput => write!(f, "expected a single command"),
        }
    }
}

/// A located parse failure. `offset` is a byte offset into the source;
/// `line` and `column` are 1-based (column counts characters).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
    pub line: usize,
    pub column: usize,
}

impl ParseError {
    pub(crate) fn unknown_parameter(command: &'static str, parameter: &str) -> ParseError {
        ParseError {
            kind: ParseErrorKind::UnknownParameter { command, parameter: parameter.to_string() },
            offset: 0,
            line: 1,
            column: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Separator,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Separator => "end of statement".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexed {
    toks: Vec<(Tok, usize)>,
}

fn lex(src: &str) -> Result<Lexed, (ParseErrorKind, usize)> {
    let mut toks = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(start, ch)) = chars.peek() {
        match ch {
            ' ' | '\t' | '\r' => {
                chars.next();
            }
            '\n' | ';' => {
                chars.next();
                toks.push((Tok::Separator, start));
            }
            '#' => {
                while let Some(&(_, c)) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '(' | ')' | '{' | '}' | ',' => {
                chars.next();
                let tok = match ch {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    _ => Tok::Comma,
                };
                toks.push((tok, start));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut end = start;
                while let Some(&(i, c)) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        end = i + c.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                toks.push((Tok::Ident(src[start..end].to_string()), start));
            }
            c if c.is_ascii_digit() || c == '-' || c == '+' => {
                chars.next();
                let mut end = start + 1;
                while let Some(&(i, c)) = chars.peek() {
                    if c.is_ascii_digit() {
                        end = i + 1;
                        chars.next();
                    } else {
                        break;
                    }
                }
                toks.push((Tok::Number(src[start..end].to_string()), start));
            }
            other => return Err((ParseErrorKind::UnexpectedChar(other), start)),
        }
    }
    toks.push((Tok::Eof, src.len()));
    Ok(Lexed { toks })
}

/// Untyped syntax tree produced by the first stage.
#[derive(Debug)]
enum Node {
    Atom(String, usize),
    Number(String, usize),
    Set(Vec<Node>, usize),
    Call(String, Vec<Node>, usize),
}

impl Node {
    fn offset(&self) -> usize {
        match self {
            Node::Atom(_, o) | Node::Number(_, o) | Node::Set(_, o) | Node::Call(_, _, o) => *o,
        }
    }

    fn describe(&self) -> String {
        match self {
            Node::Atom(s, _) | Node::Number(s, _) => format!("`{s}`"),
            Node::Set(..) => "a set".into(),
            Node::Call(n, ..) => format!("command `{n}`"),
        }
    }
}

type Fail = (ParseErrorKind, usize);

struct Reader {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    depth: usize,
}

impl Reader {
    fn skip_inner_separators(&mut self) {
        if self.depth > 0 {
            while self.toks[self.pos].0 == Tok::Separator {
                self.pos += 1;
            }
        }
    }

    fn peek(&mut self) -> &(Tok, usize) {
        self.skip_inner_separators();
        &self.toks[self.pos]
    }

    fn next(&mut self) -> (Tok, usize) {
        self.skip_inner_separators();
        let t = self.toks[self.pos].clone();
        if t.0 != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, expected: &'static str) -> Result<usize, Fail> {
        let (tok, at) = self.next();
        if tok == want {
            Ok(at)
        } else {
            Err((ParseErrorKind::UnexpectedToken { expected, found: tok.describe() }, at))
        }
    }

    fn program(&mut self) -> Result<Vec<Node>, Fail> {
        let mut stmts = Vec::new();
        loop {
            while self.peek().0 == Tok::Separator {
                self.next();
            }
            if self.peek().0 == Tok::Eof {
                return Ok(stmts);
            }
            stmts.push(self.call()?);
            match self.next() {
                (Tok::Separator, _) | (Tok::Eof, _) => {}
                (tok, at) => {
                    return Err((
                        ParseErrorKind::UnexpectedToken { expected: "end of statement", found: tok.describe() },
                        at,
                    ))
                }
            }
        }
    }

    fn call(&mut self) -> Result<Node, Fail> {
        match self.next() {
            (Tok::Ident(name), at) => {
                if parameters_of(&name).is_none() {
                    return Err((ParseErrorKind::UnknownCommand(name), at));
                }
                let args = self.arguments()?;
                Ok(Node::Call(name, args, at))
            }
            (tok, at) => Err((ParseErrorKind::UnexpectedToken { expected: "a command", found: tok.describe() }, at)),
        }
    }

    fn arguments(&mut self) -> Result<Vec<Node>, Fail> {
        self.expect(Tok::LParen, "`(`")?;
        self.depth += 1;
        let mut args = Vec::new();
        if self.peek().0 != Tok::RParen {
            loop {
                args.push(self.argument()?);
                match self.next() {
                    (Tok::Comma, _) => continue,
                    (Tok::RParen, _) => break,
                    (tok, at) => {
                        return Err((
                            ParseErrorKind::UnexpectedToken { expected: "`,` or `)`", found: tok.describe() },
                            at,
                        ))
                    }
                }
            }
        } else {
            self.next();
        }
        self.depth -= 1;
        Ok(args)
    }

    fn argument(&mut self) -> Result<Node, Fail> {
        let (tok, at) = self.peek().clone();
        match tok {
            Tok::LBrace => {
                self.next();
                self.depth += 1;
                let mut items = Vec::new();
                if self.peek().0 == Tok::RBrace {
                    self.next();
                } else {
                    loop {
                        items.push(self.argument()?);
                        match self.next() {
                            (Tok::Comma, _) => continue,
                            (Tok::RBrace, _) => break,
                            (_, at) => return Err((ParseErrorKind::MalformedSet, at)),
                        }
                    }
                }
                self.depth -= 1;
                Ok(Node::Set(items, at))
            }
            Tok::Ident(name) => {
                self.next();
                if self.peek().0 == Tok::LParen {
                    if parameters_of(&name).is_none() {
                        return Err((ParseErrorKind::UnknownCommand(name), at));
                    }
                    let args = self.arguments()?;
                    Ok(Node::Call(name, args, at))
                } else {
                    Ok(Node::Atom(name, at))
                }
            }
            Tok::Number(n) => {
                self.next();
                Ok(Node::Number(n, at))
            }
            other => Err((ParseErrorKind::UnexpectedToken { expected: "an argument", found: other.describe() }, at)),
        }
    }
}

// ---- second stage: typed conversion ----

fn mismatch(expected: &'static str, node: &Node) -> Fail {
    (ParseErrorKind::UnexpectedToken { expected, found: node.describe() }, node.offset())
}

fn looks_like_coord(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.clone().next().is_some()
        && chars.all(|c| c.is_ascii_digit())
}

fn coord(node: &Node) -> Result<Coord, Fail> {
    match node {
        Node::Atom(s, at) if looks_like_coord(s) => {
            s.parse().map_err(|_| (ParseErrorKind::InvalidCoordinate(s.clone()), *at))
        }
        other => Err(mismatch("a coordinate", other)),
    }
}

fn color(node: &Node) -> Result<Color, Fail> {
    match node {
        Node::Atom(s, at) => Color::from_name(s).ok_or_else(|| (ParseErrorKind::UnknownColor(s.clone()), *at)),
        other => Err(mismatch("a colour", other)),
    }
}

fn direction(node: &Node) -> Result<Direction, Fail> {
    match node {
        Node::Atom(s, at) => Direction::from_name(s).ok_or_else(|| (ParseErrorKind::UnknownDirection(s.clone()), *at)),
        other => Err(mismatch("a direction", other)),
    }
}

fn axis(node: &Node) -> Result<MirrorAxis, Fail> {
    match node {
        Node::Atom(s, at) => MirrorAxis::from_name(s).ok_or_else(|| (ParseErrorKind::UnknownAxis(s.clone()), *at)),
        other => Err(mismatch("horizontal or vertical", other)),
    }
}

fn repetitions(node: &Node) -> Result<u32, Fail> {
    match node {
        Node::Number(s, at) => {
            let value: i64 = match s.parse() {
                Ok(v) => v,
                Err(_) if s.starts_with('-') && s.len() > 1 => {
                    return Err((ParseErrorKind::NonPositiveRepetitions(s.clone()), *at))
                }
                Err(_) => return Err((ParseErrorKind::InvalidNumber(s.clone()), *at)),
            };
            if value < 1 {
                Err((ParseErrorKind::NonPositiveRepetitions(s.clone()), *at))
            } else {
                u32::try_from(value).map_err(|_| (ParseErrorKind::InvalidNumber(s.clone()), *at))
            }
        }
        other => Err(mismatch("a repetition count", other)),
    }
}

/// Splits `a_b` into two direction names where both halves are valid.
fn split_pair(rest: &str) -> Option<(Direction, Direction)> {
    rest.match_indices('_').find_map(|(i, _)| {
        Some((Direction::from_name(&rest[..i])?, Direction::from_name(&rest[i + 1..])?))
    })
}

pub(crate) fn pattern_from_name(name: &str) -> Option<Pattern> {
    if let Some(d) = Direction::from_name(name) {
        return Some(Pattern::Line(d));
    }
    if let Some(rest) = name.strip_prefix("square_") {
        let parts: Vec<&str> = rest.split('_').collect();
        if let [a, b, c] = parts[..] {
            let (a, b, c) = (Direction::from_name(a)?, Direction::from_name(b)?, Direction::from_name(c)?);
            return Pattern::square(a, b).filter(|_| c == a.opposite());
        }
        return None;
    }
    if let Some(rest) = name.strip_prefix("l_") {
        let (a, b) = split_pair(rest)?;
        return Pattern::l(a, b);
    }
    if let Some(rest) = name.strip_prefix("zigzag_") {
        let (first, second) = split_pair(rest)?;
        return Some(Pattern::Zigzag { first, second });
    }
    None
}

fn pattern(node: &Node) -> Result<Pattern, Fail> {
    match node {
        Node::Atom(s, at) => pattern_from_name(s).ok_or_else(|| (ParseErrorKind::UnknownPattern(s.clone()), *at)),
        other => Err(mismatch("a pattern", other)),
    }
}

fn set_of<T>(node: &Node, item: impl Fn(&Node) -> Result<T, Fail>) -> Result<Vec<T>, Fail> {
    match node {
        Node::Set(items, _) => items.iter().map(item).collect(),
        other => Err(mismatch("a `{...}` set", other)),
    }
}

fn nested(node: &Node) -> Result<Command, Fail> {
    let cmd = command(node)?;
    if cmd.is_composite() {
        return Err((ParseErrorKind::NestedComposite(cmd.name().to_string()), node.offset()));
    }
    Ok(cmd)
}

fn command(node: &Node) -> Result<Command, Fail> {
    let (name, args, at) = match node {
        Node::Call(name, args, at) => (name.as_str(), args, *at),
        other => return Err(mismatch("a command", other)),
    };
    let params = parameters_of(name).ok_or_else(|| (ParseErrorKind::UnknownCommand(name.to_string()), at))?;
    if params.len() != args.len() {
        return Err((
            ParseErrorKind::Arity { command: name.to_string(), expected: params.len(), found: args.len() },
            at,
        ));
    }
    let cmd = match name {
        "goCell" => Command::GoCell(coord(&args[0])?),
        "go" => Command::Go { direction: direction(&args[0])?, repetitions: repetitions(&args[1])? },
        "paintSingleCell" => Command::PaintSingleCell(color(&args[0])?),
        "paintPattern" => Command::PaintPattern {
            colors: set_of(&args[0], color)?,
            repetitions: repetitions(&args[1])?,
            pattern: pattern(&args[2])?,
        },
        "paintMultipleCells" => {
            Command::PaintMultipleCells { colors: set_of(&args[0], color)?, cells: set_of(&args[1], coord)? }
        }
        "fillEmpty" => Command::FillEmpty(color(&args[0])?),
        "repeatCommands" => {
            Command::RepeatCommands { commands: set_of(&args[0], nested)?, positions: set_of(&args[1], coord)? }
        }
        "copyCells" => Command::CopyCells { origin: set_of(&args[0], coord)?, destination: set_of(&args[1], coord)? },
        "mirrorBoard" => Command::MirrorBoard(axis(&args[0])?),
        "mirrorCells" => Command::MirrorCells { cells: set_of(&args[0], coord)?, axis: axis(&args[1])? },
        "mirrorCommands" => Command::MirrorCommands { commands: set_of(&args[0], nested)?, axis: axis(&args[1])? },
        _ => unreachable!("signature table and converter agree"),
    };
    Ok(cmd)
}

fn locate(src: &str, (kind, offset): Fail) -> ParseError {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let line_start = before.rfind('\n').map_or(0, |i| i + 1);
    let column = before[line_start..].chars().count() + 1;
    ParseError { kind, offset, line, column }
}

fn parse_nodes(src: &str) -> Result<Vec<Node>, Fail> {
    let lexed = lex(src)?;
    Reader { toks: lexed.toks, pos: 0, depth: 0 }.program()
}

/// Parses program text; statements are separated by newlines or `;`.
pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let run = || -> Result<Program, Fail> {
        let nodes = parse_nodes(src)?;
        Ok(Program::new(nodes.iter().map(command).collect::<Result<_, _>>()?))
    };
    run().map_err(|f| locate(src, f))
}

/// Parses exactly one command.
pub fn parse_command(src: &str) -> Result<Command, ParseError> {
    let program = parse_program(src)?;
    match <[Command; 1]>::try_from(program.commands) {
        Ok([cmd]) => Ok(cmd),
        Err(_) => Err(locate(src, (ParseErrorKind::TrailingInput, 0))),
    }
}
