//! The cross array: coordinates, colours, boards and reference schemas.
//!
//! Rows are lettered `A`..`F` from bottom to top and columns numbered `1`..`6`
//! from left to right. Only the 20 dots of the two-thick cross are part of the
//! board: rows `C`/`D` span every column, columns `3`/`4` span every row.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const ROWS: [char; 6] = ['A', 'B', 'C', 'D', 'E', 'F'];

/// Number of dots on the cross.
pub const CELL_COUNT: usize = 20;

/// Membership test for a raw row letter / column number pair.
pub fn is_valid_cell(row: char, col: u8) -> bool {
    let row_ok = ('A'..='F').contains(&row);
    let col_ok = (1..=6).contains(&col);
    row_ok && col_ok && (matches!(row, 'C' | 'D') || matches!(col, 3 | 4))
}

/// A position on the 6x6 grid that encloses the cross.
///
/// Any grid position can be named (so that programs mentioning `B2` parse and
/// fail at execution time); use [`Coord::is_valid`] to test cross membership.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    row: u8,
    col: u8,
}

impl Coord {
    /// Builds a grid position; `None` outside `A..F` x `1..6`.
    pub fn new(row: char, col: u8) -> Option<Coord> {
        let r = ROWS.iter().position(|&c| c == row)?;
        if !(1..=6).contains(&col) {
            return None;
        }
        Some(Coord { row: r as u8, col })
    }

    /// Builds from a zero-based row index (0 = `A`) and a 1-based column.
    pub fn from_indices(row: u8, col: u8) -> Option<Coord> {
        (row < 6 && (1..=6).contains(&col)).then_some(Coord { row, col })
    }

    pub fn row(self) -> char {
        ROWS[self.row as usize]
    }

    pub fn row_index(self) -> u8 {
        self.row
    }

    pub fn col(self) -> u8 {
        self.col
    }

    pub fn is_valid(self) -> bool {
        is_valid_cell(self.row(), self.col)
    }

    /// Moves by `(rows, cols)`; `None` when the result leaves the 6x6 grid.
    pub fn offset(self, d_row: i8, d_col: i8) -> Option<Coord> {
        let r = self.row as i8 + d_row;
        let c = self.col as i8 + d_col;
        if (0..6).contains(&r) && (1..=6).contains(&c) {
            Some(Coord { row: r as u8, col: c as u8 })
        } else {
            None
        }
    }

    pub fn mirror(self, axis: MirrorAxis) -> Coord {
        match axis {
            MirrorAxis::Horizontal => Coord { row: 5 - self.row, col: self.col },
            MirrorAxis::Vertical => Coord { row: self.row, col: 7 - self.col },
        }
    }

    /// All 20 cross cells in canonical order (row `A`..`F`, then column).
    pub fn all_valid() -> impl Iterator<Item = Coord> {
        VALID_CELLS.iter().copied()
    }
}

/// Reflects a cell across the horizontal (rows `A`<->`F`) or vertical
/// (columns `1`<->`6`) axis of the cross.
pub fn mirror_coord(coord: Coord, axis: MirrorAxis) -> Coord {
    coord.mirror(axis)
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.row(), self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid coordinate `{0}`")]
pub struct CoordParseError(pub String);

impl FromStr for Coord {
    type Err = CoordParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        let err = || CoordParseError(s.to_string());
        let row = chars.next().ok_or_else(err)?;
        let digits = chars.as_str();
        if digits.len() != 1 {
            return Err(err());
        }
        let col = digits.parse::<u8>().map_err(|_| err())?;
        Coord::new(row, col).ok_or_else(err)
    }
}

impl Serialize for Coord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Coord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

const fn cell(row: u8, col: u8) -> Coord {
    Coord { row, col }
}

static VALID_CELLS: [Coord; CELL_COUNT] = [
    cell(0, 3),
    cell(0, 4),
    cell(1, 3),
    cell(1, 4),
    cell(2, 1),
    cell(2, 2),
    cell(2, 3),
    cell(2, 4),
    cell(2, 5),
    cell(2, 6),
    cell(3, 1),
    cell(3, 2),
    cell(3, 3),
    cell(3, 4),
    cell(3, 5),
    cell(3, 6),
    cell(4, 3),
    cell(4, 4),
    cell(5, 3),
    cell(5, 4),
];

fn index_of(coord: Coord) -> Option<usize> {
    VALID_CELLS.iter().position(|&c| c == coord)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MirrorAxis {
    Horizontal,
    Vertical,
}

impl MirrorAxis {
    pub fn name(self) -> &'static str {
        match self {
            MirrorAxis::Horizontal => "horizontal",
            MirrorAxis::Vertical => "vertical",
        }
    }

    pub fn from_name(name: &str) -> Option<MirrorAxis> {
        match name {
            "horizontal" => Some(MirrorAxis::Horizontal),
            "vertical" => Some(MirrorAxis::Vertical),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Yellow,
    Red,
    Green,
    Blue,
}

impl Color {
    pub const ALL: [Color; 4] = [Color::Yellow, Color::Red, Color::Green, Color::Blue];

    pub fn name(self) -> &'static str {
        match self {
            Color::Yellow => "yellow",
            Color::Red => "red",
            Color::Green => "green",
            Color::Blue => "blue",
        }
    }

    pub fn from_name(name: &str) -> Option<Color> {
        Color::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Single-letter code used by text grids and compact board strings.
    pub fn letter(self) -> char {
        match self {
            Color::Yellow => 'y',
            Color::Red => 'r',
            Color::Green => 'g',
            Color::Blue => 'b',
        }
    }

    pub fn from_letter(letter: char) -> Option<Color> {
        Color::ALL.into_iter().find(|c| c.letter() == letter)
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The colouring state of the 20 cross dots.
///
/// Accessors panic when handed a coordinate outside the cross: callers are
/// expected to check membership first, so any such access is a logic error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct CrossBoard {
    cells: [Option<Color>; CELL_COUNT],
}

impl CrossBoard {
    pub fn empty() -> Self {
        CrossBoard::default()
    }

    pub fn filled(color: Color) -> Self {
        CrossBoard { cells: [Some(color); CELL_COUNT] }
    }

    fn slot(coord: Coord) -> usize {
        index_of(coord).unwrap_or_else(|| panic!("{coord} is not a cell of the cross"))
    }

    pub fn get(&self, coord: Coord) -> Option<Color> {
        self.cells[Self::slot(coord)]
    }

    pub fn set(&mut self, coord: Coord, color: Color) {
        self.cells[Self::slot(coord)] = Some(color);
    }

    pub fn clear(&mut self, coord: Coord) {
        self.cells[Self::slot(coord)] = None;
    }

    /// `(coord, colour)` pairs in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (Coord, Option<Color>)> + '_ {
        VALID_CELLS.iter().copied().zip(self.cells.iter().copied())
    }

    pub fn coloured_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.coloured_count() == CELL_COUNT
    }

    /// Cells whose value differs between `self` and `other`, canonical order.
    pub fn diff(&self, other: &CrossBoard) -> Vec<Coord> {
        self.iter()
            .zip(other.iter())
            .filter(|((_, a), (_, b))| a != b)
            .map(|((c, _), _)| c)
            .collect()
    }

    /// 20-character string in canonical order, `.` for uncoloured dots.
    pub fn to_compact(&self) -> String {
        self.cells.iter().map(|c| c.map_or('.', Color::letter)).collect()
    }

    pub fn from_compact(s: &str) -> Option<CrossBoard> {
        let chars: Vec<char> = s.chars().collect();
        if chars.len() != CELL_COUNT {
            return None;
        }
        let mut board = CrossBoard::empty();
        for (slot, ch) in chars.into_iter().enumerate() {
            board.cells[slot] = match ch {
                '.' => None,
                other => Some(Color::from_letter(other)?),
            };
        }
        Some(board)
    }

    /// Text grid with row `F` on top; dots outside the cross are blank.
    pub fn render_grid(&self) -> String {
        let mut out = String::new();
        for row in (0..6u8).rev() {
            out.push(ROWS[row as usize]);
            for col in 1..=6u8 {
                let coord = Coord { row, col };
                out.push(' ');
                out.push(match index_of(coord) {
                    Some(slot) => self.cells[slot].map_or('.', Color::letter),
                    None => ' ',
                });
            }
            let trimmed = out.trim_end().len();
            out.truncate(trimmed);
            out.push('\n');
        }
        out.push_str("  1 2 3 4 5 6\n");
        out
    }
}

impl Serialize for CrossBoard {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(&self.to_compact())
    }
}

impl<'de> Deserialize<'de> for CrossBoard {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        CrossBoard::from_compact(&s).ok_or_else(|| de::Error::custom("malformed board string"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("malformed schema document: {0}")]
    Malformed(String),
    #[error("invalid coordinate `{0}`")]
    InvalidCoordinate(String),
    #[error("unknown colour `{value}` at {cell}")]
    UnknownColor { cell: String, value: String },
    #[error("incomplete schema: missing {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))]
    Incomplete(Vec<Coord>),
    #[error("uncoloured cell {0} in reference schema")]
    Uncoloured(Coord),
}

/// A fully coloured reference pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schema {
    pub id: String,
    pub cells: CrossBoard,
    pub complexity_hint: Option<u32>,
}

impl Schema {
    pub fn new(id: impl Into<String>, cells: CrossBoard) -> Result<Schema, SchemaError> {
        if let Some((coord, _)) = cells.iter().find(|(_, c)| c.is_none()) {
            return Err(SchemaError::Uncoloured(coord));
        }
        Ok(Schema { id: id.into(), cells, complexity_hint: None })
    }

    pub fn with_complexity_hint(mut self, hint: u32) -> Schema {
        self.complexity_hint = Some(hint);
        self
    }

    /// Canonical JSON bytes: `id`, then `cells` in canonical key order.
    pub fn to_json(&self) -> Vec<u8> {
        serde_json::to_vec(&SchemaDoc(self)).expect("schema serialisation cannot fail")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Schema, SchemaError> {
        let raw: RawSchema =
            serde_json::from_slice(bytes).map_err(|e| SchemaError::Malformed(e.to_string()))?;
        let mut board = CrossBoard::empty();
        for (key, value) in &raw.cells {
            let coord: Coord = key
                .parse()
                .ok()
                .filter(|c: &Coord| c.is_valid())
                .ok_or_else(|| SchemaError::InvalidCoordinate(key.clone()))?;
            match value {
                None => return Err(SchemaError::Uncoloured(coord)),
                Some(name) => {
                    let color = Color::from_name(name).ok_or_else(|| SchemaError::UnknownColor {
                        cell: key.clone(),
                        value: name.clone(),
                    })?;
                    board.set(coord, color);
                }
            }
        }
        let missing: Vec<Coord> = board.iter().filter(|(_, c)| c.is_none()).map(|(c, _)| c).collect();
        if !missing.is_empty() {
            return Err(SchemaError::Incomplete(missing));
        }
        Ok(Schema { id: raw.id, cells: board, complexity_hint: raw.complexity_hint })
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Schema, SchemaError> {
        let bytes = std::fs::read(path.as_ref()).map_err(|e| SchemaError::Malformed(e.to_string()))?;
        Schema::from_json(&bytes)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchema {
    id: String,
    cells: BTreeMap<String, Option<String>>,
    #[serde(default)]
    complexity_hint: Option<u32>,
}

struct SchemaDoc<'a>(&'a Schema);
struct CellsDoc<'a>(&'a CrossBoard);

impl Serialize for SchemaDoc<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let schema = self.0;
        let len = if schema.complexity_hint.is_some() { 3 } else { 2 };
        let mut st = serializer.serialize_struct("Schema", len)?;
        st.serialize_field("id", &schema.id)?;
        st.serialize_field("cells", &CellsDoc(&schema.cells))?;
        if let Some(hint) = schema.complexity_hint {
            st.serialize_field("complexity_hint", &hint)?;
        }
        st.end()
    }
}

impl Serialize for CellsDoc<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(CELL_COUNT))?;
        for (coord, color) in self.0.iter() {
            map.serialize_entry(&coord.to_string(), &color.map(Color::name))?;
        }
        map.end()
    }
}

/// Board rendered as a `{"A3": "yellow", ..}` object (uncoloured as `null`),
/// the shape used by views and the schema file.
pub fn board_to_cell_map(board: &CrossBoard) -> serde_json::Value {
    serde_json::to_value(CellsDoc(board)).expect("board serialisation cannot fail")
}

struct CellMapVisitor;

impl<'de> Visitor<'de> for CellMapVisitor {
    type Value = CrossBoard;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a map from cross coordinates to colours")
    }

    fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<CrossBoard, A::Error> {
        let mut board = CrossBoard::empty();
        while let Some((key, value)) = access.next_entry::<String, Option<Color>>()? {
            let coord: Coord = key.parse().map_err(de::Error::custom)?;
            if !coord.is_valid() {
                return Err(de::Error::custom(format!("invalid coordinate `{key}`")));
            }
            if let Some(color) = value {
                board.set(coord, color);
            }
        }
        Ok(board)
    }
}

/// Inverse of [`board_to_cell_map`].
pub fn board_from_cell_map<'de, D: Deserializer<'de>>(deserializer: D) -> Result<CrossBoard, D::Error> {
    deserializer.deserialize_map(CellMapVisitor)
}
