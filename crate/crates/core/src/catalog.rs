//! Bundled reference schemas for the training and validation modules.
//!
//! Each schema is produced by running a reference solution on an empty board;
//! its complexity hint is the solution's algorithmic dimension.

use std::fmt;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::board::{CrossBoard, Schema};
use crate::interp::{run_program, RunOptions};
use crate::lang::parse_program;
use crate::scorer::classify_dimension;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Module {
    Training,
    Validation,
}

impl Module {
    pub fn name(self) -> &'static str {
        match self {
            Module::Training => "training",
            Module::Validation => "validation",
        }
    }

    pub fn from_name(s: &str) -> Option<Module> {
        match s {
            "training" => Some(Module::Training),
            "validation" => Some(Module::Validation),
            _ => None,
        }
    }

    pub fn len(self) -> usize {
        entries(self).len()
    }
}

impl fmt::Display for Module {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub module: Module,
    /// 1-based position inside the module.
    pub index: usize,
    pub schema: Schema,
    pub solution: &'static str,
    pub instructions: &'static str,
}

const VALIDATION: [(&str, &str); 12] = [
    ("fillEmpty(yellow)", "Colour the whole cross."),
    (
        "goCell(C1)\npaintPattern({red},6,right)\ngoCell(D1)\npaintPattern({blue},6,right)\nfillEmpty(green)",
        "Two coloured rows across the middle.",
    ),
    (
        "goCell(A3)\npaintPattern({yellow},6,up)\ngoCell(A4)\npaintPattern({red},6,up)\nfillEmpty(blue)",
        "Two coloured columns.",
    ),
    (
        "repeatCommands({paintPattern({blue},4,square_right_up_left)},{A3,C1,C5,E3})\nfillEmpty(yellow)",
        "Four squares at the ends of the arms.",
    ),
    (
        "goCell(C1)\npaintPattern({yellow,red},6,right)\nmirrorCells({C1,C2,C3,C4,C5,C6},horizontal)\nfillEmpty(green)",
        "Alternating middle rows.",
    ),
    (
        "goCell(A3)\npaintPattern({red,blue},6,up)\ngoCell(A4)\npaintPattern({blue,red},6,up)\nfillEmpty(yellow)",
        "Alternating columns.",
    ),
    (
        "goCell(C1)\npaintPattern({green},3,right)\ngoCell(D1)\npaintPattern({blue},3,right)\nmirrorBoard(vertical)\nfillEmpty(yellow)",
        "Symmetric arms.",
    ),
    (
        "goCell(A3)\npaintPattern({red,blue},6,up)\ncopyCells({B3,A3,D3,C3,F3,E3},{A4,B4,C4,D4,E4,F4})\ngoCell(C1)\npaintPattern({red,blue},2,right)\ngoCell(D1)\npaintPattern({blue,red},2,right)\nmirrorBoard(vertical)",
        "A patchwork of red and blue.",
    ),
    (
        "goCell(A3)\npaintPattern({red},4,up_right)\nmirrorBoard(vertical)\nmirrorBoard(horizontal)\nfillEmpty(yellow)",
        "Two crossing diagonals.",
    ),
    (
        "goCell(C1)\npaintPattern({blue},5,zigzag_right_up)\nmirrorCommands({goCell(C1),paintPattern({blue},5,zigzag_right_up)},vertical)\nfillEmpty(yellow)",
        "Two staircases.",
    ),
    (
        "repeatCommands({paintPattern({green},4,l_up_right)},{A3,D3})\nmirrorBoard(vertical)\nfillEmpty(red)",
        "Green column, red arms.",
    ),
    (
        "goCell(C1)\npaintPattern({yellow,green},2,right)\ncopyCells({C1,C2},{A3,B3})\nmirrorBoard(horizontal)\nmirrorBoard(vertical)\nfillEmpty(red)",
        "Corners in four colours.",
    ),
];

const TRAINING: [(&str, &str); 15] = [
    ("fillEmpty(red)", "Tap the fill button with red selected."),
    ("fillEmpty(blue)", "Fill the cross with blue."),
    ("goCell(C1)\npaintPattern({yellow},6,right)\nfillEmpty(blue)", "Paint a row, then fill the rest."),
    ("goCell(A3)\npaintPattern({green},6,up)\nfillEmpty(red)", "Paint a column, then fill the rest."),
    ("goCell(C3)\npaintSingleCell(red)\nfillEmpty(yellow)", "Colour one dot, then fill the rest."),
    ("paintMultipleCells({blue},{C1,D1,C6,D6})\nfillEmpty(green)", "Colour the tips of the arms."),
    ("goCell(A3)\npaintPattern({red},4,square_right_up_left)\nfillEmpty(yellow)", "Paint a square."),
    ("goCell(C1)\npaintPattern({red,yellow},6,right)\nfillEmpty(blue)", "Alternate two colours on a row."),
    ("goCell(A3)\npaintPattern({blue},4,l_up_right)\nfillEmpty(green)", "Paint an L."),
    ("goCell(C1)\npaintPattern({green},3,right)\nmirrorBoard(vertical)\nfillEmpty(yellow)", "Use the mirror."),
    ("goCell(C1)\npaintPattern({red},3,up_right)\nfillEmpty(blue)", "Paint a diagonal."),
    ("repeatCommands({paintPattern({yellow},2,right)},{C1,D1,C5,D5})\nfillEmpty(red)", "Repeat a short line."),
    ("goCell(A3)\npaintPattern({red,blue},6,up)\nmirrorBoard(vertical)\nfillEmpty(green)", "Alternate and mirror."),
    (
        "paintMultipleCells({yellow,green},{C1,C2,C3})\ncopyCells({C1,C2,C3},{D1,D2,D3})\nfillEmpty(blue)",
        "Copy a row.",
    ),
    ("goCell(F3)\npaintPattern({green},3,zigzag_down_right)\nfillEmpty(red)", "Paint a zigzag."),
];

fn build(module: Module, table: &[(&'static str, &'static str)]) -> Vec<CatalogEntry> {
    let prefix = match module {
        Module::Training => "T",
        Module::Validation => "V",
    };
    table
        .iter()
        .enumerate()
        .map(|(i, &(solution, instructions))| {
            let program = parse_program(solution).expect("bundled solution parses");
            let (state, outcome) = run_program(&program, CrossBoard::empty(), &RunOptions::default());
            outcome.expect("bundled solution runs");
            let dimension = classify_dimension(&program).expect("bundled solution paints");
            let schema = Schema::new(format!("{prefix}{:02}", i + 1), *state.board())
                .expect("bundled solution colours every dot")
                .with_complexity_hint(dimension as u32);
            CatalogEntry { module, index: i + 1, schema, solution, instructions }
        })
        .collect()
}

static VALIDATION_ENTRIES: LazyLock<Vec<CatalogEntry>> = LazyLock::new(|| build(Module::Validation, &VALIDATION));
static TRAINING_ENTRIES: LazyLock<Vec<CatalogEntry>> = LazyLock::new(|| build(Module::Training, &TRAINING));

pub fn entries(module: Module) -> &'static [CatalogEntry] {
    match module {
        Module::Training => &TRAINING_ENTRIES,
        Module::Validation => &VALIDATION_ENTRIES,
    }
}

/// Entry by 1-based index.
pub fn entry(module: Module, index: usize) -> Option<&'static CatalogEntry> {
    index.checked_sub(1).and_then(|i| entries(module).get(i))
}

pub fn find(schema_id: &str) -> Option<&'static CatalogEntry> {
    entries(Module::Validation)
        .iter()
        .chain(entries(Module::Training))
        .find(|e| e.schema.id == schema_id)
}

pub fn schemas(module: Module) -> Vec<Schema> {
    entries(module).iter().map(|e| e.schema.clone()).collect()
}
