//! Reports over exported datasets: completion time per interaction category,
//! success per schema and age group, and the strategy distribution.
//!
//! Only validation tasks are considered. Minutes and percentages are rounded
//! half up to integers.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::catalog::Module;
use crate::scorer::{AlgorithmDimension, Artefact, InteractionDimension};
use crate::telemetry::{Dataset, TaskRecord};

/// `numerator / denominator` rounded half up; `denominator` must be positive.
pub fn div_round_half_up(numerator: u64, denominator: u64) -> u64 {
    (2 * numerator + denominator) / (2 * denominator)
}

/// Integer percentage of `part` in `whole`, rounded half up.
pub fn percent(part: u64, whole: u64) -> Option<u64> {
    (whole > 0).then(|| div_round_half_up(100 * part, whole))
}

/// Percentages of `counts` that sum to exactly 100 (largest remainder;
/// ties go to the earlier entry). All zeros when the counts are all zero.
pub fn largest_remainder(counts: &[u64]) -> Vec<u64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return vec![0; counts.len()];
    }
    let mut shares: Vec<u64> = counts.iter().map(|c| 100 * c / total).collect();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse((100 * counts[i]) % total));
    let missing = 100 - shares.iter().sum::<u64>();
    for &i in order.iter().take(missing as usize) {
        shares[i] += 1;
    }
    shares
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AgeGroup {
    pub label: String,
    pub min: u32,
    pub max: u32,
}

impl AgeGroup {
    pub fn new(min: u32, max: u32) -> AgeGroup {
        AgeGroup { label: format!("{min}-{max}"), min, max }
    }

    pub fn contains(&self, age: u32) -> bool {
        (self.min..=self.max).contains(&age)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BandError {
    #[error("malformed age band `{0}` (expected e.g. 3-6)")]
    Malformed(String),
    #[error("age band {0} is empty")]
    Empty(String),
    #[error("age bands {0} and {1} overlap")]
    Overlap(String, String),
}

/// Age bands of one report, validated as non-overlapping.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AgeBands(Vec<AgeGroup>);

impl AgeBands {
    pub fn new(groups: Vec<AgeGroup>) -> Result<AgeBands, BandError> {
        for g in &groups {
            if g.min > g.max {
                return Err(BandError::Empty(g.label.clone()));
            }
        }
        for (i, a) in groups.iter().enumerate() {
            for b in &groups[i + 1..] {
                if a.min <= b.max && b.min <= a.max {
                    return Err(BandError::Overlap(a.label.clone(), b.label.clone()));
                }
            }
        }
        Ok(AgeBands(groups))
    }

    pub fn groups(&self) -> &[AgeGroup] {
        &self.0
    }

    pub fn group_of(&self, age: Option<u32>) -> Option<usize> {
        age.and_then(|a| self.0.iter().position(|g| g.contains(a)))
    }
}

impl Default for AgeBands {
    fn default() -> AgeBands {
        AgeBands(vec![AgeGroup::new(3, 6), AgeGroup::new(7, 9), AgeGroup::new(10, 13)])
    }
}

impl FromStr for AgeBands {
    type Err = BandError;

    fn from_str(s: &str) -> Result<AgeBands, BandError> {
        let groups = s
            .split(',')
            .map(|part| {
                let part = part.trim();
                let (lo, hi) = part.split_once('-').ok_or_else(|| BandError::Malformed(part.into()))?;
                let lo = lo.trim().parse().map_err(|_| BandError::Malformed(part.into()))?;
                let hi = hi.trim().parse().map_err(|_| BandError::Malformed(part.into()))?;
                Ok(AgeGroup::new(lo, hi))
            })
            .collect::<Result<Vec<_>, _>>()?;
        AgeBands::new(groups)
    }
}

/// A rendered table: header plus rows of cells, with notices printed below.
pub trait Report: Serialize {
    fn header(&self) -> Vec<String>;
    fn rows(&self) -> Vec<Vec<String>>;
    fn notices(&self) -> &[String];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Text,
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<ReportFormat, String> {
        match s {
            "text" => Ok(ReportFormat::Text),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown format `{other}` (text, csv or json)")),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Text => "text",
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        })
    }
}

pub fn render(report: &impl Report, format: ReportFormat) -> String {
    match format {
        ReportFormat::Text => render_text(report),
        ReportFormat::Csv => render_csv(report),
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialise");
            s.push('\n');
            s
        }
    }
}

fn render_text(report: &impl Report) -> String {
    let header = report.header();
    let rows = report.rows();
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        padded.join("  ").trim_end().to_string()
    };
    let mut out = line(&header);
    out.push('\n');
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * widths.len().saturating_sub(1)));
    out.push('\n');
    for row in &rows {
        out.push_str(&line(row));
        out.push('\n');
    }
    for n in report.notices() {
        out.push_str("note: ");
        out.push_str(n);
        out.push('\n');
    }
    out
}

fn render_csv(report: &impl Report) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(report.header()).expect("in-memory write");
    for row in report.rows() {
        writer.write_record(row).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

fn validation_tasks(dataset: &Dataset) -> impl Iterator<Item = &TaskRecord> {
    dataset.tasks.iter().filter(|t| t.module == Module::Validation)
}

fn millis(seconds: f64) -> u64 {
    (seconds * 1000.0).round().max(0.0) as u64
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TimeRow {
    pub category: String,
    pub students: usize,
    pub avg: u64,
    pub min: u64,
    pub max: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct TimeReport {
    pub rows: Vec<TimeRow>,
    pub notices: Vec<String>,
}

impl Report for TimeReport {
    fn header(&self) -> Vec<String> {
        ["interaction", "students", "avg_min", "min_min", "max_min"].map(String::from).to_vec()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| vec![r.category.clone(), r.students.to_string(), r.avg.to_string(), r.min.to_string(), r.max.to_string()])
            .collect()
    }

    fn notices(&self) -> &[String] {
        &self.notices
    }
}

fn time_row(category: &str, totals_ms: &[u64]) -> TimeRow {
    let n = totals_ms.len() as u64;
    let minutes = |ms: u64| div_round_half_up(ms, 60_000);
    TimeRow {
        category: category.to_string(),
        students: totals_ms.len(),
        avg: div_round_half_up(totals_ms.iter().sum::<u64>(), 60_000 * n),
        min: minutes(*totals_ms.iter().min().expect("non-empty")),
        max: minutes(*totals_ms.iter().max().expect("non-empty")),
    }
}

/// The interaction category a student mostly used, by task count, then by
/// time spent, then in GF, G, PF, P order.
fn majority_interaction(tasks: &[&TaskRecord]) -> Option<InteractionDimension> {
    let mut tally: BTreeMap<usize, (usize, u64)> = BTreeMap::new();
    for t in tasks {
        if let Some(i) = t.outcome.interaction {
            let e = tally.entry(i.ordinal()).or_default();
            e.0 += 1;
            e.1 += millis(t.outcome.duration);
        }
    }
    tally
        .into_iter()
        .max_by(|(ia, a), (ib, b)| a.cmp(b).then(ib.cmp(ia)))
        .map(|(i, _)| InteractionDimension::ALL[i])
}

/// Total validation time per student, grouped by the student's interaction
/// category. Students without any concluded task are left out.
pub fn time_by_interaction(dataset: &Dataset) -> TimeReport {
    let mut per_category: [Vec<u64>; 4] = Default::default();
    for student in &dataset.students {
        let tasks: Vec<&TaskRecord> = validation_tasks(dataset).filter(|t| t.student_id == student.student_id).collect();
        if let Some(i) = majority_interaction(&tasks) {
            per_category[i.ordinal()].push(tasks.iter().map(|t| millis(t.outcome.duration)).sum());
        }
    }
    let mut report = TimeReport::default();
    if per_category.iter().all(Vec::is_empty) {
        report.notices.push("no student concluded a validation task".into());
        return report;
    }
    for (i, totals) in per_category.iter().enumerate() {
        let category = InteractionDimension::ALL[i].category();
        if totals.is_empty() {
            report.notices.push(format!("no {category} students"));
        } else {
            report.rows.push(time_row(category, totals));
        }
    }
    let all: Vec<u64> = per_category.concat();
    report.rows.push(time_row("Total", &all));
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub struct SuccessCell {
    pub solved: u64,
    pub attempted: u64,
}

impl fmt::Display for SuccessCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match percent(self.solved, self.attempted) {
            Some(p) => write!(f, "{}/{} ({p}%)", self.solved, self.attempted),
            None => write!(f, "{}/{} (—)", self.solved, self.attempted),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuccessReport {
    pub columns: Vec<String>,
    /// Students per column.
    pub group_sizes: Vec<u64>,
    pub schemas: Vec<String>,
    pub cells: Vec<Vec<SuccessCell>>,
    pub notices: Vec<String>,
}

impl Report for SuccessReport {
    fn header(&self) -> Vec<String> {
        let mut h = vec!["schema".to_string()];
        h.extend(self.columns.iter().cloned());
        h
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.schemas
            .iter()
            .zip(&self.cells)
            .map(|(s, row)| {
                let mut r = vec![s.clone()];
                r.extend(row.iter().map(ToString::to_string));
                r
            })
            .collect()
    }

    fn notices(&self) -> &[String] {
        &self.notices
    }
}

pub const UNASSIGNED: &str = "unassigned";

/// Solved over attempted per schema and age group, plus a total column.
pub fn success_by_schema(dataset: &Dataset, bands: &AgeBands) -> SuccessReport {
    let groups = bands.groups();
    let unassigned = groups.len();
    let column_of = |student_id: &str| bands.group_of(dataset.age_of(student_id)).unwrap_or(unassigned);
    let mut sizes = vec![0u64; groups.len() + 1];
    for s in &dataset.students {
        sizes[column_of(&s.student_id)] += 1;
    }
    let schemas: Vec<String> = crate::catalog::schemas(Module::Validation).into_iter().map(|s| s.id).collect();
    let mut cells = vec![vec![SuccessCell::default(); groups.len() + 2]; schemas.len()];
    for t in validation_tasks(dataset) {
        let Some(row) = schemas.iter().position(|s| *s == t.outcome.schema_id) else { continue };
        if !t.outcome.attempted {
            continue;
        }
        for col in [column_of(&t.student_id), groups.len() + 1] {
            cells[row][col].attempted += 1;
            cells[row][col].solved += u64::from(t.outcome.solved);
        }
    }
    let mut columns: Vec<String> = groups.iter().map(|g| g.label.clone()).collect();
    columns.push(UNASSIGNED.into());
    columns.push("Total".into());
    sizes.push(dataset.students.len() as u64);
    let mut notices = Vec::new();
    if sizes[unassigned] == 0 {
        columns.remove(unassigned);
        sizes.remove(unassigned);
        for row in &mut cells {
            row.remove(unassigned);
        }
    } else {
        notices.push(format!("{} students have no age inside the bands and are reported as {UNASSIGNED}", sizes[unassigned]));
    }
    SuccessReport { columns, group_sizes: sizes, schemas, cells, notices }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupDistribution {
    pub label: String,
    pub tasks: u64,
    /// `counts[dimension][interaction]`, interaction in GF, G, PF, P order.
    pub counts: [[u64; 4]; 3],
    pub percentages: [[u64; 4]; 3],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct StrategyReport {
    pub groups: Vec<GroupDistribution>,
    pub notices: Vec<String>,
    pub warnings: Vec<String>,
}

impl Report for StrategyReport {
    fn header(&self) -> Vec<String> {
        let mut h = vec!["group".to_string(), "algorithm".to_string()];
        h.extend(InteractionDimension::ALL.iter().map(|i| i.category().to_string()));
        h
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let mut rows = Vec::new();
        for g in &self.groups {
            for d in AlgorithmDimension::ALL {
                let mut r = vec![g.label.clone(), d.label().to_string()];
                r.extend(g.percentages[d as usize].iter().map(|p| format!("{p}%")));
                rows.push(r);
            }
        }
        rows
    }

    fn notices(&self) -> &[String] {
        &self.notices
    }
}

/// Share of each algorithm × interaction combination within each age group,
/// over concluded, non-surrendered validation tasks.
pub fn strategy_distribution(dataset: &Dataset, bands: &AgeBands) -> StrategyReport {
    let groups = bands.groups();
    let mut counts = vec![[[0u64; 4]; 3]; groups.len()];
    let mut unassigned = 0;
    for t in validation_tasks(dataset) {
        let o = &t.outcome;
        let (Some(d), Some(i)) = (o.dimension, o.interaction) else { continue };
        if o.surrendered || t.truncated {
            continue;
        }
        match bands.group_of(dataset.age_of(&t.student_id)) {
            Some(g) => counts[g][d as usize][i.ordinal()] += 1,
            None => unassigned += 1,
        }
    }
    let mut report = StrategyReport::default();
    if unassigned > 0 {
        report.notices.push(format!("{unassigned} tasks of students outside the bands were left out"));
    }
    for (g, c) in groups.iter().zip(counts) {
        let flat: Vec<u64> = c.iter().flatten().copied().collect();
        let tasks: u64 = flat.iter().sum();
        if tasks == 0 {
            report.notices.push(format!("group {} has no classified tasks and is omitted", g.label));
            continue;
        }
        let shares = largest_remainder(&flat);
        let mut percentages = [[0u64; 4]; 3];
        for (k, p) in shares.into_iter().enumerate() {
            percentages[k / 4][k % 4] = p;
        }
        let p_tasks: u64 = InteractionDimension::ALL
            .iter()
            .filter(|i| i.artefact == Artefact::P)
            .map(|i| c.iter().map(|row| row[i.ordinal()]).sum::<u64>())
            .sum();
        if g.max <= 6 && p_tasks > 0 {
            report.warnings.push(format!(
                "group {}: {p_tasks} tasks used P, but younger pupils are not allowed to use the visual programming interfaces",
                g.label
            ));
        }
        report.groups.push(GroupDistribution { label: g.label.clone(), tasks, counts: c, percentages });
    }
    report.notices.extend(report.warnings.iter().map(|w| format!("warning: {w}")).collect::<Vec<_>>());
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rounding() {
        assert_eq!(percent(22, 24), Some(92));
        assert_eq!(percent(3, 6), Some(50));
        assert_eq!(percent(1, 8), Some(13));
        assert_eq!(percent(0, 0), None);
        assert_eq!(div_round_half_up(90_000, 60_000), 2);
        assert_eq!(div_round_half_up(89_999, 60_000), 1);
    }

    #[test]
    fn cell_format() {
        assert_eq!(SuccessCell { solved: 3, attempted: 6 }.to_string(), "3/6 (50%)");
        assert_eq!(SuccessCell { solved: 0, attempted: 0 }.to_string(), "0/0 (—)");
        assert_eq!(SuccessCell { solved: 22, attempted: 24 }.to_string(), "22/24 (92%)");
    }

    #[test]
    fn bands() {
        let b: AgeBands = "3-6,10-13".parse().unwrap();
        assert_eq!(b.groups()[1], AgeGroup::new(10, 13));
        assert_eq!(b.group_of(Some(11)), Some(1));
        assert_eq!(b.group_of(Some(8)), None);
        assert_eq!(b.group_of(None), None);
        assert!(matches!("3-6,5-9".parse::<AgeBands>(), Err(BandError::Overlap(..))));
        assert!(matches!("3-x".parse::<AgeBands>(), Err(BandError::Malformed(_))));
        assert!(matches!("7-3".parse::<AgeBands>(), Err(BandError::Empty(_))));
    }

    #[test]
    fn remainders() {
        assert_eq!(largest_remainder(&[1, 1, 1]), vec![34, 33, 33]);
        assert_eq!(largest_remainder(&[2, 0, 2]), vec![50, 0, 50]);
        assert_eq!(largest_remainder(&[0, 0]), vec![0, 0]);
    }

    proptest! {
        #[test]
        fn remainders_sum_to_100(counts in prop::collection::vec(0u64..50, 1..12)) {
            let shares = largest_remainder(&counts);
            let total: u64 = counts.iter().sum();
            if total > 0 {
                prop_assert_eq!(shares.iter().sum::<u64>(), 100);
                for (c, s) in counts.iter().zip(&shares) {
                    let exact = 100.0 * *c as f64 / total as f64;
                    prop_assert!((*s as f64 - exact).abs() < 1.0);
                }
            }
        }
    }
}
