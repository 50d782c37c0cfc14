//! `.catlog.jsonl` datasets: one JSON object per line, tagged by `type`.
//!
//! Line order is the session header, students, task summaries, then events
//! grouped by student in registration order (each student's events keep log
//! order).

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::replay::{records_of, replay_events, ReplayError, TaskRecord};
use super::{EventLog, SessionEvent};
use crate::scorer::Rubric;

pub const DATASET_FORMAT: &str = "catlog/1";
pub const DATASET_EXTENSION: &str = "catlog.jsonl";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionLine {
    pub format: String,
    pub session_id: String,
    pub date: NaiveDate,
    pub canton: String,
    pub school: String,
    pub grade_level: String,
    pub pseudonymised: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudentLine {
    pub student_id: String,
    pub gender: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub birth_date: Option<NaiveDate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub age: Option<u32>,
}

impl StudentLine {
    /// Age in full years on `date`, from the stored age or the birth date.
    pub fn age_on(&self, date: NaiveDate) -> Option<u32> {
        self.age.or_else(|| self.birth_date.and_then(|b| date.years_since(b)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Line {
    Session(SessionLine),
    Student(StudentLine),
    Task(TaskRecord),
    Event(SessionEvent),
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("the dataset has no session line")]
    MissingSession,
    #[error("line {line}: a second session line")]
    DuplicateSession { line: usize },
    #[error(transparent)]
    Replay(#[from] ReplayError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub session: SessionLine,
    pub students: Vec<StudentLine>,
    pub tasks: Vec<TaskRecord>,
    pub events: Vec<SessionEvent>,
}

impl Dataset {
    pub fn lines(&self) -> Vec<Line> {
        let mut lines = vec![Line::Session(self.session.clone())];
        lines.extend(self.students.iter().cloned().map(Line::Student));
        lines.extend(self.tasks.iter().cloned().map(Line::Task));
        lines.extend(self.events.iter().cloned().map(Line::Event));
        lines
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for line in self.lines() {
            out.push_str(&serde_json::to_string(&line).expect("dataset lines serialise"));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Dataset, DatasetError> {
        let mut session = None;
        let (mut students, mut tasks, mut events) = (Vec::new(), Vec::new(), Vec::new());
        for (n, raw) in text.lines().enumerate() {
            if raw.trim().is_empty() {
                continue;
            }
            let line: Line =
                serde_json::from_str(raw).map_err(|e| DatasetError::Syntax { line: n + 1, message: e.to_string() })?;
            match line {
                Line::Session(s) => {
                    if session.replace(s).is_some() {
                        return Err(DatasetError::DuplicateSession { line: n + 1 });
                    }
                }
                Line::Student(s) => students.push(s),
                Line::Task(t) => tasks.push(t),
                Line::Event(e) => events.push(e),
            }
        }
        Ok(Dataset { session: session.ok_or(DatasetError::MissingSession)?, students, tasks, events })
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Dataset, DatasetError> {
        Dataset::parse(&std::fs::read_to_string(path)?)
    }

    pub fn student(&self, student_id: &str) -> Option<&StudentLine> {
        self.students.iter().find(|s| s.student_id == student_id)
    }

    /// Age of a student at the session date.
    pub fn age_of(&self, student_id: &str) -> Option<u32> {
        self.student(student_id).and_then(|s| s.age_on(self.session.date))
    }

    /// Task records recomputed from the event lines.
    pub fn replay_records(&self, rubric: &Rubric) -> Result<Vec<TaskRecord>, ReplayError> {
        let states = replay_events(self.students.iter().map(|s| s.student_id.as_str()), &self.events)?;
        Ok(records_of(&states, rubric))
    }
}

/// Builds the dataset of a log: derived task records plus every event.
pub fn export_dataset(log: &EventLog, rubric: &Rubric) -> Result<Dataset, DatasetError> {
    let info = log.session();
    let session = SessionLine {
        format: DATASET_FORMAT.to_string(),
        session_id: info.session_id.clone(),
        date: info.date,
        canton: info.canton.clone(),
        school: info.school.clone(),
        grade_level: info.grade_level.clone(),
        pseudonymised: false,
    };
    let students: Vec<StudentLine> = log
        .students()
        .iter()
        .map(|s| StudentLine {
            student_id: s.student_id.clone(),
            gender: s.gender.clone(),
            birth_date: Some(s.birth_date),
            age: None,
        })
        .collect();
    let tasks = super::derive_task_records(log, rubric)?;
    let mut events = Vec::with_capacity(log.events().len());
    for s in log.students() {
        events.extend(log.events().iter().filter(|e| e.student_id == s.student_id).cloned());
    }
    Ok(Dataset { session, students, tasks, events })
}

/// One replaced value; kept apart from the released dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingEntry {
    pub field: String,
    pub original: String,
    pub code: String,
}

fn code(salt: &str, prefix: &str, value: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(salt.as_bytes());
    hasher.update([0]);
    hasher.update(prefix.as_bytes());
    hasher.update([0]);
    hasher.update(value.as_bytes());
    format!("{prefix}-{}", &hex::encode(hasher.finalize())[..12])
}

/// Replaces school, canton, grade and student ids with salted codes and birth
/// dates with ages. Already pseudonymised datasets come back unchanged with
/// an empty mapping.
pub fn pseudonymise(dataset: &Dataset, salt: &str) -> (Dataset, Vec<MappingEntry>) {
    if dataset.session.pseudonymised {
        return (dataset.clone(), Vec::new());
    }
    let mut mapping = Vec::new();
    let mut replace = |field: &str, prefix: &str, value: &str| {
        let c = code(salt, prefix, value);
        mapping.push(MappingEntry { field: field.into(), original: value.into(), code: c.clone() });
        c
    };
    let s = &dataset.session;
    let session = SessionLine {
        format: s.format.clone(),
        session_id: s.session_id.clone(),
        date: s.date,
        canton: replace("canton", "K", &s.canton),
        school: replace("school", "S", &s.school),
        grade_level: replace("grade_level", "G", &s.grade_level),
        pseudonymised: true,
    };
    let ids: BTreeMap<String, String> = dataset
        .students
        .iter()
        .map(|st| (st.student_id.clone(), replace("student_id", "P", &st.student_id)))
        .collect();
    let rekey = |id: &str| ids.get(id).cloned().unwrap_or_else(|| code(salt, "P", id));
    let students = dataset
        .students
        .iter()
        .map(|st| StudentLine {
            student_id: rekey(&st.student_id),
            gender: st.gender.clone(),
            birth_date: None,
            age: st.age_on(s.date),
        })
        .collect();
    let tasks = dataset
        .tasks
        .iter()
        .map(|t| TaskRecord { student_id: rekey(&t.student_id), ..t.clone() })
        .collect();
    let events = dataset
        .events
        .iter()
        .map(|e| SessionEvent { student_id: rekey(&e.student_id), ..e.clone() })
        .collect();
    (Dataset { session, students, tasks, events }, mapping)
}
