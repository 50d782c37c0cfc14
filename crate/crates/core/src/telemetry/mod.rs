//! Timestamped session logs, task-record derivation and dataset export.

mod dataset;
mod replay;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::Module;
use crate::lang::parse_command;
use crate::scorer::Artefact;

pub use dataset::{
    export_dataset, pseudonymise, Dataset, DatasetError, Line, MappingEntry, SessionLine, StudentLine,
    DATASET_EXTENSION, DATASET_FORMAT,
};
pub use replay::{
    derive_task_records, records_of, replay, replay_events, ApplyError, ReplayError, StudentState, TaskRecord, TaskState, TaskStatus};

/// Milliseconds on the engine clock.
pub type Millis = i64;

/// Largest backwards clock step that is silently re-stamped.
pub const SKEW_TOLERANCE_MS: Millis = 1_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionInfo {
    pub session_id: String,
    pub date: NaiveDate,
    pub canton: String,
    pub school: String,
    pub grade_level: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudentInfo {
    pub student_id: String,
    pub gender: String,
    pub birth_date: NaiveDate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurveyAnswer {
    Happy,
    Neutral,
    Sad,
}

/// Event kind with its payload.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EventKind {
    /// Canonical text of one command added to the draft.
    AddCommand { command: String },
    ConfirmCommand,
    /// Position in the unconfirmed part of the draft.
    RemoveCommand { position: usize },
    ReorderCommands { from: usize, to: usize },
    ModifyProperty { position: usize, property: String, old: String, new: String },
    FeedbackToggle { enabled: bool },
    InterfaceSwitch { interface: Artefact },
    Retry,
    Surrender,
    Navigate { module: Module, target: usize },
    TaskCompleted { success: bool },
    TaskAbandoned,
    /// Answers of one survey submission, by question id.
    SurveyAnswer { answers: BTreeMap<String, SurveyAnswer> },
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::AddCommand { .. } => "ADD_COMMAND",
            EventKind::ConfirmCommand => "CONFIRM_COMMAND",
            EventKind::RemoveCommand { .. } => "REMOVE_COMMAND",
            EventKind::ReorderCommands { .. } => "REORDER_COMMANDS",
            EventKind::ModifyProperty { .. } => "MODIFY_PROPERTY",
            EventKind::FeedbackToggle { .. } => "FEEDBACK_TOGGLE",
            EventKind::InterfaceSwitch { .. } => "INTERFACE_SWITCH",
            EventKind::Retry => "RETRY",
            EventKind::Surrender => "SURRENDER",
            EventKind::Navigate { .. } => "NAVIGATE",
            EventKind::TaskCompleted { .. } => "TASK_COMPLETED",
            EventKind::TaskAbandoned => "TASK_ABANDONED",
            EventKind::SurveyAnswer { .. } => "SURVEY_ANSWER",
        }
    }

    /// Events that edit or run the draft program.
    pub fn is_command_event(&self) -> bool {
        matches!(
            self,
            EventKind::AddCommand { .. }
                | EventKind::ConfirmCommand
                | EventKind::RemoveCommand { .. }
                | EventKind::ReorderCommands { .. }
                | EventKind::ModifyProperty { .. }
        )
    }

    /// Checks that do not depend on student state.
    pub fn check_payload(&self) -> Result<(), LogError> {
        let malformed = |m: String| Err(LogError::Malformed { kind: self.name(), message: m });
        match self {
            EventKind::AddCommand { command } => {
                if let Err(e) = parse_command(command) {
                    return malformed(e.to_string());
                }
            }
            EventKind::ModifyProperty { property, new, .. } if property.is_empty() || new.is_empty() => {
                return malformed("property and new value are required".into());
            }
            EventKind::Navigate { target: 0, .. } => return malformed("schema indices start at 1".into()),
            EventKind::SurveyAnswer { answers } if answers.is_empty() || answers.keys().any(String::is_empty) => {
                return malformed("at least one answer with a question id is required".into());
            }
            _ => {}
        }
        Ok(())
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionEvent {
    /// Position in the session log.
    pub seq: u64,
    pub timestamp: Millis,
    pub student_id: String,
    pub schema_id: Option<String>,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogError {
    #[error("the log is closed")]
    Closed,
    #[error("unknown student `{0}`")]
    UnknownStudent(String),
    #[error("duplicate student `{0}`")]
    DuplicateStudent(String),
    #[error("malformed {kind} payload: {message}")]
    Malformed { kind: &'static str, message: String },
    #[error("timestamp {got} is {behind} ms behind the last event of `{student}`")]
    ClockSkew { student: String, got: Millis, behind: Millis },
}

/// Append-only event log of one session.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventLog {
    session: SessionInfo,
    students: Vec<StudentInfo>,
    events: Vec<SessionEvent>,
    last_timestamp: HashMap<String, Millis>,
    closed: bool,
}

impl EventLog {
    pub fn new(session: SessionInfo) -> EventLog {
        EventLog { session, students: Vec::new(), events: Vec::new(), last_timestamp: HashMap::new(), closed: false }
    }

    pub fn session(&self) -> &SessionInfo {
        &self.session
    }

    pub fn students(&self) -> &[StudentInfo] {
        &self.students
    }

    pub fn events(&self) -> &[SessionEvent] {
        &self.events
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn close(&mut self) {
        self.closed = true;
    }

    pub fn add_student(&mut self, student: StudentInfo) -> Result<(), LogError> {
        if self.closed {
            return Err(LogError::Closed);
        }
        if self.students.iter().any(|s| s.student_id == student.student_id) {
            return Err(LogError::DuplicateStudent(student.student_id));
        }
        self.students.push(student);
        Ok(())
    }

    pub fn student(&self, student_id: &str) -> Option<&StudentInfo> {
        self.students.iter().find(|s| s.student_id == student_id)
    }

    /// The timestamp an event observed at `observed` would be stored with.
    pub fn stamp(&self, student_id: &str, observed: Millis) -> Result<Millis, LogError> {
        if self.closed {
            return Err(LogError::Closed);
        }
        if self.student(student_id).is_none() {
            return Err(LogError::UnknownStudent(student_id.to_string()));
        }
        match self.last_timestamp.get(student_id) {
            Some(&last) if observed < last => {
                let behind = last - observed;
                if behind <= SKEW_TOLERANCE_MS {
                    Ok(last)
                } else {
                    Err(LogError::ClockSkew { student: student_id.to_string(), got: observed, behind })
                }
            }
            _ => Ok(observed),
        }
    }

    /// Appends an event, re-stamping small backwards clock steps.
    pub fn record_event(
        &mut self,
        student_id: &str,
        schema_id: Option<String>,
        kind: EventKind,
        observed: Millis,
    ) -> Result<&SessionEvent, LogError> {
        let timestamp = self.stamp(student_id, observed)?;
        kind.check_payload()?;
        self.last_timestamp.insert(student_id.to_string(), timestamp);
        let seq = self.events.len() as u64;
        self.events.push(SessionEvent { seq, timestamp, student_id: student_id.to_string(), schema_id, kind });
        Ok(self.events.last().expect("just pushed"))
    }

    /// Rebuilds a log from stored parts, re-checking every event.
    pub fn from_parts(
        session: SessionInfo,
        students: Vec<StudentInfo>,
        events: Vec<SessionEvent>,
        closed: bool,
    ) -> Result<EventLog, LogError> {
        let mut log = EventLog::new(session);
        for s in students {
            log.add_student(s)?;
        }
        for e in events {
            let stored = log.record_event(&e.student_id, e.schema_id.clone(), e.kind.clone(), e.timestamp)?;
            if stored.timestamp != e.timestamp {
                return Err(LogError::ClockSkew { student: e.student_id, got: e.timestamp, behind: stored.timestamp - e.timestamp });
            }
        }
        log.closed = closed;
        Ok(log)
    }
}
