//! Per-student state machine driven by session events. The service applies
//! events through it live; [`derive_task_records`] replays a finished log.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{EventKind, EventLog, Millis, SessionEvent, SurveyAnswer};
use crate::board::CrossBoard;
use crate::catalog::{self, Module};
use crate::interp::{ExecError, ExecState};
use crate::lang::{parse_command, Command, Program};
use crate::scorer::{
    cat_score, classify_dimension, derive_interaction, Artefact, InteractionSignal, Rubric, TaskOutcome,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskStatus {
    Active,
    Completed { success: bool },
    Surrendered,
    Abandoned,
}

impl TaskStatus {
    pub fn is_terminal(self) -> bool {
        self != TaskStatus::Active
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApplyError {
    #[error("there is no active task")]
    NoActiveTask,
    #[error("schema {0} is finished and read-only")]
    ReadOnly(String),
    #[error("{kind} is only available in the {required} interface")]
    WrongInterface { kind: &'static str, required: &'static str },
    #[error("invalid command: {0}")]
    InvalidCommand(String),
    #[error("no unconfirmed command at position {position} (there are {len})")]
    BadPosition { position: usize, len: usize },
    #[error("property `{property}` is `{found}`, not `{expected}`")]
    PropertyMismatch { property: String, expected: String, found: String },
    #[error("nothing to confirm")]
    NothingToConfirm,
    #[error("{module} schema {target} does not exist")]
    OutOfRange { module: Module, target: usize },
    #[error("the survey opens after every validation schema is finished")]
    SurveyBeforeCompletion,
    #[error("question `{0}` was already answered")]
    DuplicateAnswer(String),
    #[error("unknown student `{0}`")]
    UnknownStudent(String),
}

/// One schema as worked on by one student.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskState {
    pub module: Module,
    pub index: usize,
    pub schema_id: String,
    pub confirmed: Vec<Command>,
    pub pending: Vec<Command>,
    pub exec: ExecState,
    pub last_error: Option<ExecError>,
    pub status: TaskStatus,
    pub attempted: bool,
    pub entered_at: Millis,
    pub last_event_at: Millis,
    pub ended_at: Option<Millis>,
    signals: Vec<InteractionSignal>,
}

impl TaskState {
    fn new(module: Module, index: usize, at: Millis, interface: Artefact, feedback: bool) -> TaskState {
        let schema_id = catalog::entry(module, index).expect("index checked by caller").schema.id.clone();
        TaskState {
            module,
            index,
            schema_id,
            confirmed: Vec::new(),
            pending: Vec::new(),
            exec: ExecState::default(),
            last_error: None,
            status: TaskStatus::Active,
            attempted: false,
            entered_at: at,
            last_event_at: at,
            ended_at: None,
            signals: vec![InteractionSignal::Interface(interface), InteractionSignal::Feedback(feedback)],
        }
    }

    pub fn board(&self) -> &CrossBoard {
        self.exec.board()
    }

    pub fn program(&self) -> Program {
        Program::new(self.confirmed.clone())
    }

    pub fn signals(&self) -> &[InteractionSignal] {
        &self.signals
    }

    fn end(&mut self, status: TaskStatus, at: Millis) {
        self.status = status;
        self.ended_at = Some(at);
    }

    fn confirm(&mut self) {
        let pending = std::mem::take(&mut self.pending);
        self.last_error = None;
        let mut rest = pending.into_iter();
        for cmd in rest.by_ref() {
            match self.exec.execute(&cmd) {
                Ok(_) => self.confirmed.push(cmd),
                Err(e) => {
                    self.last_error = Some(e);
                    self.pending.push(cmd);
                    break;
                }
            }
        }
        self.pending.extend(rest);
    }

    fn pending_position(&self, position: usize) -> Result<(), ApplyError> {
        if position < self.pending.len() {
            Ok(())
        } else {
            Err(ApplyError::BadPosition { position, len: self.pending.len() })
        }
    }

    /// Summary of this task under `rubric`; scores only for solved validation tasks.
    pub fn outcome(&self, rubric: &Rubric) -> TaskOutcome {
        let solved = self.status == TaskStatus::Completed { success: true };
        let end = self.ended_at.unwrap_or(self.last_event_at);
        let dimension = classify_dimension(&self.program()).ok();
        let interaction = derive_interaction(&self.signals).ok();
        let score = match (solved, self.module, dimension, interaction) {
            (true, Module::Validation, Some(d), Some(i)) => cat_score(d, i, rubric).ok(),
            _ => None,
        };
        TaskOutcome {
            schema_id: self.schema_id.clone(),
            attempted: self.attempted,
            solved,
            surrendered: self.status == TaskStatus::Surrendered,
            duration: (end - self.entered_at) as f64 / 1000.0,
            dimension,
            interaction,
            score,
        }
    }
}

/// Everything the engine knows about one student.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StudentState {
    pub student_id: String,
    pub interface: Artefact,
    pub feedback: bool,
    pub current: Option<(Module, usize)>,
    tasks: BTreeMap<(Module, usize), TaskState>,
    order: Vec<(Module, usize)>,
    pub survey: BTreeMap<String, SurveyAnswer>,
}

impl StudentState {
    pub fn new(student_id: impl Into<String>) -> StudentState {
        StudentState {
            student_id: student_id.into(),
            interface: Artefact::G,
            feedback: false,
            current: None,
            tasks: BTreeMap::new(),
            order: Vec::new(),
            survey: BTreeMap::new(),
        }
    }

    pub fn current_task(&self) -> Option<&TaskState> {
        self.current.and_then(|k| self.tasks.get(&k))
    }

    pub fn task(&self, module: Module, index: usize) -> Option<&TaskState> {
        self.tasks.get(&(module, index))
    }

    /// Tasks in the order they were first entered.
    pub fn tasks(&self) -> impl Iterator<Item = &TaskState> {
        self.order.iter().map(|k| &self.tasks[k])
    }

    pub fn validation_finished(&self) -> bool {
        (1..=Module::Validation.len())
            .all(|i| self.task(Module::Validation, i).is_some_and(|t| t.status.is_terminal()))
    }

    fn enter(&mut self, module: Module, index: usize, at: Millis) {
        let key = (module, index);
        if !self.tasks.contains_key(&key) {
            self.tasks.insert(key, TaskState::new(module, index, at, self.interface, self.feedback));
            self.order.push(key);
        }
        self.current = Some(key);
    }

    fn advance(&mut self, at: Millis) {
        if let Some((module, index)) = self.current {
            if index < module.len() {
                self.enter(module, index + 1, at);
            }
        }
    }

    fn active_task(&mut self) -> Result<&mut TaskState, ApplyError> {
        let key = self.current.ok_or(ApplyError::NoActiveTask)?;
        let task = self.tasks.get_mut(&key).expect("current task exists");
        if task.status.is_terminal() {
            return Err(ApplyError::ReadOnly(task.schema_id.clone()));
        }
        Ok(task)
    }

    /// Schema the next event would be attributed to.
    pub fn schema_for(&self, kind: &EventKind) -> Option<String> {
        match kind {
            EventKind::Navigate { module, target } => catalog::entry(*module, *target).map(|e| e.schema.id.clone()),
            EventKind::SurveyAnswer { .. } => None,
            _ => self.current_task().map(|t| t.schema_id.clone()),
        }
    }

    /// Applies one event. On error the state is unchanged.
    pub fn apply(&mut self, kind: &EventKind, at: Millis) -> Result<(), ApplyError> {
        let mut next = self.clone();
        next.apply_in_place(kind, at)?;
        *self = next;
        Ok(())
    }

    fn apply_in_place(&mut self, kind: &EventKind, at: Millis) -> Result<(), ApplyError> {
        let interface = self.interface;
        let programming_only = |kind: &'static str| {
            if interface == Artefact::P {
                Ok(())
            } else {
                Err(ApplyError::WrongInterface { kind, required: "P" })
            }
        };
        match kind {
            EventKind::AddCommand { command } => {
                let cmd = parse_command(command).map_err(|e| ApplyError::InvalidCommand(e.to_string()))?;
                self.active_task()?.pending.push(cmd);
            }
            EventKind::ConfirmCommand => {
                let task = self.active_task()?;
                if task.pending.is_empty() {
                    return Err(ApplyError::NothingToConfirm);
                }
                task.confirm();
                task.signals.push(InteractionSignal::Confirm);
            }
            EventKind::RemoveCommand { position } => {
                let task = self.active_task()?;
                task.pending_position(*position)?;
                task.pending.remove(*position);
            }
            EventKind::ReorderCommands { from, to } => {
                programming_only(kind.name())?;
                let task = self.active_task()?;
                task.pending_position(*from)?;
                task.pending_position(*to)?;
                let cmd = task.pending.remove(*from);
                task.pending.insert(*to, cmd);
            }
            EventKind::ModifyProperty { position, property, old, new } => {
                programming_only(kind.name())?;
                let task = self.active_task()?;
                task.pending_position(*position)?;
                let cmd = &task.pending[*position];
                let slot = cmd
                    .parameters()
                    .iter()
                    .position(|p| p == property)
                    .ok_or_else(|| ApplyError::InvalidCommand(format!("{} has no property `{property}`", cmd.name())))?;
                let found = cmd.argument_texts()[slot].clone();
                if found != *old {
                    return Err(ApplyError::PropertyMismatch { property: property.clone(), expected: old.clone(), found });
                }
                let changed = cmd.with_argument(property, new).map_err(|e| ApplyError::InvalidCommand(e.to_string()))?;
                task.pending[*position] = changed;
            }
            EventKind::FeedbackToggle { enabled } => {
                self.feedback = *enabled;
                if let Ok(task) = self.active_task() {
                    task.signals.push(InteractionSignal::Feedback(*enabled));
                }
            }
            EventKind::InterfaceSwitch { interface } => {
                self.interface = *interface;
                if let Ok(task) = self.active_task() {
                    task.signals.push(InteractionSignal::Interface(*interface));
                }
            }
            EventKind::Retry => {
                let task = self.active_task()?;
                task.confirmed.clear();
                task.pending.clear();
                task.exec = ExecState::default();
                task.last_error = None;
            }
            EventKind::Surrender => {
                let task = self.active_task()?;
                task.signals.push(InteractionSignal::Surrender);
                task.end(TaskStatus::Surrendered, at);
                self.touch(at);
                self.advance(at);
                return Ok(());
            }
            EventKind::TaskCompleted { success } => {
                self.active_task()?.end(TaskStatus::Completed { success: *success }, at);
                self.touch(at);
                self.advance(at);
                return Ok(());
            }
            EventKind::TaskAbandoned => {
                self.active_task()?.end(TaskStatus::Abandoned, at);
            }
            EventKind::Navigate { module, target } => {
                if catalog::entry(*module, *target).is_none() {
                    return Err(ApplyError::OutOfRange { module: *module, target: *target });
                }
                self.enter(*module, *target, at);
            }
            EventKind::SurveyAnswer { answers } => {
                if !self.validation_finished() {
                    return Err(ApplyError::SurveyBeforeCompletion);
                }
                if let Some(q) = answers.keys().find(|q| self.survey.contains_key(*q)) {
                    return Err(ApplyError::DuplicateAnswer(q.clone()));
                }
                self.survey.extend(answers.iter().map(|(q, a)| (q.clone(), *a)));
                return Ok(());
            }
        }
        if kind.is_command_event() {
            if let Some(task) = self.current.and_then(|k| self.tasks.get_mut(&k)) {
                task.attempted = true;
            }
        }
        self.touch(at);
        Ok(())
    }

    fn touch(&mut self, at: Millis) {
        if let Some(task) = self.current.and_then(|k| self.tasks.get_mut(&k)) {
            task.last_event_at = task.last_event_at.max(at);
        }
    }
}

/// Per student and schema summary, as written to datasets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub student_id: String,
    pub module: Module,
    pub index: usize,
    #[serde(flatten)]
    pub outcome: TaskOutcome,
    /// The log ended while the task was still open.
    pub truncated: bool,
    pub board: CrossBoard,
    pub program: String,
}

impl TaskRecord {
    pub fn from_task(student_id: &str, task: &TaskState, rubric: &Rubric) -> TaskRecord {
        let mut outcome = task.outcome(rubric);
        let truncated = task.status == TaskStatus::Active && task.attempted;
        if task.status == TaskStatus::Active && !task.attempted {
            outcome.duration = 0.0;
        }
        TaskRecord {
            student_id: student_id.to_string(),
            module: task.module,
            index: task.index,
            outcome,
            truncated,
            board: *task.board(),
            program: task.program().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("event {seq} cannot be replayed: {error}")]
pub struct ReplayError {
    pub seq: u64,
    pub error: ApplyError,
}

/// Replays events in log order over fresh states for `students`, returned in
/// the same order.
pub fn replay_events<'a>(
    students: impl IntoIterator<Item = &'a str>,
    events: impl IntoIterator<Item = &'a SessionEvent>,
) -> Result<Vec<StudentState>, ReplayError> {
    let mut states: Vec<StudentState> = students.into_iter().map(StudentState::new).collect();
    for event in events {
        let state = states.iter_mut().find(|s| s.student_id == event.student_id).ok_or_else(|| ReplayError {
            seq: event.seq,
            error: ApplyError::UnknownStudent(event.student_id.clone()),
        })?;
        state.apply(&event.kind, event.timestamp).map_err(|error| ReplayError { seq: event.seq, error })?;
    }
    Ok(states)
}

pub fn replay(log: &EventLog) -> Result<Vec<StudentState>, ReplayError> {
    replay_events(log.students().iter().map(|s| s.student_id.as_str()), log.events())
}

pub fn records_of(states: &[StudentState], rubric: &Rubric) -> Vec<TaskRecord> {
    states
        .iter()
        .flat_map(|s| s.tasks().map(|t| TaskRecord::from_task(&s.student_id, t, rubric)).collect::<Vec<_>>())
        .collect()
}

/// One record per (student, schema) the student entered.
pub fn derive_task_records(log: &EventLog, rubric: &Rubric) -> Result<Vec<TaskRecord>, ReplayError> {
    Ok(records_of(&replay(log)?, rubric))
}
