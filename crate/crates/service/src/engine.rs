//! Session bookkeeping behind the HTTP routes. Every student owns a mutex,
//! so requests of one student run one at a time while different students
//! proceed in parallel; the session log lock is only held while stamping
//! and appending.

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;
use std::sync::{Arc, Mutex, MutexGuard, RwLock};

use cat_core::board::board_to_cell_map;
use cat_core::catalog::{self, Module};
use cat_core::interp::ExecError;
use cat_core::scorer::{
    cat_score, check_success, classify_dimension, derive_interaction, AlgorithmDimension, Artefact, CatScore, Rubric,
};
use cat_core::telemetry::{
    export_dataset, pseudonymise, ApplyError, Dataset, EventKind, EventLog, LogError, MappingEntry, SessionInfo,
    StudentInfo, StudentState, SurveyAnswer, TaskState, TaskStatus, DATASET_EXTENSION,
};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;
use uuid::Uuid;

use crate::clock::{Clock, SystemClock};
use crate::labels::{labels, Labels, Lang};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ServiceError {
    #[error("missing or invalid fields: {}", fields.join(", "))]
    Validation { fields: Vec<String>, message: String },
    #[error("{0} not found")]
    NotFound(String),
    #[error("{0}")]
    Conflict(String),
    #[error("{0}")]
    Forbidden(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Internal(String),
}

impl ServiceError {
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::Validation { .. } => "validation",
            ServiceError::NotFound(_) => "not_found",
            ServiceError::Conflict(_) => "conflict",
            ServiceError::Forbidden(_) => "forbidden",
            ServiceError::Invalid(_) => "invalid",
            ServiceError::Internal(_) => "internal",
        }
    }
}

impl From<ApplyError> for ServiceError {
    fn from(e: ApplyError) -> ServiceError {
        let msg = e.to_string();
        match e {
            ApplyError::InvalidCommand(_) | ApplyError::BadPosition { .. } | ApplyError::OutOfRange { .. } => {
                ServiceError::Invalid(msg)
            }
            ApplyError::UnknownStudent(id) => ServiceError::NotFound(format!("student `{id}`")),
            _ => ServiceError::Conflict(msg),
        }
    }
}

impl From<LogError> for ServiceError {
    fn from(e: LogError) -> ServiceError {
        let msg = e.to_string();
        match e {
            LogError::Closed => ServiceError::Conflict("the session is closed".into()),
            LogError::UnknownStudent(id) => ServiceError::NotFound(format!("student `{id}`")),
            LogError::Malformed { .. } => ServiceError::Invalid(msg),
            LogError::DuplicateStudent(_) | LogError::ClockSkew { .. } => ServiceError::Conflict(msg),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub rubric: Rubric,
    /// Closed sessions are written here as datasets.
    pub data_dir: Option<PathBuf>,
    pub salt: String,
}

impl Default for EngineConfig {
    fn default() -> EngineConfig {
        EngineConfig { rubric: Rubric::default(), data_dir: None, salt: Uuid::new_v4().to_string() }
    }
}

/// Student actions accepted on `/students/{id}/actions`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Action {
    AddCommand { command: String },
    ConfirmCommand,
    RemoveCommand { position: usize },
    ReorderCommands { from: usize, to: usize },
    ModifyProperty { position: usize, property: String, old: String, new: String },
    FeedbackToggle { enabled: bool },
    InterfaceSwitch { interface: Artefact },
    Retry,
    Surrender,
    /// The engine decides whether the board matches.
    TaskCompleted,
    TaskAbandoned,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionRequest {
    /// Client sequence number; a number at or below the last accepted one is a replay.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seq: Option<u64>,
    #[serde(flatten)]
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NavigateRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seq: Option<u64>,
    #[serde(default = "validation")]
    pub module: Module,
    pub target: usize,
}

fn validation() -> Module {
    Module::Validation
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seq: Option<u64>,
    pub answers: BTreeMap<String, SurveyAnswer>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionCreated {
    pub session_id: String,
    pub allow_programming: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudentRegistered {
    pub student_id: String,
    pub session_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionClosed {
    pub session_id: String,
    pub events: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stored_at: Option<String>,
}

/// The colouring cross, only present while visual feedback is on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Colouring {
    pub cells: Value,
    pub coloured: usize,
    pub matches_reference: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskView {
    pub module: Module,
    pub index: usize,
    pub total: usize,
    pub schema_id: String,
    pub instructions: String,
    pub status: TaskStatus,
    pub read_only: bool,
    pub reference: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colouring: Option<Colouring>,
    pub confirmed: Vec<String>,
    pub pending: Vec<String>,
    pub error: Option<ExecError>,
    pub dimension: Option<AlgorithmDimension>,
    pub score: Option<CatScore>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct View {
    pub student_id: String,
    pub lang: Lang,
    pub labels: Labels,
    pub interface: Artefact,
    pub feedback: bool,
    pub allow_programming: bool,
    pub task: Option<TaskView>,
    pub survey_open: bool,
    pub survey: BTreeMap<String, SurveyAnswer>,
    /// True when the request was a replay and changed nothing.
    #[serde(default)]
    pub duplicate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Correct,
    Incorrect,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DashboardRow {
    pub index: usize,
    pub schema_id: String,
    pub reference: Value,
    pub produced: Value,
    pub status: RowStatus,
    pub score: Option<CatScore>,
    /// Seconds.
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dashboard {
    pub student_id: String,
    pub rows: Vec<DashboardRow>,
    pub total_score: u32,
}

struct Session {
    allow_programming: bool,
    log: Mutex<EventLog>,
}

struct Student {
    session: Arc<Session>,
    inner: Mutex<Inner>,
}

struct Inner {
    state: StudentState,
    last_seq: Option<u64>,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

pub struct Engine {
    clock: Arc<dyn Clock>,
    config: EngineConfig,
    sessions: RwLock<HashMap<String, Arc<Session>>>,
    students: RwLock<HashMap<String, Arc<Student>>>,
}

impl Default for Engine {
    fn default() -> Engine {
        Engine::new(EngineConfig::default(), Arc::new(SystemClock))
    }
}

/// Copies the listed string fields of a form, collecting the missing ones.
fn take_fields(form: &Value, names: &[&str]) -> Result<Map<String, Value>, ServiceError> {
    let obj = form.as_object().ok_or_else(|| ServiceError::Validation {
        fields: names.iter().map(|s| s.to_string()).collect(),
        message: "expected a JSON object".into(),
    })?;
    let mut out = Map::new();
    let mut missing = Vec::new();
    for &name in names {
        match obj.get(name) {
            Some(Value::String(s)) if !s.trim().is_empty() => {
                out.insert(name.into(), Value::String(s.trim().to_string()));
            }
            Some(Value::Number(n)) => {
                out.insert(name.into(), Value::String(n.to_string()));
            }
            _ => missing.push(name.to_string()),
        }
    }
    if missing.is_empty() {
        Ok(out)
    } else {
        let message = format!("required: {}", missing.join(", "));
        Err(ServiceError::Validation { fields: missing, message })
    }
}

fn invalid_date(field: &str, e: serde_json::Error) -> ServiceError {
    ServiceError::Validation { fields: vec![field.into()], message: format!("{field}: {e} (expected YYYY-MM-DD)") }
}

impl Engine {
    pub fn new(config: EngineConfig, clock: Arc<dyn Clock>) -> Engine {
        Engine { clock, config, sessions: RwLock::default(), students: RwLock::default() }
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    fn session(&self, id: &str) -> Result<Arc<Session>, ServiceError> {
        let map = self.sessions.read().unwrap_or_else(|p| p.into_inner());
        map.get(id).cloned().ok_or_else(|| ServiceError::NotFound(format!("session `{id}`")))
    }

    fn student(&self, id: &str) -> Result<Arc<Student>, ServiceError> {
        let map = self.students.read().unwrap_or_else(|p| p.into_inner());
        map.get(id).cloned().ok_or_else(|| ServiceError::NotFound(format!("student `{id}`")))
    }

    /// Opens a session from a form with `date`, `canton`, `school` and
    /// `grade_level`; `allow_programming` defaults to true.
    pub fn create_session(&self, form: &Value) -> Result<SessionCreated, ServiceError> {
        let mut fields = take_fields(form, &["date", "canton", "school", "grade_level"])?;
        let allow_programming = match form.get("allow_programming") {
            None | Some(Value::Null) => true,
            Some(Value::Bool(b)) => *b,
            Some(_) => {
                return Err(ServiceError::Validation {
                    fields: vec!["allow_programming".into()],
                    message: "allow_programming must be a boolean".into(),
                })
            }
        };
        let session_id = Uuid::new_v4().to_string();
        fields.insert("session_id".into(), Value::String(session_id.clone()));
        let info: SessionInfo = serde_json::from_value(Value::Object(fields)).map_err(|e| invalid_date("date", e))?;
        let session = Session { allow_programming, log: Mutex::new(EventLog::new(info)) };
        self.sessions.write().unwrap_or_else(|p| p.into_inner()).insert(session_id.clone(), Arc::new(session));
        Ok(SessionCreated { session_id, allow_programming })
    }

    /// Registers a student from a form with `gender` and `birth_date`.
    pub fn register_student(&self, session_id: &str, form: &Value) -> Result<StudentRegistered, ServiceError> {
        let session = self.session(session_id)?;
        let mut fields = take_fields(form, &["gender", "birth_date"])?;
        let student_id = Uuid::new_v4().to_string();
        fields.insert("student_id".into(), Value::String(student_id.clone()));
        let info: StudentInfo =
            serde_json::from_value(Value::Object(fields)).map_err(|e| invalid_date("birth_date", e))?;
        lock(&session.log).add_student(info)?;
        let student = Student {
            session: session.clone(),
            inner: Mutex::new(Inner { state: StudentState::new(student_id.clone()), last_seq: None }),
        };
        self.students.write().unwrap_or_else(|p| p.into_inner()).insert(student_id.clone(), Arc::new(student));
        Ok(StudentRegistered { student_id, session_id: session_id.to_string() })
    }

    /// Closes the log; with a data directory the dataset is written there.
    pub fn close_session(&self, session_id: &str) -> Result<SessionClosed, ServiceError> {
        let session = self.session(session_id)?;
        let mut log = lock(&session.log);
        if log.is_closed() {
            return Err(ServiceError::Conflict("the session is already closed".into()));
        }
        let mut closed = log.clone();
        closed.close();
        let mut stored_at = None;
        if let Some(dir) = &self.config.data_dir {
            let dataset = export_dataset(&closed, &self.config.rubric).map_err(|e| ServiceError::Internal(e.to_string()))?;
            std::fs::create_dir_all(dir).map_err(|e| ServiceError::Internal(e.to_string()))?;
            let path = dir.join(format!("{session_id}.{DATASET_EXTENSION}"));
            std::fs::write(&path, dataset.to_jsonl()).map_err(|e| ServiceError::Internal(e.to_string()))?;
            stored_at = Some(path.display().to_string());
        }
        let events = closed.events().len();
        *log = closed;
        Ok(SessionClosed { session_id: session_id.to_string(), events, stored_at })
    }

    /// Dataset of a closed session, optionally pseudonymised.
    pub fn export(&self, session_id: &str, pseudo: bool) -> Result<Dataset, ServiceError> {
        Ok(self.export_with_mapping(session_id, pseudo)?.0)
    }

    pub fn export_with_mapping(
        &self,
        session_id: &str,
        pseudo: bool,
    ) -> Result<(Dataset, Vec<MappingEntry>), ServiceError> {
        let session = self.session(session_id)?;
        let log = lock(&session.log).clone();
        if !log.is_closed() {
            return Err(ServiceError::Conflict("session still active".into()));
        }
        let dataset = export_dataset(&log, &self.config.rubric).map_err(|e| ServiceError::Internal(e.to_string()))?;
        Ok(if pseudo { pseudonymise(&dataset, &self.config.salt) } else { (dataset, Vec::new()) })
    }

    /// Snapshot of a session log.
    pub fn session_log(&self, session_id: &str) -> Result<EventLog, ServiceError> {
        Ok(lock(&self.session(session_id)?.log).clone())
    }

    /// Snapshot of a student's live state.
    pub fn student_state(&self, student_id: &str) -> Result<StudentState, ServiceError> {
        Ok(lock(&self.student(student_id)?.inner).state.clone())
    }

    pub fn submit_action(&self, student_id: &str, request: ActionRequest, lang: Lang) -> Result<View, ServiceError> {
        self.mutate(student_id, request.seq, lang, |state, session| {
            Ok(match request.action {
                Action::AddCommand { command } => EventKind::AddCommand { command },
                Action::ConfirmCommand => EventKind::ConfirmCommand,
                Action::RemoveCommand { position } => EventKind::RemoveCommand { position },
                Action::ReorderCommands { from, to } => EventKind::ReorderCommands { from, to },
                Action::ModifyProperty { position, property, old, new } => {
                    EventKind::ModifyProperty { position, property, old, new }
                }
                Action::FeedbackToggle { enabled } => EventKind::FeedbackToggle { enabled },
                Action::InterfaceSwitch { interface } => {
                    if interface == Artefact::P && !session.allow_programming {
                        return Err(ServiceError::Forbidden(
                            "the programming interface is disabled for this session".into(),
                        ));
                    }
                    EventKind::InterfaceSwitch { interface }
                }
                Action::Retry => EventKind::Retry,
                Action::Surrender => EventKind::Surrender,
                Action::TaskCompleted => {
                    let success = state.current_task().is_some_and(|t| {
                        catalog::find(&t.schema_id).is_some_and(|e| check_success(t.board(), &e.schema))
                    });
                    EventKind::TaskCompleted { success }
                }
                Action::TaskAbandoned => EventKind::TaskAbandoned,
            })
        })
    }

    pub fn navigate(&self, student_id: &str, request: NavigateRequest, lang: Lang) -> Result<View, ServiceError> {
        self.mutate(student_id, request.seq, lang, |_, _| {
            if catalog::entry(request.module, request.target).is_none() {
                return Err(ServiceError::Invalid(format!(
                    "{} schema {} does not exist (1 to {})",
                    request.module,
                    request.target,
                    request.module.len()
                )));
            }
            Ok(EventKind::Navigate { module: request.module, target: request.target })
        })
    }

    pub fn submit_survey(&self, student_id: &str, request: SurveyRequest, lang: Lang) -> Result<View, ServiceError> {
        self.mutate(student_id, request.seq, lang, |_, _| {
            if request.answers.is_empty() || request.answers.keys().any(|q| q.trim().is_empty()) {
                return Err(ServiceError::Validation {
                    fields: vec!["answers".into()],
                    message: "at least one answer keyed by question id is required".into(),
                });
            }
            Ok(EventKind::SurveyAnswer { answers: request.answers })
        })
    }

    /// Applies one event and logs it; nothing changes if either step fails.
    fn mutate(
        &self,
        student_id: &str,
        seq: Option<u64>,
        lang: Lang,
        event: impl FnOnce(&StudentState, &Session) -> Result<EventKind, ServiceError>,
    ) -> Result<View, ServiceError> {
        let student = self.student(student_id)?;
        let mut inner = lock(&student.inner);
        if let (Some(seq), Some(last)) = (seq, inner.last_seq) {
            if seq <= last {
                let mut view = self.build_view(&inner.state, &student.session, lang);
                view.duplicate = true;
                return Ok(view);
            }
        }
        let kind = event(&inner.state, &student.session)?;
        let mut log = lock(&student.session.log);
        let at = log.stamp(student_id, self.clock.now())?;
        kind.check_payload()?;
        let schema_id = inner.state.schema_for(&kind);
        let mut next = inner.state.clone();
        next.apply(&kind, at)?;
        log.record_event(student_id, schema_id, kind, at)?;
        drop(log);
        inner.state = next;
        if seq.is_some() {
            inner.last_seq = seq;
        }
        Ok(self.build_view(&inner.state, &student.session, lang))
    }

    pub fn view(&self, student_id: &str, lang: Lang) -> Result<View, ServiceError> {
        let student = self.student(student_id)?;
        let inner = lock(&student.inner);
        Ok(self.build_view(&inner.state, &student.session, lang))
    }

    fn build_view(&self, state: &StudentState, session: &Session, lang: Lang) -> View {
        View {
            student_id: state.student_id.clone(),
            lang,
            labels: labels(lang),
            interface: state.interface,
            feedback: state.feedback,
            allow_programming: session.allow_programming,
            task: state.current_task().map(|t| self.task_view(t, state.feedback)),
            survey_open: state.validation_finished(),
            survey: state.survey.clone(),
            duplicate: false,
        }
    }

    fn task_view(&self, task: &TaskState, feedback: bool) -> TaskView {
        let entry = catalog::entry(task.module, task.index).expect("tasks come from the catalogue");
        let colouring = feedback.then(|| Colouring {
            cells: board_to_cell_map(task.board()),
            coloured: task.board().coloured_count(),
            matches_reference: check_success(task.board(), &entry.schema),
        });
        let dimension = classify_dimension(&task.program()).ok();
        let score = match (task.module, task.status) {
            (Module::Training, _) => None,
            (Module::Validation, TaskStatus::Active) => dimension
                .zip(derive_interaction(task.signals()).ok())
                .and_then(|(d, i)| cat_score(d, i, &self.config.rubric).ok()),
            (Module::Validation, _) => task.outcome(&self.config.rubric).score,
        };
        TaskView {
            module: task.module,
            index: task.index,
            total: task.module.len(),
            schema_id: task.schema_id.clone(),
            instructions: entry.instructions.to_string(),
            status: task.status,
            read_only: task.status.is_terminal(),
            reference: board_to_cell_map(&entry.schema.cells),
            colouring,
            confirmed: task.confirmed.iter().map(ToString::to_string).collect(),
            pending: task.pending.iter().map(ToString::to_string).collect(),
            error: task.last_error.clone(),
            dimension,
            score,
        }
    }

    /// One row per validation schema the student has entered, by index.
    pub fn dashboard(&self, student_id: &str) -> Result<Dashboard, ServiceError> {
        let state = self.student_state(student_id)?;
        let mut tasks: Vec<&TaskState> = state.tasks().filter(|t| t.module == Module::Validation).collect();
        tasks.sort_by_key(|t| t.index);
        let rows: Vec<DashboardRow> = tasks
            .into_iter()
            .map(|t| {
                let outcome = t.outcome(&self.config.rubric);
                let entry = catalog::entry(t.module, t.index).expect("tasks come from the catalogue");
                let status = if outcome.solved {
                    RowStatus::Correct
                } else if outcome.surrendered || !outcome.attempted {
                    RowStatus::Skipped
                } else {
                    RowStatus::Incorrect
                };
                DashboardRow {
                    index: t.index,
                    schema_id: t.schema_id.clone(),
                    reference: board_to_cell_map(&entry.schema.cells),
                    produced: board_to_cell_map(t.board()),
                    status,
                    score: outcome.score,
                    duration: outcome.duration,
                }
            })
            .collect();
        let total_score = rows.iter().filter_map(|r| r.score.as_ref()).map(|s| s.total).sum();
        Ok(Dashboard { student_id: student_id.to_string(), rows, total_score })
    }
}
