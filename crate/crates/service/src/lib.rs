//! HTTP session service for the Cross Array Task engine.

pub mod api;
pub mod clock;
pub mod engine;
pub mod labels;

use std::sync::Arc;

pub use api::{router, ErrorBody};
pub use clock::{Clock, ManualClock, SystemClock};
pub use engine::{
    Action, ActionRequest, Colouring, Dashboard, DashboardRow, Engine, EngineConfig, NavigateRequest, RowStatus,
    ServiceError, SessionClosed, SessionCreated, StudentRegistered, SurveyRequest, TaskView, View,
};
pub use labels::{labels, Labels, Lang};

/// Serves the API on `listener` until the process stops.
pub async fn serve(listener: tokio::net::TcpListener, engine: Arc<Engine>) -> std::io::Result<()> {
    axum::serve(listener, router(engine)).await
}
