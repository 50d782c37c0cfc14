#![allow(dead_code)]

use std::sync::Arc;

use axum::body::{to_bytes, Body};
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use cat_service::{router, Engine, EngineConfig, ManualClock};
use serde_json::{json, Value};
use tower::ServiceExt;

pub struct Api {
    pub router: Router,
    pub engine: Arc<Engine>,
    pub clock: Arc<ManualClock>,
}

impl Api {
    pub fn new() -> Api {
        Api::with_config(EngineConfig::default())
    }

    pub fn with_config(config: EngineConfig) -> Api {
        let clock = Arc::new(ManualClock::new(1_700_000_000_000));
        let engine = Arc::new(Engine::new(config, clock.clone()));
        Api { router: router(engine.clone()), engine, clock }
    }

    pub async fn raw(&self, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, String) {
        let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
        let req = req.body(body.map(|b| Body::from(b.to_string())).unwrap_or_else(Body::empty)).unwrap();
        let resp = self.router.clone().oneshot(req).await.unwrap();
        let status = resp.status();
        let bytes = to_bytes(resp.into_body(), usize::MAX).await.unwrap();
        (status, String::from_utf8(bytes.to_vec()).unwrap())
    }

    pub async fn call(&self, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
        let (status, text) = self.raw(method, uri, body).await;
        (status, serde_json::from_str(&text).unwrap_or(Value::String(text)))
    }

    pub async fn post(&self, uri: &str, body: Value) -> (StatusCode, Value) {
        self.call(Method::POST, uri, Some(body)).await
    }

    pub async fn get(&self, uri: &str) -> (StatusCode, Value) {
        self.call(Method::GET, uri, None).await
    }

    pub async fn session(&self, allow_programming: bool) -> String {
        let form = json!({"date": "2023-03-15", "canton": "Ticino", "school": "Scuola Elementare Sorengo",
                          "grade_level": "5", "allow_programming": allow_programming});
        let (status, body) = self.post("/sessions", form).await;
        assert_eq!(status, StatusCode::CREATED, "{body}");
        body["session_id"].as_str().unwrap().to_string()
    }

    pub async fn student(&self, session: &str, birth_date: &str) -> String {
        let (status, body) =
            self.post(&format!("/sessions/{session}/students"), json!({"gender": "f", "birth_date": birth_date})).await;
        assert_eq!(status, StatusCode::CREATED, "{body}");
        body["student_id"].as_str().unwrap().to_string()
    }

    pub async fn act(&self, student: &str, kind: &str, payload: Option<Value>) -> (StatusCode, Value) {
        let mut body = json!({"kind": kind});
        if let Some(p) = payload {
            body["payload"] = p;
        }
        self.post(&format!("/students/{student}/actions"), body).await
    }

    pub async fn go(&self, student: &str, target: usize) -> (StatusCode, Value) {
        self.post(&format!("/students/{student}/navigate"), json!({"target": target})).await
    }

    /// Adds and confirms one command, then reports the task as done.
    pub async fn solve_with(&self, student: &str, program: &str) -> Value {
        for line in program.lines() {
            let (s, b) = self.act(student, "ADD_COMMAND", Some(json!({"command": line}))).await;
            assert_eq!(s, StatusCode::OK, "{b}");
        }
        let (s, b) = self.act(student, "CONFIRM_COMMAND", None).await;
        assert_eq!(s, StatusCode::OK, "{b}");
        let (s, b) = self.act(student, "TASK_COMPLETED", None).await;
        assert_eq!(s, StatusCode::OK, "{b}");
        b
    }
}
