mod common;

use axum::http::{Method, StatusCode};
use cat_core::catalog::{self, Module};
use cat_core::telemetry::{replay, Dataset};
use cat_service::EngineConfig;
use common::Api;
use serde_json::json;

#[tokio::test]
async fn session_form_validation() {
    let api = Api::new();
    let (s, b) = api.post("/sessions", json!({"date": "2023-03-15", "school": "X", "grade_level": "4"})).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(b["error"], "validation");
    assert_eq!(b["fields"], json!(["canton"]));
    let (s, b) = api.post("/sessions", json!([1, 2])).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY, "{b}");
    let (s, _) = api.raw(Method::POST, "/sessions", None).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    let session = api.session(true).await;
    let (s, b) = api.post(&format!("/sessions/{session}/students"), json!({"gender": "m"})).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(b["fields"], json!(["birth_date"]));
    let (s, _) = api.post("/sessions/unknown/students", json!({"gender": "m", "birth_date": "2015-01-01"})).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn duplicate_registration_gets_new_id() {
    let api = Api::new();
    let session = api.session(true).await;
    let a = api.student(&session, "2015-01-01").await;
    let b = api.student(&session, "2015-01-01").await;
    assert_ne!(a, b);
    let (s, v) = api.get(&format!("/students/{a}/view")).await;
    assert_eq!(s, StatusCode::OK);
    assert!(v["task"].is_null());
    let (s, _) = api.get("/students/ghost/view").await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn fill_empty_colours_all_twenty_cells() {
    let api = Api::new();
    let session = api.session(true).await;
    let st = api.student(&session, "2014-06-01").await;
    api.go(&st, 1).await;
    api.act(&st, "FEEDBACK_TOGGLE", Some(json!({"enabled": true}))).await;
    api.act(&st, "ADD_COMMAND", Some(json!({"command": "fillEmpty(blue)"}))).await;
    let (s, v) = api.act(&st, "CONFIRM_COMMAND", None).await;
    assert_eq!(s, StatusCode::OK);
    let colouring = &v["task"]["colouring"];
    assert_eq!(colouring["coloured"], 20);
    assert_eq!(colouring["matches_reference"], false);
    let (_, v) = api.act(&st, "TASK_COMPLETED", None).await;
    assert_eq!(v["task"]["index"], 2);
    let state = api.engine.student_state(&st).unwrap();
    let first = state.task(Module::Validation, 1).unwrap();
    assert_eq!(serde_json::to_value(first.status).unwrap(), json!({"completed": {"success": false}}));
}

#[tokio::test]
async fn feedback_toggle_reveals_colouring_board() {
    let api = Api::new();
    let session = api.session(true).await;
    let st = api.student(&session, "2014-06-01").await;
    let (_, v) = api.go(&st, 3).await;
    assert!(v["task"].get("colouring").is_none());
    assert!(v["task"]["reference"].is_object());
    let (_, v) = api.act(&st, "FEEDBACK_TOGGLE", Some(json!({"enabled": true}))).await;
    assert_eq!(v["task"]["colouring"]["coloured"], 0);
    let (_, v) = api.act(&st, "FEEDBACK_TOGGLE", Some(json!({"enabled": false}))).await;
    assert!(v["task"].get("colouring").is_none());
    let log = api.engine.session_log(&session).unwrap();
    let kinds: Vec<&str> = log.events().iter().map(|e| e.kind.name()).collect();
    assert_eq!(kinds, ["NAVIGATE", "FEEDBACK_TOGGLE", "FEEDBACK_TOGGLE"]);
}

#[tokio::test]
async fn interpreter_errors_are_ok_responses() {
    let api = Api::new();
    let session = api.session(true).await;
    let st = api.student(&session, "2014-06-01").await;
    api.go(&st, 2).await;
    api.act(&st, "ADD_COMMAND", Some(json!({"command": "goCell(C1)"}))).await;
    api.act(&st, "ADD_COMMAND", Some(json!({"command": "paintPattern({red},6,up)"}))).await;
    let (s, v) = api.act(&st, "CONFIRM_COMMAND", None).await;
    assert_eq!(s, StatusCode::OK);
    let err = &v["task"]["error"];
    assert_eq!(err["kind"], "PATTERN_OVERFLOW");
    assert!(err["suggestion"].as_str().is_some_and(|s| !s.is_empty()));
    assert_eq!(v["task"]["confirmed"], json!(["goCell(C1)"]));
    let (s, b) = api.act(&st, "ADD_COMMAND", Some(json!({"command": "paintPattern("}))).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(b["error"], "invalid");
    let (s, _) = api.act(&st, "JUMP", None).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn actions_need_an_active_task() {
    let api = Api::new();
    let session = api.session(true).await;
    let st = api.student(&session, "2014-06-01").await;
    let (s, b) = api.act(&st, "CONFIRM_COMMAND", None).await;
    assert_eq!(s, StatusCode::CONFLICT);
    assert_eq!(b["message"], "there is no active task");
    assert!(api.engine.session_log(&session).unwrap().events().is_empty());
}

#[tokio::test]
async fn programming_interface_is_gated_per_session() {
    let api = Api::new();
    let young = api.session(false).await;
    let st = api.student(&young, "2019-01-01").await;
    api.go(&st, 1).await;
    let (s, b) = api.act(&st, "INTERFACE_SWITCH", Some(json!({"interface": "P"}))).await;
    assert_eq!(s, StatusCode::FORBIDDEN, "{b}");
    let open = api.session(true).await;
    let st = api.student(&open, "2012-01-01").await;
    api.go(&st, 1).await;
    let (s, v) = api.act(&st, "INTERFACE_SWITCH", Some(json!({"interface": "P"}))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["interface"], "P");
    api.act(&st, "ADD_COMMAND", Some(json!({"command": "goCell(C1)"}))).await;
    api.act(&st, "ADD_COMMAND", Some(json!({"command": "paintSingleCell(red)"}))).await;
    let (s, v) = api.act(&st, "REORDER_COMMANDS", Some(json!({"from": 1, "to": 0}))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["task"]["pending"], json!(["paintSingleCell(red)", "goCell(C1)"]));
    let payload = json!({"position": 0, "property": "color", "old": "red", "new": "blue"});
    let (_, v) = api.act(&st, "MODIFY_PROPERTY", Some(payload)).await;
    assert_eq!(v["task"]["pending"][0], "paintSingleCell(blue)");
}

#[tokio::test]
async fn navigation_and_read_only_revisits() {
    let api = Api::new();
    let session = api.session(true).await;
    let st = api.student(&session, "2014-06-01").await;
    api.go(&st, 3).await;
    let (_, v) = api.go(&st, 4).await;
    assert_eq!(v["task"]["index"], 4);
    assert_eq!(v["task"]["total"], 12);
    let (s, b) = api.go(&st, 13).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY, "{b}");
    api.go(&st, 1).await;
    let v = api.solve_with(&st, catalog::entry(Module::Validation, 1).unwrap().solution).await;
    assert_eq!(v["task"]["index"], 2);
    let (_, v) = api.go(&st, 1).await;
    assert_eq!(v["task"]["read_only"], true);
    assert!(v["task"]["score"].is_object());
    let (s, _) = api.act(&st, "ADD_COMMAND", Some(json!({"command": "fillEmpty(red)"}))).await;
    assert_eq!(s, StatusCode::CONFLICT);
    let (_, v) = api.post(&format!("/students/{st}/navigate"), json!({"module": "training", "target": 15})).await;
    assert_eq!(v["task"]["module"], "training");
    assert_eq!(v["task"]["total"], 15);
}

#[tokio::test]
async fn training_scores_are_suppressed() {
    let api = Api::new();
    let session = api.session(true).await;
    let st = api.student(&session, "2014-06-01").await;
    api.post(&format!("/students/{st}/navigate"), json!({"module": "training", "target": 1})).await;
    api.act(&st, "ADD_COMMAND", Some(json!({"command": "fillEmpty(red)"}))).await;
    let (_, v) = api.act(&st, "CONFIRM_COMMAND", None).await;
    assert!(v["task"]["score"].is_null());
    assert_eq!(v["task"]["dimension"], "D1");
}

#[tokio::test]
async fn dashboard_reports_statuses() {
    let api = Api::new();
    let session = api.session(true).await;
    let st = api.student(&session, "2014-06-01").await;
    let (_, d) = api.get(&format!("/students/{st}/dashboard")).await;
    assert_eq!(d["rows"], json!([]));
    api.go(&st, 1).await;
    api.solve_with(&st, catalog::entry(Module::Validation, 1).unwrap().solution).await;
    api.clock.advance(30_000);
    api.act(&st, "SURRENDER", None).await;
    api.act(&st, "ADD_COMMAND", Some(json!({"command": "fillEmpty(red)"}))).await;
    api.act(&st, "CONFIRM_COMMAND", None).await;
    api.clock.advance(5_000);
    api.act(&st, "TASK_COMPLETED", None).await;
    let (s, d) = api.get(&format!("/students/{st}/dashboard")).await;
    assert_eq!(s, StatusCode::OK);
    let statuses: Vec<&str> = d["rows"].as_array().unwrap().iter().map(|r| r["status"].as_str().unwrap()).collect();
    assert_eq!(statuses, ["correct", "skipped", "incorrect", "skipped"]);
    let rows = d["rows"].as_array().unwrap();
    assert_eq!(rows[1]["duration"], 30.0);
    assert_eq!(rows[2]["duration"], 5.0);
    assert!(rows[0]["score"]["total"].as_u64().is_some());
    assert!(rows[1]["score"].is_null());
    assert_eq!(d["total_score"], rows[0]["score"]["total"]);
    let records = cat_core::telemetry::derive_task_records(
        &api.engine.session_log(&session).unwrap(),
        &api.engine.config().rubric,
    )
    .unwrap();
    let solved: Vec<bool> = records.iter().map(|r| r.outcome.solved).collect();
    assert_eq!(solved, [true, false, false, false]);
}

#[tokio::test]
async fn survey_after_validation_only() {
    let api = Api::new();
    let session = api.session(true).await;
    let st = api.student(&session, "2014-06-01").await;
    let uri = format!("/students/{st}/survey");
    let (s, _) = api.post(&uri, json!({"answers": {"q1": "happy"}})).await;
    assert_eq!(s, StatusCode::CONFLICT);
    api.go(&st, 1).await;
    for _ in 0..12 {
        api.act(&st, "SURRENDER", None).await;
    }
    let (s, v) = api.post(&uri, json!({"answers": {"q1": "happy", "q2": "sad"}})).await;
    assert_eq!(s, StatusCode::OK, "{v}");
    assert_eq!(v["survey"], json!({"q1": "happy", "q2": "sad"}));
    let (s, _) = api.post(&uri, json!({"answers": {"q1": "neutral"}})).await;
    assert_eq!(s, StatusCode::CONFLICT);
    let (s, _) = api.post(&uri, json!({"answers": {"q3": "angry"}})).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    let (s, _) = api.post(&uri, json!({"answers": {}})).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn localised_labels() {
    let api = Api::new();
    let session = api.session(true).await;
    let st = api.student(&session, "2014-06-01").await;
    let mut seen = std::collections::BTreeSet::new();
    for lang in ["it", "fr", "de", "en"] {
        let (s, v) = api.get(&format!("/students/{st}/view?lang={lang}")).await;
        assert_eq!(s, StatusCode::OK);
        assert_eq!(v["lang"], lang);
        seen.insert(v["labels"]["surrender"].as_str().unwrap().to_string());
    }
    assert_eq!(seen.len(), 4);
    let (s, b) = api.get(&format!("/students/{st}/view?lang=rm")).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(b["fields"], json!(["lang"]));
}

#[tokio::test]
async fn sequence_numbers_deduplicate_resubmissions() {
    let api = Api::new();
    let session = api.session(true).await;
    let st = api.student(&session, "2014-06-01").await;
    let uri = format!("/students/{st}/actions");
    api.post(&format!("/students/{st}/navigate"), json!({"seq": 1, "target": 1})).await;
    let add = json!({"seq": 2, "kind": "ADD_COMMAND", "payload": {"command": "fillEmpty(red)"}});
    let (_, first) = api.post(&uri, add.clone()).await;
    let (s, again) = api.post(&uri, add).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(again["duplicate"], true);
    assert_eq!(first["task"], again["task"]);
    let (_, stale) = api.post(&uri, json!({"seq": 1, "kind": "RETRY"})).await;
    assert_eq!(stale["duplicate"], true);
    assert_eq!(api.engine.session_log(&session).unwrap().events().len(), 2);
}

#[tokio::test]
async fn export_lifecycle() {
    let dir = std::env::temp_dir().join(format!("cat-service-test-{}", std::process::id()));
    let api = Api::with_config(EngineConfig { data_dir: Some(dir.clone()), ..EngineConfig::default() });
    let session = api.session(true).await;
    let st = api.student(&session, "2014-06-01").await;
    api.go(&st, 1).await;
    api.solve_with(&st, "fillEmpty(yellow)").await;
    let (s, b) = api.get(&format!("/sessions/{session}/export")).await;
    assert_eq!(s, StatusCode::CONFLICT);
    assert_eq!(b["message"], "session still active");
    let (s, closed) = api.post(&format!("/sessions/{session}/close"), json!({})).await;
    assert_eq!(s, StatusCode::OK);
    let stored = std::fs::read_to_string(closed["stored_at"].as_str().unwrap()).unwrap();
    let (s, _) = api.post(&format!("/sessions/{session}/close"), json!({})).await;
    assert_eq!(s, StatusCode::CONFLICT);
    let (s, _) = api.act(&st, "RETRY", None).await;
    assert_eq!(s, StatusCode::CONFLICT);

    let (s, plain) = api.raw(Method::GET, &format!("/sessions/{session}/export"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(plain, stored);
    let dataset = Dataset::parse(&plain).unwrap();
    let log = api.engine.session_log(&session).unwrap();
    assert_eq!(replay(&log).unwrap(), vec![api.engine.student_state(&st).unwrap()]);
    assert_eq!(dataset.replay_records(&api.engine.config().rubric).unwrap(), dataset.tasks);

    let (s, pseudo) = api.raw(Method::GET, &format!("/sessions/{session}/export?pseudo=1"), None).await;
    assert_eq!(s, StatusCode::OK);
    for secret in ["Ticino", "Sorengo", "2014-06-01", st.as_str()] {
        assert!(!pseudo.contains(secret), "{secret} leaked");
    }
    assert!(Dataset::parse(&pseudo).unwrap().session.pseudonymised);
    std::fs::remove_dir_all(dir).ok();
}
