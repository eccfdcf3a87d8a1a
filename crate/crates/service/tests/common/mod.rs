#![allow(dead_code)]

use std::path::Path;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use muscale_core::{serialize_document, Document, RecognizerConfig};
use muscale_service::{router, AppState, Store};
use serde_json::{json, Value};
use tower::ServiceExt;

pub struct Reply {
    pub status: StatusCode,
    pub seq: Option<u64>,
    pub content_type: String,
    pub body: Vec<u8>,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.body)
            .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&self.body)))
    }

    pub fn text(&self) -> String {
        String::from_utf8(self.body.clone()).unwrap()
    }
}

pub struct Harness {
    pub state: Arc<AppState>,
    pub app: Router,
}

impl Harness {
    pub fn open(dir: &Path) -> Self {
        Self::with_config(dir, RecognizerConfig::default())
    }

    pub fn with_config(dir: &Path, cfg: RecognizerConfig) -> Self {
        let state = Arc::new(AppState::new(Store::open(dir).unwrap(), cfg));
        Self {
            app: router(state.clone()),
            state,
        }
    }

    pub async fn send(
        &self,
        method: Method,
        uri: &str,
        body: Option<Vec<u8>>,
        key: Option<&str>,
    ) -> Reply {
        let mut req = Request::builder().method(method).uri(uri);
        if body.is_some() {
            req = req.header("content-type", "application/json");
        }
        if let Some(k) = key {
            req = req.header("idempotency-key", k);
        }
        let req = req
            .body(body.map(Body::from).unwrap_or_else(Body::empty))
            .unwrap();
        let resp = self.app.clone().oneshot(req).await.unwrap();
        let status = resp.status();
        let seq = resp
            .headers()
            .get("x-log-seq")
            .map(|v| v.to_str().unwrap().parse().unwrap());
        let content_type = resp
            .headers()
            .get("content-type")
            .map(|v| v.to_str().unwrap().to_owned())
            .unwrap_or_default();
        let body = resp
            .into_body()
            .collect()
            .await
            .unwrap()
            .to_bytes()
            .to_vec();
        Reply {
            status,
            seq,
            content_type,
            body,
        }
    }

    pub async fn get(&self, uri: &str) -> Reply {
        self.send(Method::GET, uri, None, None).await
    }

    pub async fn post(&self, uri: &str, body: &Value) -> Reply {
        self.send(
            Method::POST,
            uri,
            Some(serde_json::to_vec(body).unwrap()),
            None,
        )
        .await
    }

    pub async fn course(&self, name: &str) -> String {
        let r = self
            .post("/courses", &json!({"name": name, "term": "Fall"}))
            .await;
        assert_eq!(r.status, StatusCode::CREATED, "{}", r.text());
        r.json()["id"].as_str().unwrap().to_owned()
    }

    pub async fn assignment(&self, course: &str, title: &str) -> String {
        let r = self
            .post(
                &format!("/courses/{course}/assignments"),
                &json!({"title": title}),
            )
            .await;
        assert_eq!(r.status, StatusCode::CREATED, "{}", r.text());
        r.json()["id"].as_str().unwrap().to_owned()
    }

    pub async fn submit(&self, assignment: &str, label: &str, doc: &Document) -> Reply {
        self.post(
            &format!("/assignments/{assignment}/submissions"),
            &submission_body(label, doc),
        )
        .await
    }
}

pub fn submission_body(label: &str, doc: &Document) -> Value {
    let doc: Value = serde_json::from_slice(&serialize_document(doc)).unwrap();
    json!({"studentLabel": label, "document": doc})
}
