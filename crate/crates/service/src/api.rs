//! HTTP routes. Every JSON body, success or error, is canonical JSON so that
//! responses are byte-comparable with command-line output.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::{BytesRejection, QueryRejection};
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, HeaderMap, HeaderName, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use muscale_core::model::document_from_value;
use muscale_core::{build_overlay, render_svg, AnalyticsRecord, RenderOptions};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::entities::Submission;
use crate::error::ApiError;
use crate::state::AppState;
use crate::store::{NewAssignment, NewCourse, StoreError};

pub const MAX_BODY_BYTES: usize = 10 * 1024 * 1024;
pub const MAX_ELEMENTS: usize = 10_000;
pub const MAX_LABEL_CHARS: usize = 200;

/// Log sequence number of the snapshot a response was read from.
pub const SEQ_HEADER: HeaderName = HeaderName::from_static("x-log-seq");

type Shared = State<Arc<AppState>>;

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/healthz", get(|| async { "ok" }))
        .route("/courses", get(list_courses).post(create_course))
        .route("/courses/{id}", get(get_course))
        .route(
            "/courses/{id}/assignments",
            get(list_assignments).post(create_assignment),
        )
        .route("/assignments/{id}", get(get_assignment))
        .route(
            "/assignments/{id}/submissions",
            get(list_submissions).post(submit_document),
        )
        .route("/submissions/{id}", get(get_submission))
        .route("/submissions/{id}/analytics", get(get_analytics))
        .route("/submissions/{id}/hierarchy", get(get_hierarchy))
        .route("/submissions/{id}/document", get(get_document))
        .route("/submissions/{id}/overlay", get(get_overlay))
        .route("/submissions/{id}/overlay.svg", get(get_overlay_svg))
        .layer(DefaultBodyLimit::max(MAX_BODY_BYTES))
        .with_state(state)
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::NotFound { what, id } => ApiError::not_found(what, &id),
            other => ApiError::internal(other.to_string()),
        }
    }
}

fn json<T: Serialize>(
    status: StatusCode,
    seq: Option<u64>,
    body: &T,
) -> Result<Response, ApiError> {
    let bytes = muscale_core::canonical::to_canonical_bytes(body)
        .map_err(|e| ApiError::internal(e.to_string()))?;
    Ok(raw(status, seq, "application/json", bytes))
}

fn raw(
    status: StatusCode,
    seq: Option<u64>,
    content_type: &'static str,
    body: impl IntoResponse,
) -> Response {
    let mut response = (status, [(header::CONTENT_TYPE, content_type)], body).into_response();
    if let Some(seq) = seq {
        response
            .headers_mut()
            .insert(SEQ_HEADER, HeaderValue::from(seq));
    }
    response
}

fn created_status(created: bool) -> StatusCode {
    if created {
        StatusCode::CREATED
    } else {
        StatusCode::OK
    }
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ApiError> + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?
}

fn body_bytes(body: Result<Bytes, BytesRejection>) -> Result<Bytes, ApiError> {
    body.map_err(|r| {
        if r.status() == StatusCode::PAYLOAD_TOO_LARGE {
            ApiError::too_large(format!("request body exceeds {MAX_BODY_BYTES} bytes"))
        } else {
            ApiError::invalid(r.body_text(), "")
        }
    })
}

fn parse_body<T: for<'de> Deserialize<'de>>(
    body: Result<Bytes, BytesRejection>,
) -> Result<T, ApiError> {
    let bytes = body_bytes(body)?;
    serde_json::from_slice(&bytes).map_err(|e| ApiError::invalid(e.to_string(), ""))
}

fn idempotency_key(headers: &HeaderMap) -> Result<Option<String>, ApiError> {
    match headers.get("idempotency-key") {
        None => Ok(None),
        Some(v) => match v.to_str() {
            Ok(s) if !s.is_empty() && s.len() <= 256 => Ok(Some(s.to_owned())),
            _ => Err(ApiError::invalid(
                "Idempotency-Key must be 1 to 256 visible ASCII characters",
                "",
            )),
        },
    }
}

fn non_empty(value: &str, path: &str) -> Result<(), ApiError> {
    if value.trim().is_empty() {
        return Err(ApiError::invalid(format!("{path} must not be empty"), path));
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct CourseBody {
    name: String,
    #[serde(default)]
    term: String,
    #[serde(default)]
    instructor_names: Vec<String>,
}

async fn create_course(
    State(app): Shared,
    headers: HeaderMap,
    body: Result<Bytes, BytesRejection>,
) -> Result<Response, ApiError> {
    let body: CourseBody = parse_body(body)?;
    non_empty(&body.name, "name")?;
    let key = idempotency_key(&headers)?;
    let input = NewCourse {
        name: body.name,
        term: body.term,
        instructor_names: body.instructor_names,
    };
    let out = blocking(move || Ok(app.store().create_course(input, key)?)).await?;
    json(created_status(out.created), None, &out.entity)
}

async fn list_courses(State(app): Shared) -> Result<Response, ApiError> {
    let snap = app.store().read();
    json(StatusCode::OK, Some(snap.seq()), &snap.courses())
}

async fn get_course(State(app): Shared, Path(id): Path<String>) -> Result<Response, ApiError> {
    let snap = app.store().read();
    let course = snap
        .course(&id)
        .ok_or_else(|| ApiError::not_found("course", &id))?;
    json(StatusCode::OK, Some(snap.seq()), course)
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct AssignmentBody {
    title: String,
    #[serde(default)]
    due_date: Option<String>,
}

async fn create_assignment(
    State(app): Shared,
    Path(course_id): Path<String>,
    headers: HeaderMap,
    body: Result<Bytes, BytesRejection>,
) -> Result<Response, ApiError> {
    let body: AssignmentBody = parse_body(body)?;
    non_empty(&body.title, "title")?;
    if let Some(due) = &body.due_date {
        chrono::DateTime::parse_from_rfc3339(due).map_err(|e| {
            ApiError::invalid(
                format!("dueDate is not an ISO-8601 timestamp: {e}"),
                "dueDate",
            )
        })?;
    }
    let key = idempotency_key(&headers)?;
    let input = NewAssignment {
        title: body.title,
        due_date: body.due_date,
    };
    let out = blocking(move || Ok(app.store().create_assignment(&course_id, input, key)?)).await?;
    json(created_status(out.created), None, &out.entity)
}

async fn list_assignments(
    State(app): Shared,
    Path(course_id): Path<String>,
) -> Result<Response, ApiError> {
    let snap = app.store().read();
    if snap.course(&course_id).is_none() {
        return Err(ApiError::not_found("course", &course_id));
    }
    let list: Vec<_> = snap.assignments_of(&course_id).collect();
    json(StatusCode::OK, Some(snap.seq()), &list)
}

async fn get_assignment(State(app): Shared, Path(id): Path<String>) -> Result<Response, ApiError> {
    let snap = app.store().read();
    let assignment = snap
        .assignment(&id)
        .ok_or_else(|| ApiError::not_found("assignment", &id))?;
    json(StatusCode::OK, Some(snap.seq()), assignment)
}

/// A submission with its analytics and every version by the same student.
#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
struct SubmissionRow {
    submission: Submission,
    analytics: AnalyticsRecord,
    history: Vec<Submission>,
}

/// Builds rows with analytics computed in parallel, one blocking task per
/// submission, preserving input order.
async fn rows(
    app: &Arc<AppState>,
    subs: Vec<(Submission, Vec<Submission>)>,
) -> Result<Vec<SubmissionRow>, ApiError> {
    let tasks: Vec<_> = subs
        .into_iter()
        .map(|(submission, history)| {
            let app = app.clone();
            tokio::task::spawn_blocking(move || {
                let analytics = app
                    .computed(&submission.content_hash)?
                    .analysis
                    .analytics
                    .clone();
                Ok::<_, ApiError>(SubmissionRow {
                    submission,
                    analytics,
                    history,
                })
            })
        })
        .collect();
    let mut out = Vec::with_capacity(tasks.len());
    for task in tasks {
        out.push(
            task.await
                .map_err(|e| ApiError::internal(e.to_string()))??,
        );
    }
    Ok(out)
}

fn with_history(app: &AppState, id: &str) -> Result<(u64, Submission, Vec<Submission>), ApiError> {
    let snap = app.store().read();
    let sub = snap
        .submission(id)
        .ok_or_else(|| ApiError::not_found("submission", id))?
        .clone();
    let history = snap
        .history(&sub.assignment_id, &sub.student_label)
        .into_iter()
        .cloned()
        .collect();
    Ok((snap.seq(), sub, history))
}

async fn submit_document(
    State(app): Shared,
    Path(assignment_id): Path<String>,
    headers: HeaderMap,
    body: Result<Bytes, BytesRejection>,
) -> Result<Response, ApiError> {
    let bytes = body_bytes(body)?;
    let value: Value = serde_json::from_slice(&bytes).map_err(|e| {
        ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "MalformedJson",
            e.to_string(),
            "",
        )
    })?;
    let obj = value
        .as_object()
        .ok_or_else(|| ApiError::invalid("request body must be a JSON object", ""))?;
    let label = match obj.get("studentLabel") {
        Some(Value::String(s)) => s.clone(),
        Some(_) => {
            return Err(ApiError::invalid(
                "studentLabel must be a string",
                "studentLabel",
            ))
        }
        None => return Err(ApiError::invalid("missing required field", "studentLabel")),
    };
    non_empty(&label, "studentLabel")?;
    if label.chars().count() > MAX_LABEL_CHARS {
        return Err(ApiError::invalid(
            format!("studentLabel exceeds {MAX_LABEL_CHARS} characters"),
            "studentLabel",
        ));
    }
    let doc_value = obj
        .get("document")
        .ok_or_else(|| ApiError::invalid("missing required field", "document"))?;
    if let Some(elements) = doc_value.get("elements").and_then(Value::as_array) {
        if elements.len() > MAX_ELEMENTS {
            return Err(ApiError::too_large(format!(
                "document has {} elements, the limit is {MAX_ELEMENTS}",
                elements.len()
            )));
        }
    }
    let doc = document_from_value(doc_value)?;
    let key = idempotency_key(&headers)?;

    let store_app = app.clone();
    let out = blocking(move || {
        Ok(store_app
            .store()
            .submit(&assignment_id, &label, &doc, key)?)
    })
    .await?;
    let (_, sub, history) = with_history(&app, &out.entity.id)?;
    let row = rows(&app, vec![(sub, history)])
        .await?
        .pop()
        .expect("one row in, one row out");
    json(created_status(out.created), None, &row)
}

#[derive(Deserialize)]
struct ListQuery {
    #[serde(default)]
    all: bool,
}

async fn list_submissions(
    State(app): Shared,
    Path(assignment_id): Path<String>,
    query: Result<Query<ListQuery>, QueryRejection>,
) -> Result<Response, ApiError> {
    let Query(query) = query.map_err(|r| ApiError::invalid(r.body_text(), ""))?;
    let (seq, subs) = {
        let snap = app.store().read();
        if snap.assignment(&assignment_id).is_none() {
            return Err(ApiError::not_found("assignment", &assignment_id));
        }
        let picked = if query.all {
            snap.submissions_of(&assignment_id)
        } else {
            snap.latest_submissions(&assignment_id)
        };
        let subs: Vec<_> = picked
            .into_iter()
            .map(|s| {
                let history = snap
                    .history(&assignment_id, &s.student_label)
                    .into_iter()
                    .cloned()
                    .collect();
                (s.clone(), history)
            })
            .collect();
        (snap.seq(), subs)
    };
    let rows = rows(&app, subs).await?;
    json(StatusCode::OK, Some(seq), &rows)
}

#[derive(Serialize)]
struct SubmissionDetail {
    submission: Submission,
    history: Vec<Submission>,
}

async fn get_submission(State(app): Shared, Path(id): Path<String>) -> Result<Response, ApiError> {
    let (seq, submission, history) = with_history(&app, &id)?;
    json(
        StatusCode::OK,
        Some(seq),
        &SubmissionDetail {
            submission,
            history,
        },
    )
}

async fn computed_for(
    app: &Arc<AppState>,
    id: &str,
) -> Result<(u64, Arc<crate::state::Computed>), ApiError> {
    let (seq, hash) = {
        let snap = app.store().read();
        let sub = snap
            .submission(id)
            .ok_or_else(|| ApiError::not_found("submission", id))?;
        (snap.seq(), sub.content_hash.clone())
    };
    let app = app.clone();
    let computed = blocking(move || Ok(app.computed(&hash)?)).await?;
    Ok((seq, computed))
}

async fn get_analytics(State(app): Shared, Path(id): Path<String>) -> Result<Response, ApiError> {
    let (seq, c) = computed_for(&app, &id).await?;
    Ok(raw(
        StatusCode::OK,
        Some(seq),
        "application/json",
        c.analysis.analytics.canonical_bytes(),
    ))
}

async fn get_hierarchy(State(app): Shared, Path(id): Path<String>) -> Result<Response, ApiError> {
    let (seq, c) = computed_for(&app, &id).await?;
    Ok(raw(
        StatusCode::OK,
        Some(seq),
        "application/json",
        c.analysis.hierarchy.canonical_bytes(),
    ))
}

async fn get_document(State(app): Shared, Path(id): Path<String>) -> Result<Response, ApiError> {
    let (seq, hash) = {
        let snap = app.store().read();
        let sub = snap
            .submission(&id)
            .ok_or_else(|| ApiError::not_found("submission", &id))?;
        (snap.seq(), sub.content_hash.clone())
    };
    let store_app = app.clone();
    let bytes = blocking(move || Ok(store_app.store().load_blob(&hash)?)).await?;
    Ok(raw(StatusCode::OK, Some(seq), "application/json", bytes))
}

async fn get_overlay(State(app): Shared, Path(id): Path<String>) -> Result<Response, ApiError> {
    let (seq, c) = computed_for(&app, &id).await?;
    let overlay = build_overlay(&c.document, &c.analysis.hierarchy, app.palette())?;
    Ok(raw(
        StatusCode::OK,
        Some(seq),
        "application/json",
        overlay.canonical_bytes(),
    ))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct SvgQuery {
    #[serde(default)]
    animated: bool,
    #[serde(default)]
    highlight_cluster: Option<u32>,
}

async fn get_overlay_svg(
    State(app): Shared,
    Path(id): Path<String>,
    query: Result<Query<SvgQuery>, QueryRejection>,
) -> Result<Response, ApiError> {
    let Query(query) = query.map_err(|r| ApiError::invalid(r.body_text(), ""))?;
    let (seq, c) = computed_for(&app, &id).await?;
    let overlay = build_overlay(&c.document, &c.analysis.hierarchy, app.palette())?;
    let opts = RenderOptions {
        animated: query.animated,
        highlight_cluster: query.highlight_cluster,
    };
    let svg = render_svg(&c.document, &overlay, opts)?;
    Ok(raw(StatusCode::OK, Some(seq), "image/svg+xml", svg))
}
