use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use muscale_core::annotator::AnnotateError;
use muscale_core::model::DocumentError;
use serde::Serialize;

/// Error body returned by every endpoint: `{code, message, path}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    /// JSON path of the offending value, empty when not applicable.
    pub path: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{status}: {} ({})", body.code, body.message)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    pub fn new(
        status: StatusCode,
        code: &str,
        message: impl Into<String>,
        path: impl Into<String>,
    ) -> Self {
        Self {
            status,
            body: ErrorBody {
                code: code.to_owned(),
                message: message.into(),
                path: path.into(),
            },
        }
    }

    pub fn not_found(what: &str, id: &str) -> Self {
        Self::new(
            StatusCode::NOT_FOUND,
            "NotFound",
            format!("{what} {id:?} does not exist"),
            "",
        )
    }

    pub fn invalid(message: impl Into<String>, path: impl Into<String>) -> Self {
        Self::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "InvalidPayload",
            message,
            path,
        )
    }

    pub fn too_large(message: impl Into<String>) -> Self {
        Self::new(
            StatusCode::PAYLOAD_TOO_LARGE,
            "PayloadTooLarge",
            message,
            "",
        )
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", message, "")
    }
}

impl From<DocumentError> for ApiError {
    fn from(e: DocumentError) -> Self {
        let path = if e.path().is_empty() {
            "document".to_owned()
        } else {
            format!("document.{}", e.path())
        };
        Self::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            e.code(),
            e.message(),
            path,
        )
    }
}

impl From<AnnotateError> for ApiError {
    fn from(e: AnnotateError) -> Self {
        let code = match e {
            AnnotateError::UnknownCluster(_) => "UnknownCluster",
            AnnotateError::RankOverflow { .. } => "RankOverflow",
            AnnotateError::InvalidPalette(_) => "InvalidPalette",
        };
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, code, e.to_string(), "")
    }
}

impl From<std::io::Error> for ApiError {
    fn from(e: std::io::Error) -> Self {
        Self::internal(e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let bytes = muscale_core::canonical::to_canonical_bytes(&self.body).unwrap_or_default();
        (
            self.status,
            [(axum::http::header::CONTENT_TYPE, "application/json")],
            bytes,
        )
            .into_response()
    }
}
