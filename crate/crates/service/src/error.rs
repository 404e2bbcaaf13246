use adaptive_core::Error as CoreError;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};

/// Body of every non-2xx response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}

#[derive(Debug, thiserror::Error)]
pub enum ApiError {
    #[error(transparent)]
    Domain(#[from] CoreError),
    #[error("unknown student `{0}`")]
    UnknownStudent(String),
    #[error("graph `{0}` is already registered")]
    DuplicateGraph(String),
    #[error("malformed request: {0}")]
    BadRequest(String),
    #[error("storage failure: {0}")]
    Storage(#[from] std::io::Error),
}

impl ApiError {
    pub fn status(&self) -> StatusCode {
        match self {
            ApiError::Domain(e) => match e {
                CoreError::UnknownGraph(_) | CoreError::UnknownFeature(_) => StatusCode::NOT_FOUND,
                CoreError::InvalidAgeLevel(_) | CoreError::EmptySession => {
                    StatusCode::UNPROCESSABLE_ENTITY
                }
                CoreError::FeatureNotOpen(_)
                | CoreError::NoPlayableFeature
                | CoreError::NoContentForFeature(_) => StatusCode::CONFLICT,
                CoreError::Replay(_) => StatusCode::INTERNAL_SERVER_ERROR,
                _ => StatusCode::BAD_REQUEST,
            },
            ApiError::UnknownStudent(_) => StatusCode::NOT_FOUND,
            ApiError::DuplicateGraph(_) => StatusCode::CONFLICT,
            ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::Storage(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            ApiError::Domain(e) => e.code(),
            ApiError::UnknownStudent(_) => "UnknownStudent",
            ApiError::DuplicateGraph(_) => "DuplicateGraph",
            ApiError::BadRequest(_) => "BadRequest",
            ApiError::Storage(_) => "Storage",
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if matches!(self, ApiError::Storage(_)) {
            tracing::error!(error = %self, "request failed");
        }
        let body = ErrorBody {
            error: self.code().to_owned(),
            message: self.to_string(),
        };
        (self.status(), Json(body)).into_response()
    }
}
