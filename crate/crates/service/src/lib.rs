//! REST backend for the instructor dashboard.
//!
//! Courses contain assignments; students submit design documents to an
//! assignment and each submission is analyzed on demand. State lives in a
//! data directory (see [`store`]) and survives restarts.

pub mod api;
pub mod entities;
pub mod error;
pub mod state;
pub mod store;

use std::future::Future;
use std::sync::Arc;

pub use api::router;
pub use entities::{Assignment, Course, Submission};
pub use error::{ApiError, ErrorBody};
pub use state::AppState;
pub use store::{Store, StoreError};

/// Serves the API on `listener` until `shutdown` resolves, then drains
/// in-flight requests.
pub async fn serve(
    listener: tokio::net::TcpListener,
    state: Arc<AppState>,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    if let Ok(addr) = listener.local_addr() {
        tracing::info!(%addr, "dashboard service listening");
    }
    axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await?;
    tracing::info!("dashboard service stopped");
    Ok(())
}
