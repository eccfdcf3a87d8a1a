//! Recognition of nested scales and spatial clusters in multiscale design
//! documents.
//!
//! The crate is organised around the data flow of the analytics pipeline:
//!
//! - [`model`]: the free-form design document, its canonical JSON encoding and
//!   the world-space geometry derived from element transforms.
//! - [`recognizer`]: legibility bands ("scales"), nested spatial clusters and
//!   the per-document [`AnalyticsRecord`](recognizer::AnalyticsRecord).
//! - [`annotator`]: per-scale colored cluster regions, the reveal timeline and
//!   SVG rendering of an annotated design instance.
//! - [`synthgen`]: seeded generator of documents with known hierarchies, used
//!   as the oracle corpus in tests.

pub mod annotator;
pub mod canonical;
pub mod geometry;
pub mod model;
pub mod recognizer;
pub mod synthgen;

pub use annotator::{build_overlay, render_svg, AnnotationOverlay, Palette, RenderOptions};

pub use geometry::WorldRect;
pub use model::{
    parse_document, serialize_document, Document, DocumentError, Element, ElementKind,
};
pub use recognizer::{
    build_hierarchy, compute_analytics, AnalyticsRecord, Cluster, MultiscaleHierarchy,
    RecognizerConfig,
};
