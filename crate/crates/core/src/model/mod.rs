//! The free-form design document: a titled collection of elements, each
//! placed in world space by a position, a uniform scale and a rotation.
//!
//! Documents are stored as JSON. [`parse_document`] decodes and validates;
//! [`serialize_document`] emits canonical bytes (sorted keys, no whitespace),
//! so `parse(serialize(d)) == d` and the bytes are stable enough to hash.
//! Fields this model does not know about are carried in `unknown` side maps
//! and written back out unchanged.
//!
//! Rotation is in radians, counter-clockwise about the element's local origin
//! (its unscaled top-left corner). Scale is a single uniform factor.

mod decode;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::canonical;
use crate::geometry::WorldRect;

pub use decode::document_from_value;

/// Opaque map of fields not described by the model.
pub type UnknownFields = BTreeMap<String, Value>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transforms {
    pub position: Point,
    pub scale: f64,
    pub rotation: f64,
    #[serde(flatten)]
    pub unknown: UnknownFields,
}

impl Transforms {
    pub fn at(x: f64, y: f64) -> Self {
        Self {
            position: Point { x, y },
            scale: 1.0,
            rotation: 0.0,
            unknown: UnknownFields::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Image,
    Text,
    Sketch,
    Video,
    Embed,
    Other,
}

impl ElementKind {
    pub const ALL: [ElementKind; 6] = [
        ElementKind::Image,
        ElementKind::Text,
        ElementKind::Sketch,
        ElementKind::Video,
        ElementKind::Embed,
        ElementKind::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ElementKind::Image => "image",
            ElementKind::Text => "text",
            ElementKind::Sketch => "sketch",
            ElementKind::Video => "video",
            ElementKind::Embed => "embed",
            ElementKind::Other => "other",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == name)
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Provenance recorded when an element was collected from the web.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Clipping {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source_url: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source_title: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extra: Option<BTreeMap<String, Value>>,
    #[serde(flatten)]
    pub unknown: UnknownFields,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Element {
    pub id: String,
    pub kind: ElementKind,
    pub width: f64,
    pub height: f64,
    pub transforms: Transforms,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clipping: Option<Clipping>,
    #[serde(flatten)]
    pub unknown: UnknownFields,
}

impl Element {
    pub fn new(
        id: impl Into<String>,
        kind: ElementKind,
        width: f64,
        height: f64,
        transforms: Transforms,
    ) -> Self {
        Self {
            id: id.into(),
            kind,
            width,
            height,
            transforms,
            text: None,
            clipping: None,
            unknown: UnknownFields::new(),
        }
    }

    /// The local rectangle's four corners, in world coordinates.
    pub fn world_corners(&self) -> [(f64, f64); 4] {
        let t = &self.transforms;
        let (sin, cos) = t.rotation.sin_cos();
        let place = |lx: f64, ly: f64| {
            let sx = lx * t.scale;
            let sy = ly * t.scale;
            (
                sx * cos - sy * sin + t.position.x,
                sx * sin + sy * cos + t.position.y,
            )
        };
        [
            place(0.0, 0.0),
            place(self.width, 0.0),
            place(self.width, self.height),
            place(0.0, self.height),
        ]
    }

    /// Axis-aligned hull of the transformed local rectangle.
    pub fn world_bbox(&self) -> WorldRect {
        WorldRect::hull_of_points(self.world_corners()).expect("four corners")
    }

    /// World-space center of the transformed rectangle.
    pub fn world_center(&self) -> (f64, f64) {
        let c = self.world_corners();
        ((c[0].0 + c[2].0) / 2.0, (c[0].1 + c[2].1) / 2.0)
    }

    /// Legibility proxy: the geometric mean of the scaled extents.
    pub fn characteristic_size(&self) -> f64 {
        self.transforms.scale * (self.width * self.height).sqrt()
    }

    /// Whitespace-delimited tokens of the text content.
    pub fn word_count(&self) -> usize {
        self.text
            .as_deref()
            .map_or(0, |t| t.split_whitespace().count())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Visibility {
    Public,
    Private,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Settings {
    pub visibility: Visibility,
    pub background_color: String,
    #[serde(flatten)]
    pub unknown: UnknownFields,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            visibility: Visibility::Public,
            background_color: "#ffffff".to_owned(),
            unknown: UnknownFields::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Document {
    pub title: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub key: String,
    pub id: String,
    pub settings: Settings,
    pub creator: String,
    pub elements: Vec<Element>,
    #[serde(flatten)]
    pub unknown: UnknownFields,
}

impl Document {
    pub fn new(
        title: impl Into<String>,
        key: impl Into<String>,
        id: impl Into<String>,
        creator: impl Into<String>,
    ) -> Self {
        Self {
            title: title.into(),
            description: None,
            key: key.into(),
            id: id.into(),
            settings: Settings::default(),
            creator: creator.into(),
            elements: Vec::new(),
            unknown: UnknownFields::new(),
        }
    }

    /// Checks the invariants a decoded document must satisfy.
    pub fn validate(&self) -> Result<(), DocumentError> {
        if self.key.is_empty() {
            return Err(DocumentError::invariant("key", "key must be nonempty"));
        }
        if !is_hex_color(&self.settings.background_color) {
            return Err(DocumentError::invariant(
                "settings.backgroundColor",
                format!("{:?} is not a hex color", self.settings.background_color),
            ));
        }
        let mut seen = BTreeMap::new();
        for (i, e) in self.elements.iter().enumerate() {
            let at = |field: &str| format!("elements[{i}].{field}");
            let numbers = [
                ("width", e.width),
                ("height", e.height),
                ("transforms.position.x", e.transforms.position.x),
                ("transforms.position.y", e.transforms.position.y),
                ("transforms.scale", e.transforms.scale),
                ("transforms.rotation", e.transforms.rotation),
            ];
            for (field, v) in numbers {
                if !v.is_finite() {
                    return Err(DocumentError::schema(at(field), "number must be finite"));
                }
            }
            if e.width <= 0.0 {
                return Err(DocumentError::invariant(at("width"), "width must be > 0"));
            }
            if e.height <= 0.0 {
                return Err(DocumentError::invariant(at("height"), "height must be > 0"));
            }
            if e.transforms.scale <= 0.0 {
                return Err(DocumentError::invariant(
                    at("transforms.scale"),
                    "scale must be > 0",
                ));
            }
            if let Some(first) = seen.insert(e.id.as_str(), i) {
                return Err(DocumentError::invariant(
                    at("id"),
                    format!(
                        "duplicate element id {:?} (first at elements[{first}])",
                        e.id
                    ),
                ));
            }
        }
        Ok(())
    }

    pub fn element(&self, id: &str) -> Option<&Element> {
        self.elements.iter().find(|e| e.id == id)
    }

    /// Hull of every element's world bbox; `None` for an empty document.
    pub fn world_bounds(&self) -> Option<WorldRect> {
        self.elements
            .iter()
            .map(Element::world_bbox)
            .reduce(|a, b| a.union(&b))
    }

    /// Canonical JSON bytes of the document.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        serialize_document(self)
    }

    /// Hex SHA-256 of the canonical bytes.
    pub fn content_hash(&self) -> String {
        canonical::sha256_hex(&self.canonical_bytes())
    }
}

fn is_hex_color(s: &str) -> bool {
    let Some(hex) = s.strip_prefix('#') else {
        return false;
    };
    matches!(hex.len(), 3 | 4 | 6 | 8) && hex.bytes().all(|b| b.is_ascii_hexdigit())
}

/// Failure to turn bytes into a valid [`Document`]. Every variant carries the
/// JSON path of the offending value (empty for the document root).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocumentError {
    #[error("malformed JSON: {message}")]
    MalformedJson { message: String },
    #[error("schema violation at {}: {message}", display_path(.path))]
    SchemaViolation { path: String, message: String },
    #[error("invariant violation at {}: {message}", display_path(.path))]
    InvariantViolation { path: String, message: String },
}

fn display_path(path: &str) -> &str {
    if path.is_empty() {
        "$"
    } else {
        path
    }
}

impl DocumentError {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self::SchemaViolation {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn invariant(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self::InvariantViolation {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn path(&self) -> &str {
        match self {
            DocumentError::MalformedJson { .. } => "",
            DocumentError::SchemaViolation { path, .. }
            | DocumentError::InvariantViolation { path, .. } => path,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            DocumentError::MalformedJson { .. } => "MalformedJson",
            DocumentError::SchemaViolation { .. } => "SchemaViolation",
            DocumentError::InvariantViolation { .. } => "InvariantViolation",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            DocumentError::MalformedJson { message }
            | DocumentError::SchemaViolation { message, .. }
            | DocumentError::InvariantViolation { message, .. } => message,
        }
    }
}

/// Decodes and validates a UTF-8 JSON document.
pub fn parse_document(bytes: &[u8]) -> Result<Document, DocumentError> {
    let value: Value = serde_json::from_slice(bytes).map_err(|e| DocumentError::MalformedJson {
        message: e.to_string(),
    })?;
    document_from_value(&value)
}

/// Canonical JSON bytes: sorted keys, shortest numbers, no whitespace.
pub fn serialize_document(doc: &Document) -> Vec<u8> {
    canonical::to_canonical_bytes(doc).expect("document serialization is infallible")
}

/// JSON Schema describing the document format.
pub const DOCUMENT_SCHEMA: &str = include_str!("../../schema/ffwc.schema.json");
