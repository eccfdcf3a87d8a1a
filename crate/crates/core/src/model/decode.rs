//! Path-tracking decoder from `serde_json::Value` into the document model.

use serde_json::{Map, Value};

use super::{
    Clipping, Document, DocumentError, Element, ElementKind, Point, Settings, Transforms,
    UnknownFields, Visibility,
};

type Result<T> = std::result::Result<T, DocumentError>;

/// Decodes a parsed JSON value and validates the resulting document.
pub fn document_from_value(value: &Value) -> Result<Document> {
    let root = Obj::new(value, String::new())?;
    let settings = root.req_obj("settings")?;
    let settings = Settings {
        visibility: match settings.req_str("visibility")?.as_str() {
            "public" => Visibility::Public,
            "private" => Visibility::Private,
            other => {
                return Err(DocumentError::schema(
                    settings.child("visibility"),
                    format!("expected \"public\" or \"private\", got {other:?}"),
                ))
            }
        },
        background_color: settings.req_str("backgroundColor")?,
        unknown: settings.unknown(&["visibility", "backgroundColor"]),
    };

    let elements_path = root.child("elements");
    let elements = match root.map.get("elements") {
        Some(Value::Array(items)) => items
            .iter()
            .enumerate()
            .map(|(i, v)| element(v, format!("{elements_path}[{i}]")))
            .collect::<Result<Vec<_>>>()?,
        Some(other) => return Err(type_error(elements_path, "array", other)),
        None => {
            return Err(DocumentError::schema(
                elements_path,
                "missing required field",
            ))
        }
    };

    let doc = Document {
        title: root.req_str("title")?,
        description: root.opt_str("description")?,
        key: root.req_str("key")?,
        id: root.req_str("id")?,
        settings,
        creator: root.req_str("creator")?,
        elements,
        unknown: root.unknown(&[
            "title",
            "description",
            "key",
            "id",
            "settings",
            "creator",
            "elements",
        ]),
    };
    doc.validate()?;
    Ok(doc)
}

fn element(value: &Value, path: String) -> Result<Element> {
    let obj = Obj::new(value, path)?;
    let kind_name = obj.req_str("kind")?;
    let kind = ElementKind::from_name(&kind_name).ok_or_else(|| {
        DocumentError::schema(
            obj.child("kind"),
            format!("unknown element kind {kind_name:?}"),
        )
    })?;

    let t = obj.req_obj("transforms")?;
    let p = t.req_obj("position")?;
    let transforms = Transforms {
        position: Point {
            x: p.req_f64("x")?,
            y: p.req_f64("y")?,
        },
        scale: t.req_f64("scale")?,
        rotation: t.req_f64("rotation")?,
        unknown: t.unknown(&["position", "scale", "rotation"]),
    };

    let clipping = match obj.opt_obj("clipping")? {
        None => None,
        Some(c) => Some(Clipping {
            source_url: c.opt_str("sourceUrl")?,
            source_title: c.opt_str("sourceTitle")?,
            extra: c
                .opt_obj("extra")?
                .map(|o| o.map.clone().into_iter().collect()),
            unknown: c.unknown(&["sourceUrl", "sourceTitle", "extra"]),
        }),
    };

    Ok(Element {
        id: obj.req_str("id")?,
        kind,
        width: obj.req_f64("width")?,
        height: obj.req_f64("height")?,
        transforms,
        text: obj.opt_str("text")?,
        clipping,
        unknown: obj.unknown(&[
            "id",
            "kind",
            "width",
            "height",
            "transforms",
            "text",
            "clipping",
        ]),
    })
}

struct Obj<'a> {
    map: &'a Map<String, Value>,
    path: String,
}

impl<'a> Obj<'a> {
    fn new(value: &'a Value, path: String) -> Result<Self> {
        match value {
            Value::Object(map) => Ok(Self { map, path }),
            other => Err(type_error(path, "object", other)),
        }
    }

    fn child(&self, name: &str) -> String {
        if self.path.is_empty() {
            name.to_owned()
        } else {
            format!("{}.{name}", self.path)
        }
    }

    /// Absent and `null` are both treated as missing.
    fn get(&self, name: &str) -> Option<&'a Value> {
        self.map.get(name).filter(|v| !v.is_null())
    }

    fn required(&self, name: &str) -> Result<&'a Value> {
        self.get(name)
            .ok_or_else(|| DocumentError::schema(self.child(name), "missing required field"))
    }

    fn req_str(&self, name: &str) -> Result<String> {
        match self.required(name)? {
            Value::String(s) => Ok(s.clone()),
            other => Err(type_error(self.child(name), "string", other)),
        }
    }

    fn opt_str(&self, name: &str) -> Result<Option<String>> {
        match self.get(name) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(other) => Err(type_error(self.child(name), "string", other)),
        }
    }

    fn req_f64(&self, name: &str) -> Result<f64> {
        match self.required(name)? {
            Value::Number(n) => n
                .as_f64()
                .filter(|f| f.is_finite())
                .ok_or_else(|| DocumentError::schema(self.child(name), "number must be finite")),
            other => Err(type_error(self.child(name), "number", other)),
        }
    }

    fn req_obj(&self, name: &str) -> Result<Obj<'a>> {
        Obj::new(self.required(name)?, self.child(name))
    }

    fn opt_obj(&self, name: &str) -> Result<Option<Obj<'a>>> {
        self.get(name)
            .map(|v| Obj::new(v, self.child(name)))
            .transpose()
    }

    fn unknown(&self, known: &[&str]) -> UnknownFields {
        self.map
            .iter()
            .filter(|(k, _)| !known.contains(&k.as_str()))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }
}

fn type_error(path: String, expected: &str, got: &Value) -> DocumentError {
    let got = match got {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    };
    DocumentError::schema(path, format!("expected {expected}, got {got}"))
}
