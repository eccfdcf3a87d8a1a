//! Canonical JSON encoding.
//!
//! Stable bytes for hashing and cache keys:
//! - object keys sorted lexicographically (by UTF-8 bytes)
//! - arrays keep their order
//! - no insignificant whitespace
//! - integral floats within the exactly representable range are written as
//!   integers, other floats use the shortest round-trip representation

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Largest magnitude below which every integer is exactly representable in f64.
const EXACT_INT_LIMIT: f64 = 9_007_199_254_740_992.0;

pub fn to_canonical_bytes<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<Vec<u8>> {
    let v = serde_json::to_value(value)?;
    Ok(value_to_canonical_bytes(&v))
}

pub fn to_canonical_string<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let bytes = to_canonical_bytes(value)?;
    // The writer only emits UTF-8.
    Ok(String::from_utf8(bytes).expect("canonical JSON is UTF-8"))
}

pub fn value_to_canonical_bytes(value: &Value) -> Vec<u8> {
    let mut out = Vec::with_capacity(256);
    write_value(&mut out, value);
    out
}

/// Lowercase hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest.iter() {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

fn write_value(out: &mut Vec<u8>, value: &Value) {
    match value {
        Value::Null => out.extend_from_slice(b"null"),
        Value::Bool(true) => out.extend_from_slice(b"true"),
        Value::Bool(false) => out.extend_from_slice(b"false"),
        Value::Number(n) => write_number(out, n),
        Value::String(s) => write_string(out, s),
        Value::Array(items) => {
            out.push(b'[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(b',');
                }
                write_value(out, item);
            }
            out.push(b']');
        }
        Value::Object(map) => {
            let mut entries: Vec<(&String, &Value)> = map.iter().collect();
            entries.sort_by(|a, b| a.0.as_bytes().cmp(b.0.as_bytes()));
            out.push(b'{');
            for (i, (k, v)) in entries.into_iter().enumerate() {
                if i > 0 {
                    out.push(b',');
                }
                write_string(out, k);
                out.push(b':');
                write_value(out, v);
            }
            out.push(b'}');
        }
    }
}

fn write_number(out: &mut Vec<u8>, n: &serde_json::Number) {
    if n.is_i64() || n.is_u64() {
        out.extend_from_slice(n.to_string().as_bytes());
        return;
    }
    let f = n.as_f64().unwrap_or(0.0);
    if f.fract() == 0.0 && f.abs() < EXACT_INT_LIMIT {
        let i = f as i64;
        out.extend_from_slice(i.to_string().as_bytes());
    } else {
        out.extend_from_slice(n.to_string().as_bytes());
    }
}

fn write_string(out: &mut Vec<u8>, s: &str) {
    // serde_json escapes control characters, quotes and backslashes only.
    let encoded = serde_json::to_string(s).expect("string serialization is infallible");
    out.extend_from_slice(encoded.as_bytes());
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_sorted_and_minified() {
        let v = json!({"b": 1, "a": {"d": [3, 2], "c": null}});
        assert_eq!(
            value_to_canonical_bytes(&v),
            br#"{"a":{"c":null,"d":[3,2]},"b":1}"#
        );
    }

    #[test]
    fn integral_floats_render_as_integers() {
        let v = json!([10.0, -3.0, 0.5, 1e300, -0.0]);
        assert_eq!(
            String::from_utf8(value_to_canonical_bytes(&v)).unwrap(),
            "[10,-3,0.5,1e+300,0]"
        );
    }

    #[test]
    fn strings_are_escaped() {
        let v = json!({"k": "a\"b\n"});
        assert_eq!(value_to_canonical_bytes(&v), br#"{"k":"a\"b\n"}"#);
    }

    #[test]
    fn sha256_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
