//! Canonical JSON output.
//!
//! Every document leaving the engine goes through [`to_canonical_string`]:
//! keys sorted, two-space indentation, trailing newline. The CLI and the HTTP
//! service both use it so their outputs are byte-identical.

use serde::Serialize;
use serde_json::Value;

pub fn to_canonical_value<T: Serialize + ?Sized>(value: &T) -> Value {
    // Round-tripping through `Value` sorts object keys (BTreeMap-backed map).
    serde_json::to_value(value).expect("engine types always serialize")
}

pub fn to_canonical_string<T: Serialize + ?Sized>(value: &T) -> String {
    let value = to_canonical_value(value);
    let mut out = serde_json::to_string_pretty(&value).expect("json values always serialize");
    out.push('\n');
    out
}
