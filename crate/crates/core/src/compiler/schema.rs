//! Vendored target-grammar JSON schemas.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use serde_json::Value;
use sha2::{Digest, Sha256};

use super::Target;

pub const VEGA_LITE_FILE: &str = "vega-lite-v4.json";
pub const VEGA_FILE: &str = "vega-v5.json";
pub const SCHEMA_DIR_ENV: &str = "DEMOVIZ_SCHEMA_DIR";

const EMBEDDED_VEGA_LITE: &str = include_str!("../../schemas/vega-lite-v4.json");
const EMBEDDED_VEGA: &str = include_str!("../../schemas/vega-v5.json");

#[derive(Debug, thiserror::Error)]
pub enum SchemaError {
    #[error("failed to read schema {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("schema {name} is not valid JSON: {message}")]
    Parse { name: String, message: String },
    #[error("schema {name} cannot be compiled: {message}")]
    Compile { name: String, message: String },
}

struct Entry {
    name: &'static str,
    raw: String,
    validator: OnceLock<Result<jsonschema::Validator, String>>,
}

impl Entry {
    fn new(name: &'static str, raw: String) -> Result<Self, SchemaError> {
        serde_json::from_str::<Value>(&raw).map_err(|e| SchemaError::Parse {
            name: name.to_string(),
            message: e.to_string(),
        })?;
        Ok(Entry {
            name,
            raw,
            validator: OnceLock::new(),
        })
    }

    fn validator(&self) -> Result<&jsonschema::Validator, SchemaError> {
        self.validator
            .get_or_init(|| {
                let mut schema: Value =
                    serde_json::from_str(&self.raw).map_err(|e| e.to_string())?;
                escape_refs(&mut schema);
                jsonschema::options()
                    .build(&schema)
                    .map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(|message| SchemaError::Compile {
                name: self.name.to_string(),
                message: message.clone(),
            })
    }

    fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.raw.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// The pinned Vega-Lite and Vega schemas, compiled on first use.
pub struct SchemaSet {
    vega_lite: Entry,
    vega: Entry,
}

impl std::fmt::Debug for SchemaSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SchemaSet")
            .field("fingerprints", &self.fingerprints())
            .finish()
    }
}

impl SchemaSet {
    /// Process-wide copy of the schemas compiled into the binary.
    pub fn embedded() -> Arc<SchemaSet> {
        static EMBEDDED: OnceLock<Arc<SchemaSet>> = OnceLock::new();
        EMBEDDED
            .get_or_init(|| {
                Arc::new(SchemaSet {
                    vega_lite: Entry::new(VEGA_LITE_FILE, EMBEDDED_VEGA_LITE.to_string())
                        .expect("embedded schema"),
                    vega: Entry::new(VEGA_FILE, EMBEDDED_VEGA.to_string())
                        .expect("embedded schema"),
                })
            })
            .clone()
    }

    pub fn from_dir(dir: &Path) -> Result<SchemaSet, SchemaError> {
        let read = |name: &'static str| {
            let path = dir.join(name);
            let raw = std::fs::read_to_string(&path).map_err(|source| SchemaError::Io {
                path: path.display().to_string(),
                source,
            })?;
            Entry::new(name, raw)
        };
        Ok(SchemaSet {
            vega_lite: read(VEGA_LITE_FILE)?,
            vega: read(VEGA_FILE)?,
        })
    }

    /// Uses `DEMOVIZ_SCHEMA_DIR` when set, the embedded schemas otherwise.
    pub fn from_env() -> Result<Arc<SchemaSet>, SchemaError> {
        match std::env::var_os(SCHEMA_DIR_ENV) {
            Some(dir) if !dir.is_empty() => Ok(Arc::new(SchemaSet::from_dir(Path::new(&dir))?)),
            _ => Ok(SchemaSet::embedded()),
        }
    }

    fn entry(&self, target: Target) -> &Entry {
        match target {
            Target::VegaLite => &self.vega_lite,
            Target::Vega => &self.vega,
        }
    }

    /// Validates a document, returning one message per violation.
    pub fn validate(&self, target: Target, document: &Value) -> Result<(), Vec<String>> {
        let validator = self
            .entry(target)
            .validator()
            .map_err(|e| vec![e.to_string()])?;
        let errors: Vec<String> = validator
            .iter_errors(document)
            .map(|e| format!("{} at {}", e, e.instance_path()))
            .collect();
        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }

    /// Compiles both schemas now rather than on the first compilation.
    pub fn warm(&self) -> Result<(), SchemaError> {
        self.vega_lite.validator()?;
        self.vega.validator()?;
        Ok(())
    }

    /// SHA-256 of each schema file, keyed by file name.
    pub fn fingerprints(&self) -> BTreeMap<String, String> {
        [&self.vega_lite, &self.vega]
            .into_iter()
            .map(|e| (e.name.to_string(), e.fingerprint()))
            .collect()
    }
}

/// Percent-encodes `$ref` characters that are not legal in a URI reference.
/// The Vega-Lite schema uses definition names such as `MarkConfig<>`.
fn escape_refs(value: &mut Value) {
    match value {
        Value::Object(map) => {
            for (key, v) in map.iter_mut() {
                match v {
                    Value::String(s) if key == "$ref" => *s = escape_ref(s),
                    _ => escape_refs(v),
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(escape_refs),
        _ => {}
    }
}

fn escape_ref(reference: &str) -> String {
    let mut out = String::with_capacity(reference.len());
    for c in reference.chars() {
        if c.is_ascii_alphanumeric() || "#/-._~!$&'()*+,;=:@%".contains(c) {
            out.push(c);
        } else {
            let mut buf = [0u8; 4];
            for b in c.encode_utf8(&mut buf).bytes() {
                out.push_str(&format!("%{b:02X}"));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn refs_are_escaped() {
        assert_eq!(
            escape_ref("#/definitions/MarkConfig<>"),
            "#/definitions/MarkConfig%3C%3E"
        );
        assert_eq!(escape_ref("#/definitions/Plain"), "#/definitions/Plain");
    }

    #[test]
    fn embedded_schemas_accept_and_reject() {
        let set = SchemaSet::embedded();
        assert!(set
            .validate(Target::Vega, &json!({"marks": [{"type": "rule"}]}))
            .is_ok());
        assert!(set
            .validate(
                Target::VegaLite,
                &json!({"mark": "point", "data": {"values": []}})
            )
            .is_ok());
        assert!(set
            .validate(Target::VegaLite, &json!({"mark": "bogus"}))
            .is_err());
        assert_eq!(set.fingerprints().len(), 2);
    }
}
