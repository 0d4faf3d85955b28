//! Versioned JSON documents.
//!
//! Complex numbers are `[re, im]` arrays and floats are written in shortest
//! round-trip form, so reading a document back yields identical values.

use std::path::Path;

use num_complex::Complex64 as C64;
use poncelet_core::{PentagonSolutionSet, PonceletConfig, Tolerances};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

pub const SCHEMA: u32 = 1;
pub const TOOL_NAME: &str = "poncelet";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tool {
    pub name: String,
    pub version: String,
}

impl Default for Tool {
    fn default() -> Self {
        Self {
            name: TOOL_NAME.to_string(),
            version: TOOL_VERSION.to_string(),
        }
    }
}

/// The arguments a document was solved from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Input {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f1: Option<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f2: Option<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f3: Option<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f4: Option<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f5: Option<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum Payload {
    Poncelet {
        config: PonceletConfig,
    },
    /// The pentagon solution set together with its two distinguished
    /// configurations: `poncelet` has numerical-range foci `f1, f2`,
    /// `pentagram` has pentagram-ellipse foci `f1, f2`.
    Pentagon {
        solution_set: PentagonSolutionSet,
        poncelet: PonceletConfig,
        pentagram: PonceletConfig,
    },
}

impl Payload {
    pub fn configs(&self) -> Vec<(&'static str, &PonceletConfig)> {
        match self {
            Payload::Poncelet { config } => vec![("config", config)],
            Payload::Pentagon {
                poncelet, pentagram, ..
            } => vec![("poncelet", poncelet), ("pentagram", pentagram)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub schema: u32,
    pub tool: Tool,
    pub tolerances: Tolerances,
    pub input: Input,
    #[serde(flatten)]
    pub payload: Payload,
}

impl Document {
    pub fn new(tolerances: Tolerances, input: Input, payload: Payload) -> Self {
        Self {
            schema: SCHEMA,
            tool: Tool::default(),
            tolerances,
            input,
            payload,
        }
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let value = serde_json::to_value(self).map_err(|e| CliError::Usage(e.to_string()))?;
        let mut s = String::new();
        pretty(&value, 0, &mut s);
        check_finite(self, &s)?;
        s.push('\n');
        Ok(s)
    }

    /// Parses and validates a document; `path` only labels errors.
    pub fn from_json(text: &str, path: &Path) -> Result<Self, CliError> {
        let parse = |message: String| CliError::Parse {
            path: path.to_path_buf(),
            message,
        };
        let doc: Document = serde_json::from_str(text).map_err(|e| parse(e.to_string()))?;
        if doc.schema != SCHEMA {
            return Err(parse(format!("unsupported schema {}, expected {SCHEMA}", doc.schema)));
        }
        let problems = doc.tolerances.problems();
        if !problems.is_empty() {
            return Err(parse(problems.join("; ")));
        }
        for (name, c) in doc.payload.configs() {
            if c.verblunsky.len() + 1 != c.n || c.eigenvalues.len() + 1 != c.n {
                return Err(parse(format!(
                    "{name}: n = {} with {} Verblunsky coefficients and {} eigenvalues",
                    c.n,
                    c.verblunsky.len(),
                    c.eigenvalues.len()
                )));
            }
        }
        Ok(doc)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text, path)
    }
}

/// Indented JSON with arrays of scalars kept on one line.
fn pretty(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Array(a) if a.iter().all(|x| !x.is_array() && !x.is_object()) => {
            out.push('[');
            for (i, x) in a.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&x.to_string());
            }
            out.push(']');
        }
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                pretty(x, depth + 1, out);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            out.push_str("{\n");
            for (i, (k, x)) in m.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                pretty(x, depth + 1, out);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

// JSON has no encoding for non-finite floats; they come back as null.
fn check_finite(doc: &Document, text: &str) -> Result<(), CliError> {
    match serde_json::from_str::<Document>(text) {
        Ok(back) if back == *doc => Ok(()),
        _ => Err(CliError::Certification("document holds a non-finite value".to_string())),
    }
}
