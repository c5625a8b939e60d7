//! The JSON document format shared by every subcommand.
//!
//! ```json
//! {
//!   "space": { "points": ["p", "q", "r"],
//!              "matrix": [[0, 1, "3/2"], [1, 0, 1], ["3/2", 1, 0]] },
//!   "pseudometrics": { "d": [[0, 1, 1], [1, 0, 0], [1, 0, 0]] },
//!   "subset": ["p", "q"],
//!   "bijection": { "p": "a", "q": "b", "r": "c" }
//! }
//! ```
//!
//! Entries are integers or `"p/q"` strings; output always uses strings.
//! Matrices follow the order of `points`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::error::Error;
use crate::pseudometric::Pseudometric;
use crate::rational::{self, Rational};
use crate::space::{Bijection, Space};

/// A rational matrix entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry(pub Rational);

impl Serialize for Entry {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&rational::format(&self.0))
    }
}

struct EntryVisitor;

impl<'de> Visitor<'de> for EntryVisitor {
    type Value = Entry;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("an integer or a string \"p/q\"")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Entry, E> {
        Ok(Entry(rational::int(v)))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Entry, E> {
        Ok(Entry(Rational::from_integer(v.into())))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Entry, E> {
        rational::parse(v)
            .map(Entry)
            .ok_or_else(|| E::custom(format!("`{v}` is not a rational")))
    }
}

impl<'de> Deserialize<'de> for Entry {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Entry, D::Error> {
        deserializer.deserialize_any(EntryVisitor)
    }
}

pub type Matrix = Vec<Vec<Entry>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    pub points: Vec<String>,
    pub matrix: Matrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub space: SpaceDoc,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub pseudometrics: BTreeMap<String, Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset: Option<Vec<String>>,
    /// Point of this space to point of the other space.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bijection: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transcript: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<BTreeMap<String, bool>>,
}

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("{at}: {source}")]
    Invalid { at: String, source: Error },
    #[error("{0}")]
    Missing(String),
}

fn to_rows(matrix: &Matrix) -> Vec<Vec<Rational>> {
    matrix
        .iter()
        .map(|row| row.iter().map(|e| e.0.clone()).collect())
        .collect()
}

pub fn matrix_of(d: &Pseudometric) -> Matrix {
    d.rows()
        .into_iter()
        .map(|row| row.into_iter().map(Entry).collect())
        .collect()
}

fn invalid(at: impl Into<String>) -> impl FnOnce(Error) -> DocumentError {
    let at = at.into();
    move |source| DocumentError::Invalid { at, source }
}

impl Document {
    pub fn parse(text: &str) -> Result<Document, DocumentError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &str) -> Result<Document, DocumentError> {
        let text = std::fs::read_to_string(path).map_err(|source| DocumentError::Io {
            path: path.to_string(),
            source,
        })?;
        Document::parse(&text).map_err(|e| match e {
            DocumentError::Syntax(s) => DocumentError::Missing(format!("{path}: parse error: {s}")),
            other => other,
        })
    }

    pub fn from_space(space: &Space) -> Document {
        Document {
            space: SpaceDoc {
                points: space.labels().to_vec(),
                matrix: (0..space.len())
                    .map(|i| {
                        (0..space.len())
                            .map(|j| Entry(space.dist(i, j).clone()))
                            .collect()
                    })
                    .collect(),
            },
            pseudometrics: BTreeMap::new(),
            subset: None,
            bijection: None,
            transcript: None,
            checks: None,
        }
    }

    pub fn with_pseudometric(mut self, name: &str, d: &Pseudometric) -> Document {
        self.pseudometrics.insert(name.to_string(), matrix_of(d));
        self
    }

    /// Indented JSON with scalar arrays, such as matrix rows, kept on one line.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("documents serialize");
        let mut out = String::new();
        write_value(&value, 0, &mut out);
        out
    }

    pub fn space(&self) -> Result<Arc<Space>, DocumentError> {
        Space::new(self.space.points.clone(), to_rows(&self.space.matrix)).map_err(invalid("space"))
    }

    /// The named matrix, as given (not yet validated against a space).
    pub fn matrix(&self, name: &str) -> Result<Vec<Vec<Rational>>, DocumentError> {
        self.pseudometrics
            .get(name)
            .map(to_rows)
            .ok_or_else(|| DocumentError::Missing(format!("no pseudometric named `{name}`")))
    }

    pub fn pseudometric(
        &self,
        space: &Arc<Space>,
        name: &str,
    ) -> Result<Pseudometric, DocumentError> {
        Pseudometric::new(space, self.matrix(name)?)
            .map_err(invalid(format!("pseudometrics.{name}")))
    }

    /// The `subset` field as point indices, in file order.
    pub fn subset(&self, space: &Space) -> Result<Option<Vec<usize>>, DocumentError> {
        let Some(labels) = &self.subset else {
            return Ok(None);
        };
        labels
            .iter()
            .map(|l| space.index_of(l).map_err(invalid("subset")))
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    /// The `bijection` field as a map from `source` points to `target` points.
    pub fn bijection(&self, source: &Space, target: &Space) -> Result<Bijection, DocumentError> {
        let map = self
            .bijection
            .as_ref()
            .ok_or_else(|| DocumentError::Missing("no `bijection` field".into()))?;
        Bijection::from_labels(
            source,
            target,
            map.iter().map(|(a, b)| (a.as_str(), b.as_str())),
        )
        .map_err(invalid("bijection"))
    }

    pub fn set_bijection(&mut self, phi: &Bijection, source: &Space, target: &Space) {
        self.bijection = Some(
            (0..phi.len())
                .map(|i| {
                    (
                        source.label(i).to_string(),
                        target.label(phi.apply(i)).to_string(),
                    )
                })
                .collect(),
        );
    }
}

fn is_scalar(v: &serde_json::Value) -> bool {
    !(v.is_array() || v.is_object())
}

fn write_value(v: &serde_json::Value, indent: usize, out: &mut String) {
    use serde_json::Value;
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Array(items) if items.iter().all(is_scalar) => {
            let inline: Vec<String> = items
                .iter()
                .map(|item| serde_json::to_string(item).expect("scalars serialize"))
                .collect();
            out.push('[');
            out.push_str(&inline.join(", "));
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(item, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) if !map.is_empty() => {
            out.push_str("{\n");
            for (i, (key, item)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(key).expect("keys serialize"));
                out.push_str(": ");
                write_value(item, indent + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        other => out.push_str(&serde_json::to_string(other).expect("scalars serialize")),
    }
}
