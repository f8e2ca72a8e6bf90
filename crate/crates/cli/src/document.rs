//! Tuple documents: parsing, schema validation and conversion.

use std::collections::BTreeMap;

use dilatelab::dilation_data::{Conditions, DilationData, Space};
use dilatelab::linalg::{ComplexMatrix, Tolerance};
use dilatelab::tuples::{make_tuple, ContractionTuple};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const DOCUMENT_SCHEMA: &str = "dilatelab/tuple-document/v1";

/// Full-space unitaries and projections supplied with a tuple.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Candidates {
    pub u: Vec<ComplexMatrix>,
    pub p: Vec<ComplexMatrix>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleDocument {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub name: String,
    pub n: usize,
    pub dim: usize,
    pub matrices: Vec<ComplexMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub expected: BTreeMap<String, bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Candidates>,
    /// Condition family checked by `verify` when none is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conditions: Option<String>,
}

fn default_schema() -> String {
    DOCUMENT_SCHEMA.to_string()
}

/// Input rejected before any computation.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemaError {
    /// JSON pointer to the offending value; empty for the document root.
    pub pointer: String,
    pub message: String,
}

impl SchemaError {
    fn new(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for SchemaError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let at = if self.pointer.is_empty() { "/" } else { &self.pointer };
        write!(f, "{at}: {}", self.message)
    }
}

const KNOWN_KEYS: [&str; 9] = [
    "schema", "name", "n", "dim", "matrices", "tolerance", "expected", "candidates", "conditions",
];

pub fn parse_conditions(s: &str) -> Option<Conditions> {
    Some(match s {
        "main" => Conditions::Main,
        "coromain" => Conditions::Coromain,
        "pure" => Conditions::Pure,
        "bdf" => Conditions::Bdf,
        _ => return None,
    })
}

fn count(v: &Value, ptr: &str, min: u64) -> Result<usize, SchemaError> {
    match v.as_u64() {
        Some(k) if k >= min => Ok(k as usize),
        _ => Err(SchemaError::new(ptr, format!("expected an integer >= {min}"))),
    }
}

fn check_matrix(v: &Value, ptr: &str, dim: usize) -> Result<(), SchemaError> {
    let rows = v
        .as_array()
        .ok_or_else(|| SchemaError::new(ptr, "expected an array of rows"))?;
    if rows.len() != dim {
        return Err(SchemaError::new(ptr, format!("expected {dim} rows, found {}", rows.len())));
    }
    for (r, row) in rows.iter().enumerate() {
        let rp = format!("{ptr}/{r}");
        let entries = row
            .as_array()
            .ok_or_else(|| SchemaError::new(&rp, "expected an array of entries"))?;
        if entries.len() != dim {
            return Err(SchemaError::new(&rp, format!("expected {dim} entries, found {}", entries.len())));
        }
        for (c, e) in entries.iter().enumerate() {
            let ep = format!("{rp}/{c}");
            let pair = e.as_array().filter(|p| p.len() == 2);
            let ok = pair.is_some_and(|p| p.iter().all(|x| x.as_f64().is_some_and(f64::is_finite)));
            if !ok {
                return Err(SchemaError::new(ep, "expected [re, im] with finite numbers"));
            }
        }
    }
    Ok(())
}

fn check_matrix_list(v: &Value, ptr: &str, n: usize, dim: usize) -> Result<(), SchemaError> {
    let list = v
        .as_array()
        .ok_or_else(|| SchemaError::new(ptr, "expected an array of matrices"))?;
    if list.len() != n {
        return Err(SchemaError::new(ptr, format!("expected {n} matrices, found {}", list.len())));
    }
    for (i, m) in list.iter().enumerate() {
        check_matrix(m, &format!("{ptr}/{i}"), dim)?;
    }
    Ok(())
}

/// Structural validation against the v1 document schema.
pub fn validate_value(doc: &Value) -> Result<(), SchemaError> {
    let obj = doc
        .as_object()
        .ok_or_else(|| SchemaError::new("", "expected a JSON object"))?;
    if let Some(k) = obj.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
        return Err(SchemaError::new(format!("/{k}"), "unknown field"));
    }
    if let Some(s) = obj.get("schema") {
        if s.as_str() != Some(DOCUMENT_SCHEMA) {
            return Err(SchemaError::new("/schema", format!("expected \"{DOCUMENT_SCHEMA}\"")));
        }
    }
    let need = |k: &str| obj.get(k).ok_or_else(|| SchemaError::new("", format!("missing field \"{k}\"")));
    if !need("name")?.as_str().is_some_and(|s| !s.is_empty()) {
        return Err(SchemaError::new("/name", "expected a nonempty string"));
    }
    let n = count(need("n")?, "/n", 1)?;
    let dim = count(need("dim")?, "/dim", 1)?;
    check_matrix_list(need("matrices")?, "/matrices", n, dim)?;
    if let Some(t) = obj.get("tolerance") {
        if !t.as_f64().is_some_and(|x| x.is_finite() && x > 0.0) {
            return Err(SchemaError::new("/tolerance", "expected a positive finite number"));
        }
    }
    if let Some(e) = obj.get("expected") {
        let map = e
            .as_object()
            .ok_or_else(|| SchemaError::new("/expected", "expected an object of booleans"))?;
        if let Some((k, _)) = map.iter().find(|(_, v)| !v.is_boolean()) {
            return Err(SchemaError::new(format!("/expected/{k}"), "expected a boolean"));
        }
    }
    if let Some(c) = obj.get("candidates") {
        let map = c
            .as_object()
            .ok_or_else(|| SchemaError::new("/candidates", "expected an object with \"u\" and \"p\""))?;
        if let Some(k) = map.keys().find(|k| *k != "u" && *k != "p") {
            return Err(SchemaError::new(format!("/candidates/{k}"), "unknown field"));
        }
        for k in ["u", "p"] {
            let v = map
                .get(k)
                .ok_or_else(|| SchemaError::new("/candidates", format!("missing field \"{k}\"")))?;
            check_matrix_list(v, &format!("/candidates/{k}"), n, dim)?;
        }
    }
    if let Some(c) = obj.get("conditions") {
        if !c.as_str().is_some_and(|s| parse_conditions(s).is_some()) {
            return Err(SchemaError::new("/conditions", "expected one of main, coromain, pure, bdf"));
        }
    }
    Ok(())
}

/// Parses and validates a document from JSON text.
pub fn parse_document(text: &str) -> Result<TupleDocument, SchemaError> {
    let value: Value = serde_json::from_str(text).map_err(|e| SchemaError::new("", format!("invalid JSON: {e}")))?;
    validate_value(&value)?;
    serde_json::from_value(value).map_err(|e| SchemaError::new("", e.to_string()))
}

impl TupleDocument {
    pub fn new(name: impl Into<String>, matrices: Vec<ComplexMatrix>) -> Self {
        Self {
            schema: default_schema(),
            name: name.into(),
            n: matrices.len(),
            dim: matrices.first().map_or(0, |m| m.nrows()),
            matrices,
            tolerance: None,
            expected: BTreeMap::new(),
            candidates: None,
            conditions: None,
        }
    }

    pub fn tuple(&self, tol: Tolerance) -> dilatelab::Result<ContractionTuple> {
        make_tuple(self.matrices.clone(), tol)
    }

    pub fn default_conditions(&self) -> Option<Conditions> {
        self.conditions.as_deref().and_then(parse_conditions)
    }

    /// Supplied candidates compressed to the defect space of `T`, when the
    /// document carries them and `space` is that space.
    pub fn stated_data(
        &self,
        t: &ContractionTuple,
        space: Space,
        tol: Tolerance,
    ) -> Option<dilatelab::Result<DilationData>> {
        let c = self.candidates.as_ref()?;
        (space == Space::DefectOfT).then(|| DilationData::from_full_space(t, space, c.u.clone(), c.p.clone(), tol))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(body: &str) -> Result<TupleDocument, SchemaError> {
        parse_document(body)
    }

    const OK: &str = r#"{"name":"x","n":1,"dim":1,"matrices":[[[[0.5,0.0]]]]}"#;

    #[test]
    fn minimal_document_parses() {
        let d = doc(OK).unwrap();
        assert_eq!(d.schema, DOCUMENT_SCHEMA);
        assert_eq!(d.matrices[0][(0, 0)].re, 0.5);
    }

    #[test]
    fn errors_carry_json_pointers() {
        let cases = [
            (r#"[]"#, ""),
            (r#"{"name":"x","n":1,"dim":1}"#, ""),
            (r#"{"name":"x","n":0,"dim":1,"matrices":[]}"#, "/n"),
            (r#"{"name":"x","n":1,"dim":1,"matrices":[[[[0.5]]]]}"#, "/matrices/0/0/0"),
            (r#"{"name":"x","n":1,"dim":2,"matrices":[[[[0,0],[0,0]]]]}"#, "/matrices/0"),
            (r#"{"name":"x","n":2,"dim":1,"matrices":[[[[0,0]]]]}"#, "/matrices"),
            (r#"{"name":"x","n":1,"dim":1,"matrices":[[[[0,0]]]],"tolerance":-1}"#, "/tolerance"),
            (r#"{"name":"x","n":1,"dim":1,"matrices":[[[[0,0]]]],"expected":{"a":1}}"#, "/expected/a"),
            (r#"{"name":"x","n":1,"dim":1,"matrices":[[[[0,0]]]],"extra":1}"#, "/extra"),
            (r#"{"name":"x","n":1,"dim":1,"matrices":[[[[0,0]]]],"conditions":"all"}"#, "/conditions"),
            (r#"{"name":"x","n":1,"dim":1,"matrices":[[[[0,0]]]],"candidates":{"u":[]}}"#, "/candidates/u"),
            (r#"{"schema":"v0","name":"x","n":1,"dim":1,"matrices":[[[[0,0]]]]}"#, "/schema"),
        ];
        for (body, pointer) in cases {
            assert_eq!(doc(body).unwrap_err().pointer, pointer, "{body}");
        }
    }

    #[test]
    fn round_trip_is_stable() {
        let d = doc(OK).unwrap();
        let text = serde_json::to_string(&d).unwrap();
        assert_eq!(serde_json::to_string(&doc(&text).unwrap()).unwrap(), text);
    }
}
