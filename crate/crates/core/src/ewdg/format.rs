//! JSON instance documents.
//!
//! ```json
//! { "name": "...", "nodes": ["v0", ...], "source": "v0", "goals": ["v3"],
//!   "edges": [ { "from": "v0", "to": "v1",
//!                "levels": [ {"l": 3, "u": 4} ], "true_cost": 3 } ] }
//! ```
//!
//! Numbers are read exactly (decimal text is never routed through `f64`).
//! A value that has no terminating decimal form is written as a `"p/q"`
//! string, and such strings are accepted on input.

use std::collections::HashMap;

use serde::ser::{Serialize, Serializer};
use serde_json::{Map, Value};

use crate::ewdg::{EdgeSpec, EstimatorLevel, EwdgError, NodeId, ProblemInstance};
use crate::scalar::Scalar;

fn schema(field: impl Into<String>, message: impl Into<String>) -> EwdgError {
    EwdgError::Schema { field: field.into(), message: message.into() }
}

fn field<'v>(obj: &'v Map<String, Value>, key: &str, path: &str) -> Result<&'v Value, EwdgError> {
    obj.get(key).ok_or_else(|| schema(join(path, key), "missing field"))
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_owned()
    } else {
        format!("{path}.{key}")
    }
}

fn as_str<'v>(value: &'v Value, path: &str) -> Result<&'v str, EwdgError> {
    value.as_str().ok_or_else(|| schema(path, "expected a string"))
}

fn as_array<'v>(value: &'v Value, path: &str) -> Result<&'v Vec<Value>, EwdgError> {
    value.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn as_object<'v>(value: &'v Value, path: &str) -> Result<&'v Map<String, Value>, EwdgError> {
    value.as_object().ok_or_else(|| schema(path, "expected an object"))
}

fn as_scalar<T: Scalar>(value: &Value, path: &str) -> Result<T, EwdgError> {
    let text = match value {
        Value::Number(n) => n.to_string(),
        Value::String(s) if s.contains('/') => s.clone(),
        _ => return Err(schema(path, "expected a number")),
    };
    T::parse_exact(&text).ok_or_else(|| schema(path, format!("cannot read `{text}` as an exact number")))
}

fn node_list(value: &Value, path: &str) -> Result<Vec<NodeId>, EwdgError> {
    as_array(value, path)?
        .iter()
        .enumerate()
        .map(|(i, v)| as_str(v, &format!("{path}[{i}]")).map(NodeId::new))
        .collect()
}

/// Reads an instance document. Structural problems and parallel edges are
/// errors; numeric invariants are left to [`ProblemInstance::validate`].
pub fn parse_instance<T: Scalar>(text: &str) -> Result<ProblemInstance<T>, EwdgError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| EwdgError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let root = as_object(&doc, "$")?;
    let name = as_str(field(root, "name", "")?, "name")?.to_owned();
    let nodes = node_list(field(root, "nodes", "")?, "nodes")?;
    let source = NodeId::new(as_str(field(root, "source", "")?, "source")?);
    let goals = node_list(field(root, "goals", "")?, "goals")?;

    let mut edges = Vec::new();
    let mut seen: HashMap<(String, String), usize> = HashMap::new();
    for (i, raw) in as_array(field(root, "edges", "")?, "edges")?.iter().enumerate() {
        let path = format!("edges[{i}]");
        let obj = as_object(raw, &path)?;
        let from = as_str(field(obj, "from", &path)?, &join(&path, "from"))?.to_owned();
        let to = as_str(field(obj, "to", &path)?, &join(&path, "to"))?.to_owned();
        if let Some(first) = seen.insert((from.clone(), to.clone()), i) {
            return Err(schema(path, format!("parallel edge {from}->{to} (already declared as edges[{first}])")));
        }
        let levels_path = join(&path, "levels");
        let levels = as_array(field(obj, "levels", &path)?, &levels_path)?
            .iter()
            .enumerate()
            .map(|(j, lv)| {
                let lp = format!("{levels_path}[{j}]");
                let lo = as_object(lv, &lp)?;
                Ok(EstimatorLevel {
                    l: as_scalar(field(lo, "l", &lp)?, &join(&lp, "l"))?,
                    u: as_scalar(field(lo, "u", &lp)?, &join(&lp, "u"))?,
                })
            })
            .collect::<Result<Vec<_>, EwdgError>>()?;
        if levels.is_empty() {
            return Err(schema(levels_path, "at least one estimator level is required"));
        }
        let true_cost = match obj.get("true_cost") {
            None | Some(Value::Null) => None,
            Some(v) => Some(as_scalar(v, &join(&path, "true_cost"))?),
        };
        edges.push(EdgeSpec { from: NodeId(from), to: NodeId(to), levels, true_cost });
    }
    Ok(ProblemInstance { name, nodes, edges, source, goals })
}

struct Num<'a, T>(&'a T);

impl<T: Scalar> Serialize for Num<'_, T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.0.decimal_text() {
            Some(text) => {
                let number: serde_json::Number = text.parse().map_err(serde::ser::Error::custom)?;
                number.serialize(serializer)
            }
            None => serializer.serialize_str(&self.0.to_string()),
        }
    }
}

#[derive(serde::Serialize)]
#[serde(bound = "")]
struct LevelDoc<'a, T: Scalar> {
    l: Num<'a, T>,
    u: Num<'a, T>,
}

#[derive(serde::Serialize)]
#[serde(bound = "")]
struct EdgeDoc<'a, T: Scalar> {
    from: &'a str,
    to: &'a str,
    levels: Vec<LevelDoc<'a, T>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    true_cost: Option<Num<'a, T>>,
}

#[derive(serde::Serialize)]
#[serde(bound = "")]
struct InstanceDoc<'a, T: Scalar> {
    name: &'a str,
    nodes: Vec<&'a str>,
    source: &'a str,
    goals: Vec<&'a str>,
    edges: Vec<EdgeDoc<'a, T>>,
}

/// Canonical document: fixed key order, declaration-ordered edges,
/// two-space indentation, trailing newline.
pub fn serialize_instance<T: Scalar>(inst: &ProblemInstance<T>) -> String {
    let doc = InstanceDoc {
        name: &inst.name,
        nodes: inst.nodes.iter().map(NodeId::as_str).collect(),
        source: inst.source.as_str(),
        goals: inst.goals.iter().map(NodeId::as_str).collect(),
        edges: inst
            .edges
            .iter()
            .map(|e| EdgeDoc {
                from: e.from.as_str(),
                to: e.to.as_str(),
                levels: e.levels.iter().map(|lv| LevelDoc { l: Num(&lv.l), u: Num(&lv.u) }).collect(),
                true_cost: e.true_cost.as_ref().map(Num),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("instance serialization cannot fail");
    out.push('\n');
    out
}
