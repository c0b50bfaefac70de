//! JSON trace documents.
//!
//! ```json
//! {"events": [{"id": "e1", "op": "put", "args": [0]},
//!             {"id": "e4", "op": "get", "args": [], "ret": {"set": [2]}}],
//!  "vis": [["e1", "e4"]]}
//! ```
//!
//! Integers, strings and booleans map to the corresponding JSON scalars; sets
//! are wrapped as `{"set": [...]}`.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::event::{Event, EventId, OperationRecord, Value};
use crate::graph::{AbstractExecution, GraphError};

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("malformed trace JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid execution: {0}")]
    Graph(#[from] GraphError),
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct SetRepr<'a> {
            set: Vec<&'a Value>,
        }
        match self {
            Value::Int(i) => s.serialize_i64(*i),
            Value::Str(v) => s.serialize_str(v),
            Value::Bool(b) => s.serialize_bool(*b),
            Value::Set(items) => SetRepr {
                set: items.iter().collect(),
            }
            .serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = serde_json::Value::deserialize(d)?;
        value_from_json(&raw).map_err(D::Error::custom)
    }
}

fn value_from_json(raw: &serde_json::Value) -> Result<Value, String> {
    use serde_json::Value as J;
    match raw {
        J::Bool(b) => Ok(Value::Bool(*b)),
        J::Number(n) => n
            .as_i64()
            .map(Value::Int)
            .ok_or_else(|| format!("number {n} is not a 64-bit integer")),
        J::String(s) => Ok(Value::Str(s.clone())),
        J::Object(map) if map.len() == 1 && map.contains_key("set") => match &map["set"] {
            J::Array(items) => items
                .iter()
                .map(value_from_json)
                .collect::<Result<Vec<_>, _>>()
                .map(Value::set),
            other => Err(format!("`set` must be an array, found {other}")),
        },
        other => Err(format!(
            "expected integer, string, boolean or {{\"set\": [...]}}, found {other}"
        )),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceEvent {
    pub id: String,
    pub op: String,
    #[serde(default)]
    pub args: Vec<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ret: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replica: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceDocument {
    pub events: Vec<TraceEvent>,
    #[serde(default)]
    pub vis: Vec<(String, String)>,
}

impl TraceDocument {
    pub fn from_json(text: &str) -> Result<Self, TraceError> {
        Ok(serde_json::from_str(text)?)
    }

    /// JSON with one event and one edge per line, followed by a newline.
    pub fn to_json(&self) -> String {
        let line = |v: String| format!("    {v}");
        let events: Vec<String> = self
            .events
            .iter()
            .map(|e| line(serde_json::to_string(e).expect("trace events serialize")))
            .collect();
        let vis: Vec<String> = self
            .vis
            .iter()
            .map(|e| line(serde_json::to_string(e).expect("edges serialize")))
            .collect();
        let block = |items: Vec<String>| {
            if items.is_empty() {
                "[]".to_string()
            } else {
                format!("[\n{}\n  ]", items.join(",\n"))
            }
        };
        format!(
            "{{\n  \"events\": {},\n  \"vis\": {}\n}}\n",
            block(events),
            block(vis)
        )
    }

    pub fn into_execution(self) -> Result<AbstractExecution, GraphError> {
        let events = self
            .events
            .into_iter()
            .map(|e| Event {
                id: EventId(e.id),
                op: OperationRecord {
                    name: e.op,
                    args: e.args,
                    ret: e.ret,
                },
                replica: e.replica,
            })
            .collect();
        let vis = self
            .vis
            .into_iter()
            .map(|(a, b)| (EventId(a), EventId(b)))
            .collect();
        AbstractExecution::validate(events, vis)
    }

    /// Document listing the events of `exec` and its reduction.
    pub fn from_execution(exec: &AbstractExecution) -> Self {
        TraceDocument {
            events: exec
                .events()
                .iter()
                .map(|e| TraceEvent {
                    id: e.id.0.clone(),
                    op: e.op.name.clone(),
                    args: e.op.args.clone(),
                    ret: e.op.ret.clone(),
                    replica: e.replica.clone(),
                })
                .collect(),
            vis: exec
                .reduction()
                .into_iter()
                .map(|(a, b)| (a.0, b.0))
                .collect(),
        }
    }
}

/// Parses and validates a trace in one step.
pub fn load_execution(text: &str) -> Result<AbstractExecution, TraceError> {
    Ok(TraceDocument::from_json(text)?.into_execution()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_documented_example() {
        let text = r#"{"events":[{"id":"e1","op":"put","args":[0]},
            {"id":"e4","op":"get","args":[],"ret":{"set":[2]}}],"vis":[["e1","e4"]]}"#;
        let a = load_execution(text).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(
            a.event("e4").unwrap().op.ret,
            Some(Value::set([Value::Int(2)]))
        );
        assert!(a.lt("e1", "e4").unwrap());
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(
            load_execution(r#"{"events":[{"id":"a","op":"x","args":[1.5]}]}"#),
            Err(TraceError::Json(_))
        ));
        assert!(matches!(
            load_execution(r#"{"events":[{"id":"a","op":"x","bogus":1}]}"#),
            Err(TraceError::Json(_))
        ));
        assert!(matches!(
            load_execution(r#"{"events":[{"id":"a","op":"x"}],"vis":[["a","b"]]}"#),
            Err(TraceError::Graph(GraphError::UnknownId(_)))
        ));
    }

    fn value() -> impl Strategy<Value = Value> {
        let leaf = prop_oneof![
            any::<i64>().prop_map(Value::Int),
            "[a-z\"\\\\ ]{0,6}".prop_map(Value::Str),
            any::<bool>().prop_map(Value::Bool),
        ];
        leaf.prop_recursive(3, 16, 4, |inner| {
            prop::collection::vec(inner, 0..4).prop_map(Value::set)
        })
    }

    proptest! {
        #[test]
        fn values_survive_json(v in value()) {
            let text = serde_json::to_string(&v).unwrap();
            let back: Value = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(back, v);
        }
    }
}
