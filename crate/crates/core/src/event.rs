//! Values, operation records and events.

use std::collections::BTreeSet;
use std::fmt;

/// A value carried by an operation argument or return.
///
/// Sets are stored as `BTreeSet`, so they are sorted and deduplicated on
/// construction and compare structurally.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Str(String),
    Bool(bool),
    Set(BTreeSet<Value>),
}

impl Value {
    pub fn set<I: IntoIterator<Item = Value>>(items: I) -> Self {
        Value::Set(items.into_iter().collect())
    }

    pub fn str(s: impl Into<String>) -> Self {
        Value::Str(s.into())
    }

    pub fn as_set(&self) -> Option<&BTreeSet<Value>> {
        match self {
            Value::Set(s) => Some(s),
            _ => None,
        }
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Str(v.to_string())
    }
}

/// Renders in the formula literal syntax: `3`, `"alice"`, `true`, `{1, 2}`.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Str(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\t' => f.write_str("\\t")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
            Value::Bool(b) => write!(f, "{b}"),
            Value::Set(items) => {
                f.write_str("{")?;
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("}")
            }
        }
    }
}

/// Identity of an event within an execution.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId(pub String);

impl EventId {
    pub fn new(id: impl Into<String>) -> Self {
        EventId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for EventId {
    fn from(s: &str) -> Self {
        EventId(s.to_string())
    }
}

impl std::borrow::Borrow<str> for EventId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// An operation expression: `op(p1, ..., pn)` optionally followed by `=> ret`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OperationRecord {
    pub name: String,
    pub args: Vec<Value>,
    pub ret: Option<Value>,
}

impl OperationRecord {
    pub fn new(name: impl Into<String>, args: Vec<Value>) -> Self {
        OperationRecord {
            name: name.into(),
            args,
            ret: None,
        }
    }

    pub fn returning(mut self, ret: Value) -> Self {
        self.ret = Some(ret);
        self
    }
}

impl fmt::Display for OperationRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.name)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")?;
        if let Some(ret) = &self.ret {
            write!(f, " => {ret}")?;
        }
        Ok(())
    }
}

/// One execution of an operation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Event {
    pub id: EventId,
    pub op: OperationRecord,
    /// Replica that executed the event. Metadata only; never consulted by
    /// the semantics.
    pub replica: Option<String>,
}

impl Event {
    pub fn new(id: impl Into<String>, op: OperationRecord) -> Self {
        Event {
            id: EventId::new(id),
            op,
            replica: None,
        }
    }

    pub fn on_replica(mut self, replica: impl Into<String>) -> Self {
        self.replica = Some(replica.into());
        self
    }
}
