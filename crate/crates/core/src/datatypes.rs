//! Replicated datatype semantics: multi-value register and counter.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::event::{Event, EventId, OperationRecord, Value};
use crate::graph::{AbstractExecution, GraphError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatatypeError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("event `{event}` executes {op}/{arity}, which is not an operation of {datatype}")]
    Schema {
        event: EventId,
        op: String,
        arity: usize,
        datatype: DatatypeSpec,
    },
    #[error("invalid generator configuration: {0}")]
    Config(String),
    #[error("unknown datatype `{0}` (expected `mvr` or `counter`)")]
    UnknownDatatype(String),
}

/// Supported datatypes and their operation signatures:
/// `mvr`: `put(v)`, `get() => set`; `counter`: `inc()`, `get() => int`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DatatypeSpec {
    Mvr,
    Counter,
}

impl DatatypeSpec {
    pub fn name(self) -> &'static str {
        match self {
            DatatypeSpec::Mvr => "mvr",
            DatatypeSpec::Counter => "counter",
        }
    }

    fn check_signature(self, e: &Event) -> Result<(), DatatypeError> {
        let ok = matches!(
            (self, e.op.name.as_str(), e.op.args.len()),
            (DatatypeSpec::Mvr, "put", 1)
                | (DatatypeSpec::Mvr, "get", 0)
                | (DatatypeSpec::Counter, "inc", 0)
                | (DatatypeSpec::Counter, "get", 0)
        );
        if ok {
            Ok(())
        } else {
            Err(DatatypeError::Schema {
                event: e.id.clone(),
                op: e.op.name.clone(),
                arity: e.op.args.len(),
                datatype: self,
            })
        }
    }

    fn oracle(self, exec: &AbstractExecution, idx: usize) -> Value {
        match self {
            DatatypeSpec::Mvr => Value::Set(mvr_get_at(exec, idx)),
            DatatypeSpec::Counter => Value::Int(counter_get_at(exec, idx)),
        }
    }
}

impl fmt::Display for DatatypeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DatatypeSpec {
    type Err = DatatypeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mvr" => Ok(DatatypeSpec::Mvr),
            "counter" => Ok(DatatypeSpec::Counter),
            other => Err(DatatypeError::UnknownDatatype(other.to_string())),
        }
    }
}

fn is_put(e: &Event) -> bool {
    e.op.name == "put" && e.op.args.len() == 1
}

fn mvr_get_at(exec: &AbstractExecution, idx: usize) -> BTreeSet<Value> {
    let events = exec.events();
    let visible_puts: Vec<usize> = exec
        .strict_predecessors_idx(idx)
        .iter()
        .copied()
        .filter(|&p| is_put(&events[p]))
        .collect();
    visible_puts
        .iter()
        .filter(|&&p| !visible_puts.iter().any(|&q| exec.lt_idx(p, q)))
        .map(|&p| events[p].op.args[0].clone())
        .collect()
}

fn counter_get_at(exec: &AbstractExecution, idx: usize) -> i64 {
    exec.strict_predecessors_idx(idx)
        .iter()
        .filter(|&&p| exec.events()[p].op.name == "inc")
        .count() as i64
}

/// Values of the visibility-maximal puts strictly before `e`.
pub fn mvr_get_oracle(exec: &AbstractExecution, e: &str) -> Result<BTreeSet<Value>, DatatypeError> {
    Ok(mvr_get_at(exec, exec.index_of(e)?))
}

/// Number of `inc` events strictly before `e`.
pub fn counter_get_oracle(exec: &AbstractExecution, e: &str) -> Result<i64, DatatypeError> {
    Ok(counter_get_at(exec, exec.index_of(e)?))
}

/// A `get` whose recorded return disagrees with the datatype semantics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReturnMismatch {
    pub event: EventId,
    pub expected: Value,
    /// `None` when the trace recorded no return value.
    pub recorded: Option<Value>,
}

/// Compares every `get` return against the oracle for `spec`.
pub fn validate_returns(
    exec: &AbstractExecution,
    spec: DatatypeSpec,
) -> Result<Vec<ReturnMismatch>, DatatypeError> {
    let mut mismatches = Vec::new();
    for (idx, e) in exec.events().iter().enumerate() {
        spec.check_signature(e)?;
        if e.op.name != "get" {
            continue;
        }
        let expected = spec.oracle(exec, idx);
        if e.op.ret.as_ref() != Some(&expected) {
            mismatches.push(ReturnMismatch {
                event: e.id.clone(),
                expected,
                recorded: e.op.ret.clone(),
            });
        }
    }
    Ok(mismatches)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub replicas: usize,
    pub ops: usize,
    pub seed: u64,
    pub datatype: DatatypeSpec,
    pub merge_probability: f64,
}

impl GeneratorConfig {
    fn check(&self) -> Result<(), DatatypeError> {
        if self.replicas == 0 {
            return Err(DatatypeError::Config("replicas must be positive".into()));
        }
        if self.ops == 0 {
            return Err(DatatypeError::Config("ops must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.merge_probability) {
            return Err(DatatypeError::Config(format!(
                "merge probability {} is outside [0, 1]",
                self.merge_probability
            )));
        }
        if self.replicas > 1 && self.merge_probability >= 1.0 {
            return Err(DatatypeError::Config(
                "merge probability 1 with several replicas never executes an operation".into(),
            ));
        }
        Ok(())
    }
}

/// Simulates replicas that execute operations locally and synchronize by
/// copying each other's known event sets (causal delivery).
///
/// A new event sees exactly the events its replica knows; `get` records the
/// datatype's return value over that set. Deterministic in `config.seed`.
pub fn generate(config: &GeneratorConfig) -> Result<AbstractExecution, DatatypeError> {
    config.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let width = config.ops.to_string().len();
    let mut known: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); config.replicas];
    // Visibility predecessors of each event, by creation order.
    let mut sees: Vec<BTreeSet<usize>> = Vec::with_capacity(config.ops);
    let mut events: Vec<Event> = Vec::with_capacity(config.ops);

    while events.len() < config.ops {
        let r = rng.random_range(0..config.replicas);
        if config.replicas > 1 && rng.random_bool(config.merge_probability) {
            let mut other = rng.random_range(0..config.replicas - 1);
            if other >= r {
                other += 1;
            }
            let incoming = known[other].clone();
            known[r].extend(incoming);
            continue;
        }

        let idx = events.len();
        let visible = known[r].clone();
        let update = rng.random_bool(0.5);
        let op = match (config.datatype, update) {
            (DatatypeSpec::Mvr, true) => {
                OperationRecord::new("put", vec![Value::Int(rng.random_range(0..10))])
            }
            (DatatypeSpec::Counter, true) => OperationRecord::new("inc", vec![]),
            (DatatypeSpec::Mvr, false) => {
                let puts: Vec<usize> = visible
                    .iter()
                    .copied()
                    .filter(|&p| events[p].op.name == "put")
                    .collect();
                let maximal = puts
                    .iter()
                    .filter(|&&p| !puts.iter().any(|&q| sees[q].contains(&p)))
                    .map(|&p| events[p].op.args[0].clone());
                OperationRecord::new("get", vec![]).returning(Value::set(maximal))
            }
            (DatatypeSpec::Counter, false) => {
                let incs = visible
                    .iter()
                    .filter(|&&p| events[p].op.name == "inc")
                    .count();
                OperationRecord::new("get", vec![]).returning(Value::Int(incs as i64))
            }
        };
        events.push(Event::new(format!("e{:0width$}", idx + 1), op).on_replica(format!("r{r}")));
        sees.push(visible);
        known[r].insert(idx);
    }

    let vis = sees
        .iter()
        .enumerate()
        .flat_map(|(to, from)| {
            let events = &events;
            from.iter()
                .map(move |&f| (events[f].id.clone(), events[to].id.clone()))
        })
        .collect();
    Ok(AbstractExecution::validate(events, vis)?)
}
