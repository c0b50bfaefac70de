//! Executions drawn from the worked examples: the multi-value register
//! graphs, the access-control scenario, and the counterexample graphs for
//! the rules that fail on partial orders.
//!
//! Law fixtures label events by operation name: an event whose operation is
//! `phi` satisfies the atomic proposition `phi()`; `none` satisfies nothing.

use crate::event::{Event, EventId, OperationRecord, Value};
use crate::graph::AbstractExecution;

fn build(events: Vec<Event>, vis: &[(&str, &str)]) -> AbstractExecution {
    let vis = vis
        .iter()
        .map(|(a, b)| (EventId::from(*a), EventId::from(*b)))
        .collect();
    AbstractExecution::validate(events, vis).expect("fixture graphs are valid")
}

fn put(id: &str, v: i64) -> Event {
    Event::new(id, OperationRecord::new("put", vec![Value::Int(v)]))
}

fn get(id: &str, ret: &[i64]) -> Event {
    Event::new(
        id,
        OperationRecord::new("get", vec![])
            .returning(Value::set(ret.iter().map(|v| Value::Int(*v)))),
    )
}

fn label(id: &str, prop: &str) -> Event {
    Event::new(id, OperationRecord::new(prop, vec![]))
}

/// Multi-value register: two concurrent puts joined by a get returning both.
pub fn figure1() -> AbstractExecution {
    build(
        vec![
            put("e1", 0),
            put("e2", 1),
            put("e3", 2),
            get("e4", &[2]),
            get("e5", &[1, 2]),
        ],
        &[
            ("e1", "e2"),
            ("e1", "e3"),
            ("e2", "e5"),
            ("e3", "e4"),
            ("e4", "e5"),
        ],
    )
}

/// Invalid multi-value register execution: `e3` returns a value it cannot see.
pub fn figure4() -> AbstractExecution {
    build(
        vec![put("e1", 0), put("e2", 1), get("e3", &[1]), get("e4", &[1])],
        &[("e1", "e2"), ("e1", "e3"), ("e2", "e4"), ("e3", "e4")],
    )
}

/// `e1` with two concurrent successors; `phi` only at `e2`, `psi` only at `e3`.
pub fn law_ax_or() -> AbstractExecution {
    build(
        vec![label("e1", "none"), label("e2", "phi"), label("e3", "psi")],
        &[("e1", "e2"), ("e1", "e3")],
    )
}

/// Two branches from `e1`: `psi` then `!phi` on one, `rho` then `!phi` on the
/// other. `phi` holds only at `e1`.
pub fn law_u_or() -> AbstractExecution {
    build(
        vec![
            label("e1", "phi"),
            label("e2", "psi"),
            label("e3", "none"),
            label("e4", "rho"),
            label("e5", "none"),
        ],
        &[("e1", "e2"), ("e2", "e3"), ("e1", "e4"), ("e4", "e5")],
    )
}

/// Two synchronized strands `e2..e4` and `e5..e7` below `e1`, with cross
/// edges `e5 -> e4` and `e2 -> e7`. `phi` at e1, e2, e5; `psi` at e3, e6.
pub fn law_u_induction() -> AbstractExecution {
    build(
        vec![
            label("e1", "phi"),
            label("e2", "phi"),
            label("e3", "psi"),
            label("e4", "none"),
            label("e5", "phi"),
            label("e6", "psi"),
            label("e7", "none"),
        ],
        &[
            ("e1", "e2"),
            ("e2", "e3"),
            ("e3", "e4"),
            ("e1", "e5"),
            ("e5", "e6"),
            ("e6", "e7"),
            ("e5", "e4"),
            ("e2", "e7"),
        ],
    )
}

/// A single unlabeled event, which is its own last event.
pub fn single_event() -> AbstractExecution {
    build(vec![label("e1", "none")], &[])
}

fn acl(id: &str, op: &str, right: &str) -> Event {
    Event::new(
        id,
        OperationRecord::new(
            op,
            vec![Value::str(right), Value::str("alice"), Value::str("doc")],
        ),
    )
}

/// Access-control history: create, grant, exec, revoke, grant again, exec.
pub fn access_control() -> AbstractExecution {
    build(
        vec![
            Event::new(
                "e1",
                OperationRecord::new("create", vec![Value::str("doc")]),
            ),
            acl("e2", "grant", "read"),
            acl("e3", "exec", "read"),
            acl("e4", "revoke", "read"),
            acl("e5", "grant", "read"),
            acl("e6", "exec", "read"),
        ],
        &[
            ("e1", "e2"),
            ("e2", "e3"),
            ("e3", "e4"),
            ("e4", "e5"),
            ("e5", "e6"),
        ],
    )
}

/// [`access_control`] plus an `exec` that only sees the `create`, i.e. runs
/// concurrently with the first grant.
pub fn access_control_concurrent_exec() -> AbstractExecution {
    let base = access_control();
    let mut events = base.events().to_vec();
    events.push(acl("e7", "exec", "read"));
    let mut vis = base.reduction();
    vis.push((EventId::from("e1"), EventId::from("e7")));
    AbstractExecution::validate(events, vis).expect("fixture graphs are valid")
}

/// Fixture files shipped in the repository, keyed by file name.
pub fn named() -> Vec<(&'static str, AbstractExecution)> {
    vec![
        ("fig1.json", figure1()),
        ("fig4.json", figure4()),
        ("law_ax_or.json", law_ax_or()),
        ("law_u_or.json", law_u_or()),
        ("law_u_induction.json", law_u_induction()),
        ("access_control.json", access_control()),
        (
            "access_control_concurrent_exec.json",
            access_control_concurrent_exec(),
        ),
    ]
}
