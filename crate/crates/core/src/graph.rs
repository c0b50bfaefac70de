//! Abstract executions: a finite event set with a visibility relation.
//!
//! The visibility relation is accepted as any generating relation (the
//! reduction, the closure, or anything in between), stored as its transitive
//! reduction, and queried through the cached closure. Events are kept sorted
//! by id so that every query iterates deterministically.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::event::{Event, EventId};

/// Default upper bound on the number of events for [`AbstractExecution::linear_extensions`].
pub const DEFAULT_EXTENSION_BOUND: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("visibility relation is cyclic through events {}", join_ids(.0))]
    Cycle(Vec<EventId>),
    #[error("unknown event id `{0}`")]
    UnknownId(EventId),
    #[error("duplicate event id `{0}`")]
    DuplicateId(EventId),
    #[error("execution has {size} events, more than the bound of {bound}")]
    TooLarge { size: usize, bound: usize },
}

fn join_ids(ids: &[EventId]) -> String {
    ids.iter()
        .map(|i| i.as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

/// A validated, immutable abstract execution.
#[derive(Debug, Clone)]
pub struct AbstractExecution {
    events: Vec<Event>,
    index: HashMap<EventId, usize>,
    /// `closure[i][j]` iff `(events[i], events[j]) ∈ vis`.
    closure: Vec<Vec<bool>>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    /// Covering relation, i.e. the transitive reduction.
    covers: Vec<Vec<usize>>,
    /// `upset[i] = { j | i ≤ j }`, ascending.
    upset: Vec<Vec<usize>>,
}

impl PartialEq for AbstractExecution {
    fn eq(&self, other: &Self) -> bool {
        self.events == other.events && self.closure == other.closure
    }
}

impl Eq for AbstractExecution {}

impl AbstractExecution {
    /// Validates raw events and a visibility relation.
    pub fn validate(
        raw_events: Vec<Event>,
        raw_vis: Vec<(EventId, EventId)>,
    ) -> Result<Self, GraphError> {
        let mut events = raw_events;
        events.sort_by(|a, b| a.id.cmp(&b.id));
        for pair in events.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(GraphError::DuplicateId(pair[0].id.clone()));
            }
        }
        let index: HashMap<EventId, usize> = events
            .iter()
            .enumerate()
            .map(|(i, e)| (e.id.clone(), i))
            .collect();
        let n = events.len();

        let mut adj = vec![BTreeSet::new(); n];
        for (from, to) in &raw_vis {
            let a = *index
                .get(from)
                .ok_or_else(|| GraphError::UnknownId(from.clone()))?;
            let b = *index
                .get(to)
                .ok_or_else(|| GraphError::UnknownId(to.clone()))?;
            if a == b {
                return Err(GraphError::Cycle(vec![from.clone()]));
            }
            adj[a].insert(b);
        }

        let order = topological_order(&adj).map_err(|stuck| {
            GraphError::Cycle(stuck.into_iter().map(|i| events[i].id.clone()).collect())
        })?;

        let mut closure = vec![vec![false; n]; n];
        for &i in order.iter().rev() {
            let mut row = vec![false; n];
            for &j in &adj[i] {
                row[j] = true;
                for (k, reach) in closure[j].iter().enumerate() {
                    if *reach {
                        row[k] = true;
                    }
                }
            }
            closure[i] = row;
        }

        Ok(Self::from_closure(events, index, closure))
    }

    fn from_closure(
        events: Vec<Event>,
        index: HashMap<EventId, usize>,
        closure: Vec<Vec<bool>>,
    ) -> Self {
        let n = events.len();
        let succ: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..n).filter(|&j| closure[i][j]).collect())
            .collect();
        let pred: Vec<Vec<usize>> = (0..n)
            .map(|j| (0..n).filter(|&i| closure[i][j]).collect())
            .collect();
        let covers = succ
            .iter()
            .map(|s| {
                s.iter()
                    .copied()
                    .filter(|&j| !s.iter().any(|&k| closure[k][j]))
                    .collect()
            })
            .collect();
        let upset = (0..n)
            .map(|i| (0..n).filter(|&j| i == j || closure[i][j]).collect())
            .collect();
        AbstractExecution {
            events,
            index,
            closure,
            succ,
            pred,
            covers,
            upset,
        }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Events sorted by id.
    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn event(&self, id: &str) -> Result<&Event, GraphError> {
        Ok(&self.events[self.index_of(id)?])
    }

    pub fn index_of(&self, id: &str) -> Result<usize, GraphError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| GraphError::UnknownId(EventId::new(id)))
    }

    pub fn id_at(&self, idx: usize) -> &EventId {
        &self.events[idx].id
    }

    /// Transitive reduction edges, sorted.
    pub fn reduction(&self) -> Vec<(EventId, EventId)> {
        self.index_pairs(&self.covers)
    }

    /// Full visibility relation (closure), sorted.
    pub fn closure(&self) -> Vec<(EventId, EventId)> {
        self.index_pairs(&self.succ)
    }

    fn index_pairs(&self, rel: &[Vec<usize>]) -> Vec<(EventId, EventId)> {
        rel.iter()
            .enumerate()
            .flat_map(|(i, js)| js.iter().map(move |&j| (i, j)))
            .map(|(i, j)| (self.events[i].id.clone(), self.events[j].id.clone()))
            .collect()
    }

    // Index-level queries used by the evaluator.

    pub fn lt_idx(&self, a: usize, b: usize) -> bool {
        self.closure[a][b]
    }

    pub fn leq_idx(&self, a: usize, b: usize) -> bool {
        a == b || self.closure[a][b]
    }

    /// Strict successors of `i`, ascending.
    pub fn strict_successors_idx(&self, i: usize) -> &[usize] {
        &self.succ[i]
    }

    /// Strict predecessors of `i`, ascending.
    pub fn strict_predecessors_idx(&self, i: usize) -> &[usize] {
        &self.pred[i]
    }

    pub fn immediate_successors_idx(&self, i: usize) -> &[usize] {
        &self.covers[i]
    }

    /// `{ j | i ≤ j }`, ascending.
    pub fn successors_including_idx(&self, i: usize) -> &[usize] {
        &self.upset[i]
    }

    pub fn is_last_idx(&self, i: usize) -> bool {
        self.succ[i].is_empty()
    }

    // Id-level queries.

    pub fn leq(&self, e1: &str, e2: &str) -> Result<bool, GraphError> {
        Ok(self.leq_idx(self.index_of(e1)?, self.index_of(e2)?))
    }

    pub fn lt(&self, e1: &str, e2: &str) -> Result<bool, GraphError> {
        Ok(self.lt_idx(self.index_of(e1)?, self.index_of(e2)?))
    }

    pub fn concurrent(&self, e1: &str, e2: &str) -> Result<bool, GraphError> {
        let (a, b) = (self.index_of(e1)?, self.index_of(e2)?);
        Ok(a != b && !self.leq_idx(a, b) && !self.leq_idx(b, a))
    }

    /// Events without a predecessor.
    pub fn starting_events(&self) -> Vec<EventId> {
        self.ids_where(|i| self.pred[i].is_empty())
    }

    /// Events without a successor.
    pub fn last_events(&self) -> Vec<EventId> {
        self.ids_where(|i| self.succ[i].is_empty())
    }

    fn ids_where(&self, keep: impl Fn(usize) -> bool) -> Vec<EventId> {
        (0..self.len())
            .filter(|&i| keep(i))
            .map(|i| self.events[i].id.clone())
            .collect()
    }

    pub fn immediate_successors(&self, e: &str) -> Result<Vec<EventId>, GraphError> {
        let i = self.index_of(e)?;
        Ok(self.ids(&self.covers[i]))
    }

    pub fn successors_including(&self, e: &str) -> Result<Vec<EventId>, GraphError> {
        let i = self.index_of(e)?;
        Ok(self.ids(self.successors_including_idx(i)))
    }

    fn ids(&self, idx: &[usize]) -> Vec<EventId> {
        idx.iter().map(|&i| self.events[i].id.clone()).collect()
    }

    /// All serializations consistent with visibility, in lexicographic order
    /// of their id sequences.
    pub fn linear_extensions(&self, bound: usize) -> Result<Vec<Vec<EventId>>, GraphError> {
        if self.len() > bound {
            return Err(GraphError::TooLarge {
                size: self.len(),
                bound,
            });
        }
        let mut out = Vec::new();
        let mut placed = vec![false; self.len()];
        let mut prefix = Vec::with_capacity(self.len());
        self.extend_linear(&mut placed, &mut prefix, &mut out);
        Ok(out)
    }

    fn extend_linear(
        &self,
        placed: &mut [bool],
        prefix: &mut Vec<usize>,
        out: &mut Vec<Vec<EventId>>,
    ) {
        if prefix.len() == self.len() {
            out.push(self.ids(prefix));
            return;
        }
        for i in 0..self.len() {
            if !placed[i] && self.pred[i].iter().all(|&p| placed[p]) {
                placed[i] = true;
                prefix.push(i);
                self.extend_linear(placed, prefix, out);
                prefix.pop();
                placed[i] = false;
            }
        }
    }

    /// Renders the reduction as a Graphviz digraph.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph execution {\n    rankdir=LR;\n");
        for e in &self.events {
            let _ = writeln!(
                out,
                "    {} [label={}];",
                dot_quote(e.id.as_str()),
                dot_quote(&e.op.to_string())
            );
        }
        for (a, b) in self.reduction() {
            let _ = writeln!(
                out,
                "    {} -> {};",
                dot_quote(a.as_str()),
                dot_quote(b.as_str())
            );
        }
        out.push_str("}\n");
        out
    }
}

fn dot_quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        match c {
            '"' => q.push_str("\\\""),
            '\\' => q.push_str("\\\\"),
            '\n' => q.push_str("\\n"),
            c => q.push(c),
        }
    }
    q.push('"');
    q
}

/// Kahn's algorithm. On a cycle, returns the events that could not be ordered.
fn topological_order(adj: &[BTreeSet<usize>]) -> Result<Vec<usize>, Vec<usize>> {
    let n = adj.len();
    let mut indegree = vec![0usize; n];
    for targets in adj {
        for &j in targets {
            indegree[j] += 1;
        }
    }
    let mut ready: Vec<usize> = (0..n).rev().filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = ready.pop() {
        order.push(i);
        for &j in &adj[i] {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                ready.push(j);
            }
        }
    }
    if order.len() == n {
        Ok(order)
    } else {
        Err((0..n).filter(|&i| indegree[i] > 0).collect())
    }
}
