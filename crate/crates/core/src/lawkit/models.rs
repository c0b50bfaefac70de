//! Exhaustive small models: every strict partial order on a fixed set of
//! events, paired with every labeling of a few atomic propositions.

use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use crate::eval::PropMatcher;
use crate::event::{Event, EventId, OperationRecord};
use crate::formula::{Interpretation, Proposition, UnboundVariable};
use crate::graph::AbstractExecution;

pub const MAX_MODEL_EVENTS: usize = 5;
pub const MAX_MODEL_PROPS: usize = 3;

/// Atomic proposition names, in the order they are made available.
pub const ATOMS: [&str; MAX_MODEL_PROPS] = ["phi", "psi", "rho"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("model bounds exceeded: {events} events (max {MAX_MODEL_EVENTS}), {props} props (max {MAX_MODEL_PROPS})")]
pub struct BoundError {
    pub events: usize,
    pub props: usize,
}

/// Truth values of atomic propositions at each event.
///
/// Indexed by event position in the execution (events sorted by id).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Labeling {
    props: Vec<String>,
    bits: Vec<u32>,
}

impl Labeling {
    pub fn new(props: Vec<String>, events: usize) -> Self {
        Labeling {
            props,
            bits: vec![0; events],
        }
    }

    /// Labels each event with the proposition named by its operation, if any.
    pub fn from_operation_names(exec: &AbstractExecution, props: &[&str]) -> Self {
        let mut l = Labeling::new(props.iter().map(|s| s.to_string()).collect(), exec.len());
        for (i, e) in exec.events().iter().enumerate() {
            if let Some(j) = props.iter().position(|p| *p == e.op.name) {
                l.bits[i] |= 1 << j;
            }
        }
        l
    }

    pub fn props(&self) -> &[String] {
        &self.props
    }

    pub fn set(&mut self, event: usize, prop: &str, value: bool) {
        let j = self
            .props
            .iter()
            .position(|p| p == prop)
            .expect("proposition is part of the labeling");
        if value {
            self.bits[event] |= 1 << j;
        } else {
            self.bits[event] &= !(1 << j);
        }
    }

    pub fn get(&self, event: usize, prop: &str) -> bool {
        self.props
            .iter()
            .position(|p| p == prop)
            .is_some_and(|j| self.bits[event] & (1 << j) != 0)
    }

    pub fn true_props(&self, event: usize) -> BTreeSet<String> {
        self.props
            .iter()
            .enumerate()
            .filter(|(j, _)| self.bits[event] & (1 << j) != 0)
            .map(|(_, p)| p.clone())
            .collect()
    }
}

/// Decides 0-ary propositions from a [`Labeling`]; anything else is false.
#[derive(Debug, Clone, Copy)]
pub struct LabelingMatcher<'a>(pub &'a Labeling);

impl PropMatcher for LabelingMatcher<'_> {
    fn matches(
        &self,
        prop: &Proposition,
        _exec: &AbstractExecution,
        event: usize,
        _interp: &Interpretation,
    ) -> Result<bool, UnboundVariable> {
        Ok(prop.args.is_empty() && prop.ret.is_none() && self.0.get(event, &prop.op_name))
    }
}

fn model_event(i: usize) -> Event {
    Event::new(format!("e{}", i + 1), OperationRecord::new("event", vec![]))
}

/// Every strict partial order on events `e1..en`, filtered from all subsets
/// of ordered pairs. Deterministic order (by edge-subset bitmask).
pub fn enumerate_posets(n: usize) -> Result<Vec<AbstractExecution>, BoundError> {
    if n > MAX_MODEL_EVENTS {
        return Err(BoundError {
            events: n,
            props: 0,
        });
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let mut rel = vec![vec![false; n]; n];
        for (b, &(i, j)) in pairs.iter().enumerate() {
            if mask & (1 << b) != 0 {
                rel[i][j] = true;
            }
        }
        if !is_strict_order(&rel) {
            continue;
        }
        let events = (0..n).map(model_event).collect();
        let vis = pairs
            .iter()
            .filter(|&&(i, j)| rel[i][j])
            .map(|&(i, j)| {
                (
                    EventId(format!("e{}", i + 1)),
                    EventId(format!("e{}", j + 1)),
                )
            })
            .collect();
        out.push(AbstractExecution::validate(events, vis).expect("strict orders are acyclic"));
    }
    Ok(out)
}

fn is_strict_order(rel: &[Vec<bool>]) -> bool {
    let n = rel.len();
    for i in 0..n {
        for j in 0..n {
            if !rel[i][j] {
                continue;
            }
            if rel[j][i] {
                return false;
            }
            if (0..n).any(|k| rel[j][k] && !rel[i][k]) {
                return false;
            }
        }
    }
    true
}

/// [`enumerate_posets`], computed once per size.
fn cached_posets(n: usize) -> &'static [Arc<AbstractExecution>] {
    static CACHE: [OnceLock<Vec<Arc<AbstractExecution>>>; MAX_MODEL_EVENTS + 1] =
        [const { OnceLock::new() }; MAX_MODEL_EVENTS + 1];
    CACHE[n].get_or_init(|| {
        enumerate_posets(n)
            .expect("size is within bounds")
            .into_iter()
            .map(Arc::new)
            .collect()
    })
}

/// Every labeling of the first `k` atoms over `n` events.
pub fn labelings(n: usize, k: usize) -> impl Iterator<Item = Labeling> {
    let props: Vec<String> = ATOMS[..k].iter().map(|s| s.to_string()).collect();
    let total = 1u64 << (n * k);
    (0..total).map(move |code| {
        let mut l = Labeling::new(props.clone(), n);
        for e in 0..n {
            l.bits[e] = ((code >> (e * k)) & ((1 << k) - 1)) as u32;
        }
        l
    })
}

/// Every labeled poset with exactly `n` events and `k` atomic propositions.
pub fn enumerate_models(
    n: usize,
    k: usize,
) -> Result<impl Iterator<Item = (Arc<AbstractExecution>, Labeling)>, BoundError> {
    if n > MAX_MODEL_EVENTS || k > MAX_MODEL_PROPS {
        return Err(BoundError {
            events: n,
            props: k,
        });
    }
    Ok(cached_posets(n)
        .iter()
        .flat_map(move |p| labelings(n, k).map(move |l| (Arc::clone(p), l))))
}

/// Models of every size from 1 to `max_events`.
pub fn enumerate_models_up_to(
    max_events: usize,
    k: usize,
) -> Result<impl Iterator<Item = (Arc<AbstractExecution>, Labeling)>, BoundError> {
    if max_events > MAX_MODEL_EVENTS || k > MAX_MODEL_PROPS {
        return Err(BoundError {
            events: max_events,
            props: k,
        });
    }
    let per_size = (1..=max_events)
        .map(|n| enumerate_models(n, k))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(per_size.into_iter().flatten())
}
