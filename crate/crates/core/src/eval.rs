//! Satisfaction of formulas at events of an abstract execution.
//!
//! Formulas are compiled into a flat node table. Results are memoized per
//! `(formula, node, event, values of the node's free variables)`, so one
//! [`Evaluator`] can be reused across interpretations and starting events.

use std::collections::{BTreeSet, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

use crate::event::{EventId, Value};
use crate::formula::{match_prop, Formula, Interpretation, Proposition, UnboundVariable};
use crate::graph::{AbstractExecution, GraphError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Unbound(#[from] UnboundVariable),
    #[error("formula has free variables {0:?} but the interpretation domain is empty")]
    EmptyDomain(Vec<String>),
}

/// Decides atomic propositions at events.
pub trait PropMatcher {
    fn matches(
        &self,
        prop: &Proposition,
        exec: &AbstractExecution,
        event: usize,
        interp: &Interpretation,
    ) -> Result<bool, UnboundVariable>;
}

/// Matches propositions against the operation record of each event.
#[derive(Debug, Clone, Copy, Default)]
pub struct OperationMatcher;

impl PropMatcher for OperationMatcher {
    fn matches(
        &self,
        prop: &Proposition,
        exec: &AbstractExecution,
        event: usize,
        interp: &Interpretation,
    ) -> Result<bool, UnboundVariable> {
        match_prop(prop, &exec.events()[event], interp)
    }
}

impl<M: PropMatcher + ?Sized> PropMatcher for &M {
    fn matches(
        &self,
        prop: &Proposition,
        exec: &AbstractExecution,
        event: usize,
        interp: &Interpretation,
    ) -> Result<bool, UnboundVariable> {
        (**self).matches(prop, exec, event, interp)
    }
}

#[derive(Debug, Clone)]
enum Node {
    True,
    False,
    Prop(Proposition),
    Not(usize),
    Or(usize, usize),
    And(usize, usize),
    Implies(usize, usize),
    Ex(usize),
    Ax(usize),
    Until(usize, usize),
    F(usize),
    G(usize),
    W(usize, usize),
}

static NEXT_FORMULA_ID: AtomicU64 = AtomicU64::new(0);

/// A formula flattened for evaluation.
#[derive(Debug, Clone)]
pub struct CompiledFormula {
    id: u64,
    source: Formula,
    nodes: Vec<Node>,
    /// Free variables of each node's subformula, sorted.
    vars: Vec<Vec<String>>,
    /// Child-position path from the root to each node.
    paths: Vec<Vec<usize>>,
    state: Vec<bool>,
}

impl CompiledFormula {
    pub fn new(formula: &Formula) -> Self {
        let mut c = CompiledFormula {
            id: NEXT_FORMULA_ID.fetch_add(1, Ordering::Relaxed),
            source: formula.clone(),
            nodes: Vec::new(),
            vars: Vec::new(),
            paths: Vec::new(),
            state: Vec::new(),
        };
        c.add(formula, Vec::new());
        c
    }

    pub fn source(&self) -> &Formula {
        &self.source
    }

    fn root(&self) -> usize {
        0
    }

    fn add(&mut self, f: &Formula, path: Vec<usize>) -> usize {
        let idx = self.nodes.len();
        self.nodes.push(Node::True);
        self.vars.push(f.free_vars().into_iter().collect());
        self.paths.push(path.clone());
        self.state.push(f.is_state_formula());
        let child = |c: &mut Self, i: usize, sub: &Formula| {
            let mut p = path.clone();
            p.push(i);
            c.add(sub, p)
        };
        let node = match f {
            Formula::True => Node::True,
            Formula::False => Node::False,
            Formula::Prop(p) => Node::Prop(p.clone()),
            Formula::Not(a) => Node::Not(child(self, 0, a)),
            Formula::EX(a) => Node::Ex(child(self, 0, a)),
            Formula::AX(a) => Node::Ax(child(self, 0, a)),
            Formula::F(a) => Node::F(child(self, 0, a)),
            Formula::G(a) => Node::G(child(self, 0, a)),
            Formula::Or(a, b) => {
                let (a, b) = (child(self, 0, a), child(self, 1, b));
                Node::Or(a, b)
            }
            Formula::And(a, b) => {
                let (a, b) = (child(self, 0, a), child(self, 1, b));
                Node::And(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = (child(self, 0, a), child(self, 1, b));
                Node::Implies(a, b)
            }
            Formula::Until(a, b) => {
                let (a, b) = (child(self, 0, a), child(self, 1, b));
                Node::Until(a, b)
            }
            Formula::W(a, b) => {
                let (a, b) = (child(self, 0, a), child(self, 1, b));
                Node::W(a, b)
            }
        };
        self.nodes[idx] = node;
        idx
    }
}

type CacheKey = (u64, usize, usize, Vec<Value>);

/// Memo table of satisfaction results. Inserts are idempotent.
///
/// Variable-free nodes live in a dense per-formula table indexed by
/// `node * events + event` (0 unknown, 1 false, 2 true); the rest are hashed
/// together with their variable bindings.
#[derive(Debug, Default, Clone)]
pub struct EvalCache {
    entries: HashMap<CacheKey, bool>,
    dense: Vec<(u64, Vec<u8>)>,
}

impl EvalCache {
    pub fn len(&self) -> usize {
        let dense: usize = self
            .dense
            .iter()
            .map(|(_, t)| t.iter().filter(|&&v| v != 0).count())
            .sum();
        self.entries.len() + dense
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn dense_table(&mut self, f: &CompiledFormula, events: usize) -> &mut Vec<u8> {
        let pos = match self.dense.iter().position(|(id, _)| *id == f.id) {
            Some(p) => p,
            None => {
                self.dense.push((f.id, vec![0; f.nodes.len() * events]));
                self.dense.len() - 1
            }
        };
        &mut self.dense[pos].1
    }
}

enum Slot {
    Dense(usize),
    Hashed(CacheKey),
}

/// Where a formula fails: the subformula (as a child path from the root) and
/// the event at which it is violated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: Vec<usize>,
    pub event: EventId,
    /// Truth value of the subformula at `event`. `true` only below a
    /// negation, e.g. `x` witnessing the failure of `!F x`.
    pub holds: bool,
}

pub struct Evaluator<'a, M = OperationMatcher> {
    exec: &'a AbstractExecution,
    matcher: M,
    cache: Option<EvalCache>,
}

impl<'a> Evaluator<'a, OperationMatcher> {
    pub fn new(exec: &'a AbstractExecution) -> Self {
        Self::with_matcher(exec, OperationMatcher)
    }
}

impl<'a, M: PropMatcher> Evaluator<'a, M> {
    pub fn with_matcher(exec: &'a AbstractExecution, matcher: M) -> Self {
        Evaluator {
            exec,
            matcher,
            cache: Some(EvalCache::default()),
        }
    }

    /// Disables memoization; every query recomputes from scratch.
    pub fn uncached(mut self) -> Self {
        self.cache = None;
        self
    }

    pub fn cache(&self) -> Option<&EvalCache> {
        self.cache.as_ref()
    }

    pub fn execution(&self) -> &'a AbstractExecution {
        self.exec
    }

    /// `(A, e) ⊨ f` under `interp`, with `e` given by index.
    pub fn sat_idx(
        &mut self,
        f: &CompiledFormula,
        event: usize,
        interp: &Interpretation,
    ) -> Result<bool, EvalError> {
        self.eval(f, f.root(), event, interp)
    }

    pub fn sat(
        &mut self,
        f: &CompiledFormula,
        event: &str,
        interp: &Interpretation,
    ) -> Result<bool, EvalError> {
        let idx = self.exec.index_of(event)?;
        self.sat_idx(f, idx, interp)
    }

    fn eval(
        &mut self,
        f: &CompiledFormula,
        node: usize,
        e: usize,
        interp: &Interpretation,
    ) -> Result<bool, EvalError> {
        let n = self.exec.len();
        let slot = match self.cache.as_mut() {
            Some(cache) if f.vars[node].is_empty() => {
                let at = node * n + e;
                match cache.dense_table(f, n)[at] {
                    0 => Some(Slot::Dense(at)),
                    v => return Ok(v == 2),
                }
            }
            Some(cache) => {
                let binding = f.vars[node]
                    .iter()
                    .map(|v| {
                        interp
                            .get(v)
                            .cloned()
                            .ok_or_else(|| UnboundVariable(v.clone()))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let key = (f.id, node, e, binding);
                if let Some(&hit) = cache.entries.get(&key) {
                    return Ok(hit);
                }
                Some(Slot::Hashed(key))
            }
            None => None,
        };
        let result = self.compute(f, node, e, interp)?;
        match (self.cache.as_mut(), slot) {
            (Some(cache), Some(Slot::Dense(at))) => {
                cache.dense_table(f, n)[at] = if result { 2 } else { 1 };
            }
            (Some(cache), Some(Slot::Hashed(key))) => {
                cache.entries.insert(key, result);
            }
            _ => {}
        }
        Ok(result)
    }

    fn compute(
        &mut self,
        f: &CompiledFormula,
        node: usize,
        e: usize,
        interp: &Interpretation,
    ) -> Result<bool, EvalError> {
        let exec = self.exec;
        Ok(match &f.nodes[node] {
            Node::True => true,
            Node::False => false,
            Node::Prop(p) => self.matcher.matches(p, exec, e, interp)?,
            Node::Not(a) => !self.eval(f, *a, e, interp)?,
            Node::Or(a, b) => self.eval(f, *a, e, interp)? || self.eval(f, *b, e, interp)?,
            Node::And(a, b) => self.eval(f, *a, e, interp)? && self.eval(f, *b, e, interp)?,
            Node::Implies(a, b) => !self.eval(f, *a, e, interp)? || self.eval(f, *b, e, interp)?,
            Node::Ex(a) => {
                let mut any = false;
                for &s in exec.immediate_successors_idx(e) {
                    if self.eval(f, *a, s, interp)? {
                        any = true;
                        break;
                    }
                }
                any
            }
            Node::Ax(a) => {
                let mut all = true;
                for &s in exec.immediate_successors_idx(e) {
                    if !self.eval(f, *a, s, interp)? {
                        all = false;
                        break;
                    }
                }
                all
            }
            Node::F(a) => {
                let mut any = false;
                for &s in exec.successors_including_idx(e) {
                    if self.eval(f, *a, s, interp)? {
                        any = true;
                        break;
                    }
                }
                any
            }
            Node::G(a) => self.globally(f, *a, e, interp)?,
            Node::Until(a, b) => self.until(f, *a, *b, e, interp)?,
            Node::W(a, b) => {
                self.globally(f, *a, e, interp)? || self.until(f, *a, *b, e, interp)?
            }
        })
    }

    fn globally(
        &mut self,
        f: &CompiledFormula,
        a: usize,
        e: usize,
        interp: &Interpretation,
    ) -> Result<bool, EvalError> {
        for &s in self.exec.successors_including_idx(e) {
            if !self.eval(f, a, s, interp)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// ψ holds somewhere at or after `e`, and every event at or after `e`
    /// violating φ has a ψ event between `e` and itself.
    fn until(
        &mut self,
        f: &CompiledFormula,
        a: usize,
        b: usize,
        e: usize,
        interp: &Interpretation,
    ) -> Result<bool, EvalError> {
        let future = self.exec.successors_including_idx(e);
        let mut psi = Vec::with_capacity(future.len());
        for &s in future {
            if self.eval(f, b, s, interp)? {
                psi.push(s);
            }
        }
        if psi.is_empty() {
            return Ok(false);
        }
        Ok(self
            .unguarded_violation(f, a, future, &psi, interp)?
            .is_none())
    }

    /// First φ-violating event in `future` with no ψ event (from `psi`) at or
    /// below it.
    fn unguarded_violation(
        &mut self,
        f: &CompiledFormula,
        a: usize,
        future: &[usize],
        psi: &[usize],
        interp: &Interpretation,
    ) -> Result<Option<usize>, EvalError> {
        for &s in future {
            if psi.iter().any(|&p| self.exec.leq_idx(p, s)) {
                continue;
            }
            if !self.eval(f, a, s, interp)? {
                return Ok(Some(s));
            }
        }
        Ok(None)
    }

    /// When `f` is false at `event`, follows the failing obligation down to
    /// the event and subformula that witness it. Returns `None` when `f`
    /// holds.
    pub fn diagnose_idx(
        &mut self,
        f: &CompiledFormula,
        event: usize,
        interp: &Interpretation,
    ) -> Result<Option<Violation>, EvalError> {
        if self.sat_idx(f, event, interp)? {
            return Ok(None);
        }
        let (node, at) = self.explain(f, f.root(), event, interp)?;
        let holds = self.eval(f, node, at, interp)?;
        Ok(Some(Violation {
            path: f.paths[node].clone(),
            event: self.exec.id_at(at).clone(),
            holds,
        }))
    }

    pub fn diagnose(
        &mut self,
        f: &CompiledFormula,
        event: &str,
        interp: &Interpretation,
    ) -> Result<Option<Violation>, EvalError> {
        let idx = self.exec.index_of(event)?;
        self.diagnose_idx(f, idx, interp)
    }

    /// Precondition: `node` is false at `e`.
    fn explain(
        &mut self,
        f: &CompiledFormula,
        node: usize,
        e: usize,
        interp: &Interpretation,
    ) -> Result<(usize, usize), EvalError> {
        let exec = self.exec;
        match f.nodes[node].clone() {
            Node::True | Node::False | Node::Prop(_) | Node::Ex(_) | Node::F(_) => Ok((node, e)),
            Node::Not(a) => match f.nodes[a].clone() {
                Node::Not(inner) => self.explain(f, inner, e, interp),
                Node::F(inner) => {
                    let future = exec.successors_including_idx(e).to_vec();
                    let hit = self.first_minimal(f, inner, &future, true, interp)?;
                    Ok((inner, hit.unwrap_or(e)))
                }
                Node::Ex(inner) => {
                    let next = exec.immediate_successors_idx(e).to_vec();
                    let hit = self.first_minimal(f, inner, &next, true, interp)?;
                    Ok((inner, hit.unwrap_or(e)))
                }
                _ => Ok((node, e)),
            },
            Node::Or(a, b) => {
                if f.state[a] && !f.state[b] {
                    self.explain(f, b, e, interp)
                } else {
                    self.explain(f, a, e, interp)
                }
            }
            Node::And(a, b) => {
                if !self.eval(f, a, e, interp)? {
                    self.explain(f, a, e, interp)
                } else {
                    self.explain(f, b, e, interp)
                }
            }
            Node::Implies(_, b) => self.explain(f, b, e, interp),
            Node::Ax(a) => {
                let next = exec.immediate_successors_idx(e).to_vec();
                match self.first_minimal(f, a, &next, false, interp)? {
                    Some(s) => self.explain(f, a, s, interp),
                    None => Ok((node, e)),
                }
            }
            Node::G(a) => {
                let future = exec.successors_including_idx(e).to_vec();
                match self.first_minimal(f, a, &future, false, interp)? {
                    Some(s) => self.explain(f, a, s, interp),
                    None => Ok((node, e)),
                }
            }
            Node::Until(a, b) | Node::W(a, b) => {
                let future = exec.successors_including_idx(e).to_vec();
                let mut psi = Vec::new();
                for &s in &future {
                    if self.eval(f, b, s, interp)? {
                        psi.push(s);
                    }
                }
                match self.unguarded_violation(f, a, &future, &psi, interp)? {
                    Some(s) => self.explain(f, a, s, interp),
                    None => Ok((node, e)),
                }
            }
        }
    }

    /// Among `candidates` where `node` evaluates to `wanted`, the first (by
    /// id) that has no such candidate strictly below it.
    fn first_minimal(
        &mut self,
        f: &CompiledFormula,
        node: usize,
        candidates: &[usize],
        wanted: bool,
        interp: &Interpretation,
    ) -> Result<Option<usize>, EvalError> {
        let mut hits = Vec::new();
        for &c in candidates {
            if self.eval(f, node, c, interp)? == wanted {
                hits.push(c);
            }
        }
        Ok(hits
            .iter()
            .copied()
            .find(|&h| !hits.iter().any(|&o| self.exec.lt_idx(o, h))))
    }
}

/// `(A, e) ⊨ f` under `interp`.
pub fn sat(
    exec: &AbstractExecution,
    event: &str,
    f: &Formula,
    interp: &Interpretation,
) -> Result<bool, EvalError> {
    Evaluator::new(exec).sat(&CompiledFormula::new(f), event, interp)
}

/// Violating event for `f` at `event`, or `None` when it holds.
pub fn diagnose(
    exec: &AbstractExecution,
    event: &str,
    f: &Formula,
    interp: &Interpretation,
) -> Result<Option<Violation>, EvalError> {
    Evaluator::new(exec).diagnose(&CompiledFormula::new(f), event, interp)
}

/// One failing (starting event, interpretation) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub start: EventId,
    pub interpretation: Interpretation,
    pub path: Vec<usize>,
    /// Rendered subformula at `path`.
    pub subformula: String,
    pub event: EventId,
    /// See [`Violation::holds`].
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub satisfied: bool,
    pub interpretations: usize,
    pub failures: Vec<Failure>,
}

/// A value guaranteed not to occur in `observed`.
pub fn fresh_value(observed: &BTreeSet<Value>) -> Value {
    let mut name = String::from("⊥");
    while observed.contains(&Value::Str(name.clone())) {
        name.push('\'');
    }
    Value::Str(name)
}

/// Values observed in `exec` (arguments, scalar returns and members of set
/// returns) plus one fresh value standing for everything unobserved.
pub fn default_domain(exec: &AbstractExecution) -> BTreeSet<Value> {
    let mut values = BTreeSet::new();
    for e in exec.events() {
        values.extend(e.op.args.iter().cloned());
        match &e.op.ret {
            Some(Value::Set(items)) => values.extend(items.iter().cloned()),
            Some(v) => {
                values.insert(v.clone());
            }
            None => {}
        }
    }
    let fresh = fresh_value(&values);
    values.insert(fresh);
    values
}

/// Every total assignment of `vars` into `domain`, in lexicographic order.
pub fn interpretations(vars: &[String], domain: &BTreeSet<Value>) -> Vec<Interpretation> {
    let mut out = vec![Interpretation::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|i| {
                domain.iter().map(move |val| {
                    let mut next = i.clone();
                    next.insert(v.clone(), val.clone());
                    next
                })
            })
            .collect();
    }
    out
}

/// `A ⊨ f`: every starting event satisfies `f` under every interpretation of
/// its free variables over `domain` (default: [`default_domain`]).
pub fn check_execution(
    exec: &AbstractExecution,
    f: &Formula,
    domain: Option<&BTreeSet<Value>>,
) -> Result<Verdict, EvalError> {
    check_execution_with(exec, f, domain, OperationMatcher)
}

pub fn check_execution_with<M: PropMatcher>(
    exec: &AbstractExecution,
    f: &Formula,
    domain: Option<&BTreeSet<Value>>,
    matcher: M,
) -> Result<Verdict, EvalError> {
    let vars: Vec<String> = f.free_vars().into_iter().collect();
    let owned;
    let domain = match domain {
        Some(d) => d,
        None => {
            owned = default_domain(exec);
            &owned
        }
    };
    if !vars.is_empty() && domain.is_empty() {
        return Err(EvalError::EmptyDomain(vars));
    }
    let compiled = CompiledFormula::new(f);
    let mut evaluator = Evaluator::with_matcher(exec, matcher);
    let starts: Vec<usize> = (0..exec.len())
        .filter(|&i| exec.strict_predecessors_idx(i).is_empty())
        .collect();
    let interps = interpretations(&vars, domain);
    let mut failures = Vec::new();
    for interp in &interps {
        for &s in &starts {
            if let Some(v) = evaluator.diagnose_idx(&compiled, s, interp)? {
                let subformula = f.at_path(&v.path).map(Formula::render).unwrap_or_default();
                failures.push(Failure {
                    start: exec.id_at(s).clone(),
                    interpretation: interp.clone(),
                    path: v.path,
                    subformula,
                    event: v.event,
                    holds: v.holds,
                });
            }
        }
    }
    Ok(Verdict {
        satisfied: failures.is_empty(),
        interpretations: interps.len(),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::formula::parse;

    fn i(pairs: &[(&str, i64)]) -> Interpretation {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), Value::Int(*v)))
            .collect()
    }

    const MVR_AX: &str = "G(put(a) => AX((get() contains a) W put(_)))";

    #[test]
    fn figure1_satisfies_mvr_ax_variant() {
        let a = fixtures::figure1();
        let f = parse(MVR_AX).unwrap();
        for v in 0..3 {
            assert!(sat(&a, "e1", &f, &i(&[("a", v)])).unwrap(), "a = {v}");
        }
    }

    #[test]
    fn figure4_violates_mvr_ax_variant_at_e3() {
        let a = fixtures::figure4();
        let f = parse(MVR_AX).unwrap();
        assert!(!sat(&a, "e1", &f, &i(&[("a", 0)])).unwrap());
        let v = diagnose(&a, "e1", &f, &i(&[("a", 0)])).unwrap().unwrap();
        assert_eq!(v.event.as_str(), "e3");
    }

    #[test]
    fn true_until_true_everywhere() {
        let a = fixtures::figure1();
        let f = parse("true U true").unwrap();
        for e in a.events() {
            assert!(sat(&a, e.id.as_str(), &f, &Interpretation::new()).unwrap());
        }
    }

    #[test]
    fn diagnose_g_fragment_and_ax() {
        let a = fixtures::figure4();
        let f = parse("G(get() => get() contains 0)").unwrap();
        let v = diagnose(&a, "e1", &f, &Interpretation::new())
            .unwrap()
            .unwrap();
        assert_eq!(v.event.as_str(), "e3");
        assert_eq!(f.at_path(&v.path).unwrap().render(), "get() contains 0");

        let ok = parse("G(true)").unwrap();
        assert_eq!(
            diagnose(&a, "e1", &ok, &Interpretation::new()).unwrap(),
            None
        );
    }

    #[test]
    fn unbound_and_unknown() {
        let a = fixtures::figure1();
        let f = parse("put(a)").unwrap();
        assert_eq!(
            sat(&a, "e1", &f, &Interpretation::new()),
            Err(EvalError::Unbound(UnboundVariable("a".into())))
        );
        assert!(matches!(
            sat(&a, "zz", &Formula::True, &Interpretation::new()),
            Err(EvalError::Graph(GraphError::UnknownId(_)))
        ));
    }

    #[test]
    fn check_execution_closed_and_empty_domain() {
        let a = fixtures::figure1();
        let v = check_execution(&a, &Formula::True, None).unwrap();
        assert!(v.satisfied);
        assert_eq!(v.interpretations, 1);
        let f = parse("F(put(a))").unwrap();
        assert_eq!(
            check_execution(&a, &f, Some(&BTreeSet::new())),
            Err(EvalError::EmptyDomain(vec!["a".into()]))
        );
    }

    #[test]
    fn default_domain_has_observed_values_and_fresh() {
        let a = fixtures::figure1();
        let d = default_domain(&a);
        assert_eq!(d.len(), 4);
        assert!(d.contains(&Value::Int(0)) && d.contains(&Value::Int(2)));
        assert!(d.contains(&Value::str("⊥")));
        let taken: BTreeSet<Value> = [Value::str("⊥")].into();
        assert_eq!(fresh_value(&taken), Value::str("⊥'"));
    }

    #[test]
    fn interpretation_enumeration() {
        let d: BTreeSet<Value> = [Value::Int(1), Value::Int(2)].into();
        let vars = vec!["a".to_string(), "b".to_string()];
        let all = interpretations(&vars, &d);
        assert_eq!(all.len(), 4);
        assert_eq!(all[1], i(&[("a", 1), ("b", 2)]));
        assert_eq!(interpretations(&[], &d), vec![Interpretation::new()]);
    }

    #[test]
    fn cache_is_keyed_by_relevant_bindings() {
        let a = fixtures::figure1();
        let f = CompiledFormula::new(&parse("G(put(a) => F(get()))").unwrap());
        let mut ev = Evaluator::new(&a);
        ev.sat(&f, "e1", &i(&[("a", 0)])).unwrap();
        let after_first = ev.cache().unwrap().len();
        ev.sat(&f, "e1", &i(&[("a", 1)])).unwrap();
        let after_second = ev.cache().unwrap().len();
        // `F(get())` has no free variables, so its entries are shared.
        assert!(after_second - after_first < after_first);
    }
}
