//! Executable verification of the rewrite laws over exhaustive small models,
//! plus a finite-trace LTL oracle for totally ordered executions.

mod catalog;
mod ltl;
mod models;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rayon::prelude::*;
use serde_json::json;

use crate::datatypes::mvr_get_oracle;
use crate::eval::{CompiledFormula, EvalError, Evaluator};
use crate::event::{EventId, Value};
use crate::formula::{Formula, Interpretation};
use crate::graph::{AbstractExecution, GraphError};
use crate::trace::TraceDocument;

pub use catalog::{law_catalog, Candidate, Fixture, Law, LawKind, SideCondition};
pub use ltl::{ltl_sat, LtlError, LtlTrace};
pub use models::{
    enumerate_models, enumerate_models_up_to, enumerate_posets, labelings, BoundError, Labeling,
    LabelingMatcher, ATOMS, MAX_MODEL_EVENTS, MAX_MODEL_PROPS,
};

/// A model and event at which a law's two sides disagree with its rule.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub execution: Arc<AbstractExecution>,
    pub labeling: Labeling,
    pub event: EventId,
    /// The law's schemas after substituting atoms, if substitution was needed.
    pub instance: Option<(Formula, Formula)>,
    pub lhs: bool,
    pub rhs: bool,
}

impl Counterexample {
    /// Trace-schema JSON: each event becomes `label(<true atoms>)`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut doc = TraceDocument::from_execution(&self.execution);
        for (i, e) in doc.events.iter_mut().enumerate() {
            e.op = "label".into();
            e.args = self
                .labeling
                .true_props(i)
                .into_iter()
                .map(Value::Str)
                .collect();
        }
        let mut out = json!({
            "trace": doc,
            "event": self.event.as_str(),
            "lhs": self.lhs,
            "rhs": self.rhs,
        });
        if let Some((l, r)) = &self.instance {
            out["instance"] = json!({ "lhs": l.render(), "rhs": r.render() });
        }
        out
    }
}

/// Result of checking one law.
#[derive(Debug, Clone)]
pub struct LawReport {
    pub name: &'static str,
    pub kind: LawKind,
    pub statement: String,
    pub models_checked: usize,
    pub events_checked: usize,
    /// First model/event violating the stated rule, if any.
    pub counterexample: Option<Counterexample>,
    /// For non-laws: whether the fixture refutes the candidate with every
    /// claimed truth value matching.
    pub fixture_refutes: Option<bool>,
    /// Laws: no counterexample. Non-laws: the fixture refutes the candidate.
    pub expectation_met: bool,
}

impl LawReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "law": self.name,
            "kind": self.kind.label(),
            "statement": self.statement,
            "models_checked": self.models_checked,
            "events_checked": self.events_checked,
            "fixture_refutes": self.fixture_refutes,
            "expectation_met": self.expectation_met,
            "counterexample": self.counterexample.as_ref().map(Counterexample::to_json),
        })
    }
}

/// Replaces atomic propositions by formulas.
pub fn substitute(f: &Formula, map: &BTreeMap<String, Formula>) -> Formula {
    let sub = |g: &Formula| Box::new(substitute(g, map));
    match f {
        Formula::Prop(p) if p.args.is_empty() && p.ret.is_none() => {
            map.get(&p.op_name).cloned().unwrap_or_else(|| f.clone())
        }
        Formula::True | Formula::False | Formula::Prop(_) => f.clone(),
        Formula::Not(a) => Formula::Not(sub(a)),
        Formula::EX(a) => Formula::EX(sub(a)),
        Formula::AX(a) => Formula::AX(sub(a)),
        Formula::F(a) => Formula::F(sub(a)),
        Formula::G(a) => Formula::G(sub(a)),
        Formula::Or(a, b) => Formula::Or(sub(a), sub(b)),
        Formula::And(a, b) => Formula::And(sub(a), sub(b)),
        Formula::Implies(a, b) => Formula::Implies(sub(a), sub(b)),
        Formula::Until(a, b) => Formula::Until(sub(a), sub(b)),
        Formula::W(a, b) => Formula::W(sub(a), sub(b)),
    }
}

/// Substitutions mapping the schema atoms onto the `k` atoms a model
/// provides. When the schema needs no more atoms than available this is the
/// identity; otherwise every map from schema atoms to available atoms (or to
/// `true`/`false` when `k = 0`).
pub fn atom_instantiations(schema_atoms: &[&str], k: usize) -> Vec<BTreeMap<String, Formula>> {
    let available = &ATOMS[..k];
    if schema_atoms.iter().all(|a| available.contains(a)) {
        return vec![BTreeMap::new()];
    }
    let targets: Vec<Formula> = if k == 0 {
        vec![Formula::True, Formula::False]
    } else {
        available.iter().map(|a| Formula::atom(a)).collect()
    };
    let mut maps = vec![BTreeMap::new()];
    for atom in schema_atoms {
        maps = maps
            .into_iter()
            .flat_map(|m| {
                targets.iter().map(move |t| {
                    let mut next: BTreeMap<String, Formula> = m.clone();
                    next.insert(atom.to_string(), t.clone());
                    next
                })
            })
            .collect();
    }
    maps
}

fn eval_labeled(
    exec: &AbstractExecution,
    labeling: &Labeling,
    f: &Formula,
    event: &EventId,
) -> Result<bool, EvalError> {
    let mut ev = Evaluator::with_matcher(exec, LabelingMatcher(labeling));
    ev.sat(
        &CompiledFormula::new(f),
        event.as_str(),
        &Interpretation::new(),
    )
}

/// Does the fixture refute the candidate, with every claim as stated?
pub fn fixture_refutes(law: &Law, fixture: &Fixture) -> Result<bool, EvalError> {
    let (exec, lab) = (&fixture.execution, &fixture.labeling);
    let lhs = eval_labeled(exec, lab, &law.lhs, &fixture.event)?;
    let rhs = eval_labeled(exec, lab, &law.rhs, &fixture.event)?;
    if law.rule_holds(lhs, rhs) {
        return Ok(false);
    }
    for (f, e, expected) in &fixture.claims {
        if eval_labeled(exec, lab, f, e)? != *expected {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A substituted law: compiled sides, plus the formulas when substitution
/// changed them.
type Instance = (CompiledFormula, CompiledFormula, Option<(Formula, Formula)>);

/// Checks a law at every event of every model in `models`.
///
/// Laws and implications expect no counterexample. Non-laws expect their
/// fixture to refute them; the models are still searched and the first
/// counterexample found (if any) is reported.
pub fn check_law<I>(law: &Law, models: I, props: usize) -> LawReport
where
    I: IntoIterator<Item = (Arc<AbstractExecution>, Labeling)>,
{
    let instances: Vec<Instance> = atom_instantiations(&law.atoms(), props)
        .into_iter()
        .map(|map| {
            let (l, r) = (substitute(&law.lhs, &map), substitute(&law.rhs, &map));
            let shown = (!map.is_empty()).then(|| (l.clone(), r.clone()));
            (CompiledFormula::new(&l), CompiledFormula::new(&r), shown)
        })
        .collect();
    let empty = Interpretation::new();
    let mut models_checked = 0;
    let mut events_checked = 0;
    let mut counterexample = None;

    'models: for (exec, labeling) in models {
        models_checked += 1;
        let mut ev = Evaluator::with_matcher(&exec, LabelingMatcher(&labeling));
        for e in 0..exec.len() {
            if law.condition.is_some_and(|c| !c.holds(&exec, e)) {
                continue;
            }
            events_checked += 1;
            for (lhs_f, rhs_f, shown) in &instances {
                let lhs = ev
                    .sat_idx(lhs_f, e, &empty)
                    .expect("atomic schemas evaluate");
                let rhs = ev
                    .sat_idx(rhs_f, e, &empty)
                    .expect("atomic schemas evaluate");
                if !law.rule_holds(lhs, rhs) {
                    counterexample = Some(Counterexample {
                        execution: Arc::clone(&exec),
                        labeling: labeling.clone(),
                        event: exec.id_at(e).clone(),
                        instance: shown.clone(),
                        lhs,
                        rhs,
                    });
                    break 'models;
                }
            }
        }
    }

    let fixture_result = law
        .fixture
        .as_ref()
        .map(|fx| fixture_refutes(law, fx).expect("fixtures evaluate"));
    let expectation_met = match law.kind {
        LawKind::NonLaw(_) => fixture_result == Some(true),
        _ => counterexample.is_none(),
    };
    LawReport {
        name: law.name,
        kind: law.kind,
        statement: law.statement(),
        models_checked,
        events_checked,
        counterexample,
        fixture_refutes: fixture_result,
        expectation_met,
    }
}

/// Checks `laws` over all models with 1..=`max_events` events and `props`
/// atoms. Laws are checked in parallel; reports keep the order of `laws`.
pub fn check_laws(
    laws: &[Law],
    max_events: usize,
    props: usize,
) -> Result<Vec<LawReport>, BoundError> {
    drop(enumerate_models_up_to(max_events, props)?);
    Ok(laws
        .par_iter()
        .map(|law| {
            let models = enumerate_models_up_to(max_events, props).expect("bounds checked above");
            check_law(law, models, props)
        })
        .collect())
}

/// [`check_laws`] over the whole catalog.
pub fn check_catalog(max_events: usize, props: usize) -> Result<Vec<LawReport>, BoundError> {
    check_laws(&law_catalog(), max_events, props)
}

/// Formulas compared between the partial-order and the LTL semantics on
/// chains. Written over `phi` and `psi`.
pub fn chain_battery() -> Vec<Formula> {
    [
        "phi()",
        "!phi()",
        "phi() | psi()",
        "phi() & psi()",
        "phi() => psi()",
        "phi() U psi()",
        "phi() W psi()",
        "F phi()",
        "G phi()",
        "EX phi()",
        "AX phi()",
        "EX true",
        "AX false",
        "EX(phi() U psi())",
        "AX(phi() W psi())",
        "G(phi() => F psi())",
        "F(phi() & EX psi())",
        "(phi() U psi()) U phi()",
        "!(phi() W !psi())",
        "G(phi() => AX(phi() U psi()))",
        "F G phi()",
        "G F psi()",
    ]
    .iter()
    .map(|s| crate::formula::parse(s).expect("battery formulas parse"))
    .collect()
}

/// Labeled chain as an LTL trace, following the chain's unique serialization.
pub fn chain_trace(
    exec: &AbstractExecution,
    labeling: &Labeling,
) -> Option<(Vec<usize>, LtlTrace)> {
    let orders = exec.linear_extensions(exec.len()).ok()?;
    if orders.len() != 1 {
        return None;
    }
    let order: Vec<usize> = orders[0]
        .iter()
        .map(|id| {
            exec.index_of(id.as_str())
                .expect("ids come from the execution")
        })
        .collect();
    let states = order.iter().map(|&i| labeling.true_props(i)).collect();
    Some((order, LtlTrace::new(states)))
}

#[derive(Debug, Clone)]
pub struct Disagreement {
    pub execution: Arc<AbstractExecution>,
    pub labeling: Labeling,
    pub formula: Formula,
    pub position: usize,
    pub eptl: bool,
    pub ltl: bool,
}

#[derive(Debug, Clone, Default)]
pub struct ChainReport {
    pub chains: usize,
    pub comparisons: usize,
    pub disagreements: Vec<Disagreement>,
}

/// Compares the evaluator with [`ltl_sat`] at every position of every
/// totally ordered model with up to `max_events` events and `props` atoms.
pub fn chain_equivalence_check(max_events: usize, props: usize) -> Result<ChainReport, BoundError> {
    chain_equivalence_with(max_events, props, &chain_battery())
}

pub fn chain_equivalence_with(
    max_events: usize,
    props: usize,
    battery: &[Formula],
) -> Result<ChainReport, BoundError> {
    let formulas: Vec<Formula> = battery
        .iter()
        .flat_map(|f| {
            let mut names = Vec::new();
            collect_atom_names(f, &mut names);
            let atoms: Vec<&str> = ATOMS
                .iter()
                .copied()
                .filter(|a| names.iter().any(|n| n == a))
                .collect();
            atom_instantiations(&atoms, props)
                .into_iter()
                .map(move |m| substitute(f, &m))
        })
        .collect();
    let compiled: Vec<CompiledFormula> = formulas.iter().map(CompiledFormula::new).collect();
    let empty = Interpretation::new();
    let mut report = ChainReport::default();
    for (exec, labeling) in enumerate_models_up_to(max_events, props)? {
        let Some((order, trace)) = chain_trace(&exec, &labeling) else {
            continue;
        };
        report.chains += 1;
        let mut ev = Evaluator::with_matcher(&exec, LabelingMatcher(&labeling));
        for (f, cf) in formulas.iter().zip(&compiled) {
            for (pos, &idx) in order.iter().enumerate() {
                let eptl = ev
                    .sat_idx(cf, idx, &empty)
                    .expect("atomic formulas evaluate");
                let ltl = ltl_sat(&trace, pos, f).expect("atomic formulas evaluate");
                report.comparisons += 1;
                if eptl != ltl {
                    report.disagreements.push(Disagreement {
                        execution: Arc::clone(&exec),
                        labeling: labeling.clone(),
                        formula: f.clone(),
                        position: pos,
                        eptl,
                        ltl,
                    });
                }
            }
        }
    }
    Ok(report)
}

/// Derived operators next to their definitional expansions:
/// `F φ = true U φ`, `G φ = ¬F¬φ`, `φ W ψ = G φ ∨ φ U ψ`, `φ ∧ ψ = ¬(¬φ ∨ ¬ψ)`.
pub fn derived_expansions() -> Vec<(Formula, Formula)> {
    let (p, q) = (Formula::atom("phi"), Formula::atom("psi"));
    let f_def = |a: Formula| Formula::until(Formula::True, a);
    let g_def = |a: Formula| Formula::not(f_def(Formula::not(a)));
    vec![
        (Formula::eventually(p.clone()), f_def(p.clone())),
        (Formula::globally(p.clone()), g_def(p.clone())),
        (
            Formula::weak_until(p.clone(), q.clone()),
            Formula::or(g_def(p.clone()), Formula::until(p.clone(), q.clone())),
        ),
        (
            Formula::and(p.clone(), q.clone()),
            Formula::not(Formula::or(
                Formula::not(p.clone()),
                Formula::not(q.clone()),
            )),
        ),
        (
            Formula::globally(Formula::weak_until(p.clone(), q.clone())),
            g_def(Formula::or(g_def(p.clone()), Formula::until(p, q))),
        ),
    ]
}

#[derive(Debug, Clone, Default)]
pub struct CoherenceReport {
    pub models: usize,
    pub comparisons: usize,
    /// `(direct, expansion, event id)` for each model/event where they differ.
    pub disagreements: Vec<(Formula, Formula, EventId)>,
}

/// Evaluates each derived operator and its expansion at every event of every
/// model with up to `max_events` events and `props` atoms.
pub fn derived_coherence_check(
    max_events: usize,
    props: usize,
) -> Result<CoherenceReport, BoundError> {
    let pairs: Vec<(Formula, Formula)> = derived_expansions()
        .into_iter()
        .flat_map(|(d, x)| {
            atom_instantiations(&["phi", "psi"], props)
                .into_iter()
                .map(move |m| (substitute(&d, &m), substitute(&x, &m)))
        })
        .collect();
    let compiled: Vec<_> = pairs
        .iter()
        .map(|(d, x)| (CompiledFormula::new(d), CompiledFormula::new(x)))
        .collect();
    let empty = Interpretation::new();
    let mut report = CoherenceReport::default();
    for (exec, labeling) in enumerate_models_up_to(max_events, props)? {
        report.models += 1;
        let mut ev = Evaluator::with_matcher(&exec, LabelingMatcher(&labeling));
        for ((d, x), (dc, xc)) in pairs.iter().zip(&compiled) {
            for e in 0..exec.len() {
                report.comparisons += 1;
                let direct = ev.sat_idx(dc, e, &empty).expect("atomic formulas evaluate");
                let expanded = ev.sat_idx(xc, e, &empty).expect("atomic formulas evaluate");
                if direct != expanded {
                    report
                        .disagreements
                        .push((d.clone(), x.clone(), exec.id_at(e).clone()));
                }
            }
        }
    }
    Ok(report)
}

fn collect_atom_names(f: &Formula, out: &mut Vec<String>) {
    if let Formula::Prop(p) = f {
        out.push(p.op_name.clone());
    }
    for c in f.children() {
        collect_atom_names(c, out);
    }
}

/// The execution restricted to one serialization: same events, visibility
/// replaced by the total order `order`.
pub fn serialize_execution(
    exec: &AbstractExecution,
    order: &[EventId],
) -> Result<AbstractExecution, GraphError> {
    let vis = order
        .windows(2)
        .map(|w| (w[0].clone(), w[1].clone()))
        .collect();
    AbstractExecution::validate(exec.events().to_vec(), vis)
}

/// A serialization and the register value read at the chosen event.
pub type Replay = (Vec<EventId>, BTreeSet<Value>);

/// For each serialization of `exec`, the multi-value register result at
/// `get_event` when the serialization is replayed as a sequential execution.
pub fn serialized_mvr_results(
    exec: &AbstractExecution,
    get_event: &str,
    bound: usize,
) -> Result<Vec<Replay>, GraphError> {
    exec.linear_extensions(bound)?
        .into_iter()
        .map(|order| {
            let chain = serialize_execution(exec, &order)?;
            let result = mvr_get_oracle(&chain, get_event).map_err(|e| match e {
                crate::datatypes::DatatypeError::Graph(g) => g,
                other => unreachable!("oracle only fails on unknown ids: {other}"),
            })?;
            Ok((order, result))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn find(name: &str) -> Law {
        law_catalog().into_iter().find(|l| l.name == name).unwrap()
    }

    #[test]
    fn negation_law_small_models() {
        let r = check_law(&find("not-ex"), enumerate_models_up_to(3, 1).unwrap(), 1);
        assert!(r.expectation_met);
        assert!(r.counterexample.is_none());
        assert!(r.models_checked > 0);
    }

    #[test]
    fn ax_implies_ex_fails_at_a_last_event() {
        let law = find("ax-implies-ex");
        let r = check_law(&law, enumerate_models_up_to(2, 1).unwrap(), 1);
        assert_eq!(r.fixture_refutes, Some(true));
        let cx = r.counterexample.unwrap();
        let idx = cx.execution.index_of(cx.event.as_str()).unwrap();
        assert!(cx.execution.is_last_idx(idx));
        assert!(cx.lhs && !cx.rhs);
    }

    #[test]
    fn u_induction_fixture() {
        let r = check_law(&find("u-induction-ax"), std::iter::empty(), 2);
        assert_eq!(r.fixture_refutes, Some(true));
        assert!(r.expectation_met);
    }

    #[test]
    fn instantiation_counts() {
        assert_eq!(atom_instantiations(&["phi", "psi"], 2).len(), 1);
        assert_eq!(atom_instantiations(&["phi", "psi", "rho"], 2).len(), 8);
        assert_eq!(atom_instantiations(&["phi"], 0).len(), 2);
    }

    #[test]
    fn counterexample_json_uses_trace_schema() {
        let r = check_law(&find("ax-implies-ex"), enumerate_models(1, 1).unwrap(), 1);
        let j = r.counterexample.unwrap().to_json();
        assert_eq!(j["event"], "e1");
        assert_eq!(j["trace"]["events"][0]["op"], "label");
        let doc: TraceDocument = serde_json::from_value(j["trace"].clone()).unwrap();
        assert!(doc.into_execution().is_ok());
    }

    #[test]
    fn derived_small() {
        let r = derived_coherence_check(3, 2).unwrap();
        assert!(r.comparisons > 0);
        assert!(r.disagreements.is_empty());
    }

    #[test]
    fn chain_small() {
        let r = chain_equivalence_check(2, 1).unwrap();
        assert!(r.chains > 0);
        assert!(r.disagreements.is_empty());
    }

    #[test]
    fn serializations_lose_concurrency() {
        let a = crate::fixtures::figure1();
        let results = serialized_mvr_results(&a, "e5", 10).unwrap();
        assert_eq!(results.len(), 3);
        for (_, r) in results {
            assert_eq!(r.len(), 1);
        }
    }
}
