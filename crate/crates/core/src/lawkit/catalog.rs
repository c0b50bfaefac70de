//! Rewrite laws, one-directional implications, last-event rules, and the
//! candidate rules that fail on partial orders together with the graphs that
//! refute them.

use crate::event::EventId;
use crate::fixtures;
use crate::formula::{parse, Formula};
use crate::graph::AbstractExecution;

use super::models::{Labeling, ATOMS};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Candidate {
    Equivalence,
    Implication,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LawKind {
    /// `lhs ≡ rhs` at every event.
    Equivalence,
    /// `lhs ⇒ rhs` at every event.
    Implication,
    /// A candidate rule that does not hold; the fixture refutes it.
    NonLaw(Candidate),
}

impl LawKind {
    pub fn label(self) -> &'static str {
        match self {
            LawKind::Equivalence => "equivalence",
            LawKind::Implication => "implication",
            LawKind::NonLaw(_) => "non-law",
        }
    }
}

/// Restricts the events at which a law is asserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideCondition {
    LastEvent,
    NotLastEvent,
}

impl SideCondition {
    pub fn holds(self, exec: &AbstractExecution, event: usize) -> bool {
        match self {
            SideCondition::LastEvent => exec.is_last_idx(event),
            SideCondition::NotLastEvent => !exec.is_last_idx(event),
        }
    }
}

/// A refuting execution, the event where the candidate fails, and the truth
/// values the refutation relies on.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub execution: AbstractExecution,
    pub labeling: Labeling,
    pub event: EventId,
    /// `(formula, event, expected truth value)`.
    pub claims: Vec<(Formula, EventId, bool)>,
}

#[derive(Debug, Clone)]
pub struct Law {
    pub name: &'static str,
    pub kind: LawKind,
    pub lhs: Formula,
    pub rhs: Formula,
    pub condition: Option<SideCondition>,
    pub fixture: Option<Fixture>,
}

impl Law {
    fn new(name: &'static str, kind: LawKind, lhs: &str, rhs: &str) -> Self {
        Law {
            name,
            kind,
            lhs: schema(lhs),
            rhs: schema(rhs),
            condition: None,
            fixture: None,
        }
    }

    fn when(mut self, c: SideCondition) -> Self {
        self.condition = Some(c);
        self
    }

    fn refuted_by(mut self, fixture: Fixture) -> Self {
        self.fixture = Some(fixture);
        self
    }

    /// Atomic propositions the schemas mention, in [`ATOMS`] order.
    pub fn atoms(&self) -> Vec<&'static str> {
        let mut names = Vec::new();
        collect_atoms(&self.lhs, &mut names);
        collect_atoms(&self.rhs, &mut names);
        ATOMS
            .iter()
            .copied()
            .filter(|a| names.contains(&a.to_string()))
            .collect()
    }

    /// `lhs ≡ rhs` or `lhs ⇒ rhs`, as text.
    pub fn statement(&self) -> String {
        let connective = match self.kind {
            LawKind::Equivalence | LawKind::NonLaw(Candidate::Equivalence) => "<=>",
            LawKind::Implication | LawKind::NonLaw(Candidate::Implication) => "=>",
        };
        let guard = match self.condition {
            Some(SideCondition::LastEvent) => "[last event] ",
            Some(SideCondition::NotLastEvent) => "[not last event] ",
            None => "",
        };
        format!("{guard}{} {connective} {}", self.lhs, self.rhs)
    }

    /// Whether `lhs`/`rhs` truth values are consistent with the stated rule.
    pub fn rule_holds(&self, lhs: bool, rhs: bool) -> bool {
        match self.kind {
            LawKind::Equivalence | LawKind::NonLaw(Candidate::Equivalence) => lhs == rhs,
            LawKind::Implication | LawKind::NonLaw(Candidate::Implication) => !lhs || rhs,
        }
    }
}

fn collect_atoms(f: &Formula, out: &mut Vec<String>) {
    if let Formula::Prop(p) = f {
        out.push(p.op_name.clone());
    }
    for c in f.children() {
        collect_atoms(c, out);
    }
}

fn schema(text: &str) -> Formula {
    parse(text).unwrap_or_else(|e| panic!("catalog schema `{text}` does not parse: {e}"))
}

fn fixture(
    name: &'static str,
    execution: AbstractExecution,
    event: &str,
    claims: &[(&str, &str, bool)],
) -> Fixture {
    let labeling = Labeling::from_operation_names(&execution, &ATOMS);
    Fixture {
        name,
        execution,
        labeling,
        event: event.into(),
        claims: claims
            .iter()
            .map(|(f, e, v)| (schema(f), EventId::from(*e), *v))
            .collect(),
    }
}

/// The full catalog: 14 equivalences, 3 implications, 3 last-event rules,
/// and 6 refuted candidates.
pub fn law_catalog() -> Vec<Law> {
    use LawKind::*;
    use SideCondition::*;

    let ax_or = || {
        fixture(
            "law_ax_or.json",
            fixtures::law_ax_or(),
            "e1",
            &[
                ("AX(phi() | psi())", "e1", true),
                ("AX(phi())", "e1", false),
                ("AX(psi())", "e1", false),
                ("EX(phi())", "e1", true),
                ("EX(psi())", "e1", true),
                ("EX(phi() & psi())", "e1", false),
            ],
        )
    };
    let u_induction = || {
        fixture(
            "law_u_induction.json",
            fixtures::law_u_induction(),
            "e1",
            &[
                ("phi() U psi()", "e1", true),
                ("phi() U psi()", "e2", false),
                ("phi() U psi()", "e5", false),
                ("EX(phi() U psi())", "e1", false),
                ("AX(phi() U psi())", "e1", false),
            ],
        )
    };

    vec![
        // Distributivity.
        Law::new(
            "ex-or-distrib",
            Equivalence,
            "EX phi() | EX psi()",
            "EX(phi() | psi())",
        ),
        Law::new(
            "ax-and-distrib",
            Equivalence,
            "AX phi() & AX psi()",
            "AX(phi() & psi())",
        ),
        Law::new(
            "f-or-distrib",
            Equivalence,
            "F phi() | F psi()",
            "F(phi() | psi())",
        ),
        Law::new(
            "g-and-distrib",
            Equivalence,
            "G phi() & G psi()",
            "G(phi() & psi())",
        ),
        Law::new(
            "u-and-distrib",
            Equivalence,
            "(phi() U rho()) & (psi() U rho())",
            "(phi() & psi()) U rho()",
        ),
        // Negation.
        Law::new("not-ex", Equivalence, "!EX phi()", "AX !phi()"),
        Law::new("not-ax", Equivalence, "!AX phi()", "EX !phi()"),
        Law::new("not-f", Equivalence, "!F phi()", "G !phi()"),
        Law::new("not-g", Equivalence, "!G phi()", "F !phi()"),
        // Idempotence.
        Law::new("f-idempotent", Equivalence, "F F phi()", "F phi()"),
        Law::new("g-idempotent", Equivalence, "G G phi()", "G phi()"),
        Law::new(
            "u-idempotent",
            Equivalence,
            "phi() U (phi() U psi())",
            "phi() U psi()",
        ),
        // Induction.
        Law::new("f-induction", Equivalence, "F phi()", "phi() | EX F phi()"),
        Law::new("g-induction", Equivalence, "G phi()", "phi() & AX G phi()"),
        // One-directional distributivity.
        Law::new(
            "ax-or-weaken",
            Implication,
            "AX phi() | AX psi()",
            "AX(phi() | psi())",
        ),
        Law::new(
            "ex-and-weaken",
            Implication,
            "EX(phi() & psi())",
            "EX phi() & EX psi()",
        ),
        Law::new(
            "u-or-weaken",
            Implication,
            "(phi() U psi()) | (phi() U rho())",
            "phi() U (psi() | rho())",
        ),
        // Last events.
        Law::new("last-event-ax", Implication, "true", "AX phi()").when(LastEvent),
        Law::new("last-event-not-ex", Implication, "true", "!EX phi()").when(LastEvent),
        Law::new(
            "ax-implies-ex-before-last",
            Implication,
            "AX phi()",
            "EX phi()",
        )
        .when(NotLastEvent),
        // Candidates that fail.
        Law::new(
            "ax-or-distrib",
            NonLaw(Candidate::Implication),
            "AX(phi() | psi())",
            "AX phi() | AX psi()",
        )
        .refuted_by(ax_or()),
        Law::new(
            "ex-and-distrib",
            NonLaw(Candidate::Implication),
            "EX phi() & EX psi()",
            "EX(phi() & psi())",
        )
        .refuted_by(ax_or()),
        Law::new(
            "u-or-distrib",
            NonLaw(Candidate::Implication),
            "phi() U (psi() | rho())",
            "(phi() U psi()) | (phi() U rho())",
        )
        .refuted_by(fixture(
            "law_u_or.json",
            fixtures::law_u_or(),
            "e1",
            &[
                ("phi()", "e1", true),
                ("phi() U (psi() | rho())", "e1", true),
                ("phi() U psi()", "e1", false),
                ("phi() U rho()", "e1", false),
            ],
        )),
        Law::new(
            "ax-implies-ex",
            NonLaw(Candidate::Implication),
            "AX phi()",
            "EX phi()",
        )
        .refuted_by(fixture(
            "single event",
            fixtures::single_event(),
            "e1",
            &[("AX false", "e1", true), ("EX true", "e1", false)],
        )),
        Law::new(
            "u-induction-ex",
            NonLaw(Candidate::Equivalence),
            "phi() U psi()",
            "psi() | (phi() & EX(phi() U psi()))",
        )
        .refuted_by(u_induction()),
        Law::new(
            "u-induction-ax",
            NonLaw(Candidate::Equivalence),
            "phi() U psi()",
            "psi() | (phi() & AX(phi() U psi()))",
        )
        .refuted_by(u_induction()),
    ]
}
