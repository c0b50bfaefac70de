//! Formula AST over parameterized propositions.

mod parser;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::event::{Event, Value};

pub use parser::{parse, ParseError};

/// Assignment of values to free variables.
pub type Interpretation = BTreeMap<String, Value>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("variable `{0}` is not bound by the interpretation")]
pub struct UnboundVariable(pub String);

/// An argument or return-value pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Pattern {
    Literal(Value),
    Var(String),
    Wildcard,
}

impl Pattern {
    fn resolve<'a>(
        &'a self,
        interp: &'a Interpretation,
    ) -> Result<Option<&'a Value>, UnboundVariable> {
        match self {
            Pattern::Literal(v) => Ok(Some(v)),
            Pattern::Var(name) => interp
                .get(name)
                .map(Some)
                .ok_or_else(|| UnboundVariable(name.clone())),
            Pattern::Wildcard => Ok(None),
        }
    }

    fn matches(&self, value: &Value, interp: &Interpretation) -> Result<bool, UnboundVariable> {
        Ok(self.resolve(interp)?.is_none_or(|v| v == value))
    }
}

/// Constraint on an event's recorded return value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RetPredicate {
    Equals(Pattern),
    Contains(Pattern),
}

/// `op(p1, ..., pn) [== pat | contains pat]`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Proposition {
    pub op_name: String,
    pub args: Vec<Pattern>,
    pub ret: Option<RetPredicate>,
}

impl Proposition {
    pub fn new(op_name: impl Into<String>, args: Vec<Pattern>) -> Self {
        Proposition {
            op_name: op_name.into(),
            args,
            ret: None,
        }
    }

    /// A 0-ary proposition with no return constraint.
    pub fn atom(name: impl Into<String>) -> Self {
        Self::new(name, Vec::new())
    }

    pub fn with_ret(mut self, ret: RetPredicate) -> Self {
        self.ret = Some(ret);
        self
    }

    fn patterns(&self) -> impl Iterator<Item = &Pattern> {
        self.args.iter().chain(self.ret.iter().map(|r| match r {
            RetPredicate::Equals(p) | RetPredicate::Contains(p) => p,
        }))
    }

    pub fn vars(&self) -> BTreeSet<String> {
        self.patterns()
            .filter_map(|p| match p {
                Pattern::Var(v) => Some(v.clone()),
                _ => None,
            })
            .collect()
    }
}

/// `Q[I](e)`: does event `e` satisfy proposition `Q` under `I`?
///
/// Every variable of the proposition must be bound, even when the operation
/// name already rules the event out.
pub fn match_prop(
    prop: &Proposition,
    event: &Event,
    interp: &Interpretation,
) -> Result<bool, UnboundVariable> {
    for p in prop.patterns() {
        p.resolve(interp)?;
    }
    let op = &event.op;
    if op.name != prop.op_name || op.args.len() != prop.args.len() {
        return Ok(false);
    }
    for (pat, arg) in prop.args.iter().zip(&op.args) {
        if !pat.matches(arg, interp)? {
            return Ok(false);
        }
    }
    match &prop.ret {
        None => Ok(true),
        Some(RetPredicate::Equals(pat)) => match &op.ret {
            Some(ret) => pat.matches(ret, interp),
            None => Ok(false),
        },
        Some(RetPredicate::Contains(pat)) => match op.ret.as_ref().and_then(Value::as_set) {
            Some(set) => Ok(match pat.resolve(interp)? {
                Some(v) => set.contains(v),
                None => !set.is_empty(),
            }),
            None => Ok(false),
        },
    }
}

/// An EPTL formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Prop(Proposition),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    /// Some immediate successor.
    EX(Box<Formula>),
    /// Every immediate successor.
    AX(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    /// Eventually.
    F(Box<Formula>),
    /// Globally.
    G(Box<Formula>),
    /// Weak until.
    W(Box<Formula>, Box<Formula>),
}

// Constructors, to keep tests and the law catalog readable.
impl Formula {
    pub fn prop(p: Proposition) -> Self {
        Formula::Prop(p)
    }

    pub fn atom(name: &str) -> Self {
        Formula::Prop(Proposition::atom(name))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn ex(f: Formula) -> Self {
        Formula::EX(Box::new(f))
    }

    pub fn ax(f: Formula) -> Self {
        Formula::AX(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Self {
        Formula::Until(Box::new(a), Box::new(b))
    }

    pub fn eventually(f: Formula) -> Self {
        Formula::F(Box::new(f))
    }

    pub fn globally(f: Formula) -> Self {
        Formula::G(Box::new(f))
    }

    pub fn weak_until(a: Formula, b: Formula) -> Self {
        Formula::W(Box::new(a), Box::new(b))
    }

    /// Direct subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::False | Formula::Prop(_) => vec![],
            Formula::Not(f) | Formula::EX(f) | Formula::AX(f) | Formula::F(f) | Formula::G(f) => {
                vec![f]
            }
            Formula::Or(a, b)
            | Formula::And(a, b)
            | Formula::Implies(a, b)
            | Formula::Until(a, b)
            | Formula::W(a, b) => vec![a, b],
        }
    }

    /// Subformula reached by following child positions.
    pub fn at_path(&self, path: &[usize]) -> Option<&Formula> {
        path.iter()
            .try_fold(self, |f, &i| f.children().get(i).copied())
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        if let Formula::Prop(p) = self {
            out.extend(p.vars());
        }
        for c in self.children() {
            c.collect_vars(out);
        }
    }

    /// True when the formula contains no temporal operator.
    pub fn is_state_formula(&self) -> bool {
        match self {
            Formula::EX(_)
            | Formula::AX(_)
            | Formula::Until(..)
            | Formula::F(_)
            | Formula::G(_)
            | Formula::W(..) => false,
            f => f.children().iter().all(|c| c.is_state_formula()),
        }
    }

    /// Canonical text form; `parse(render(f)) == f`.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

// Binding strength, loosest first.
const PREC_IMPLIES: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_UNTIL: u8 = 4;
const PREC_UNARY: u8 = 5;

impl Formula {
    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) => PREC_IMPLIES,
            Formula::Or(..) => PREC_OR,
            Formula::And(..) => PREC_AND,
            Formula::Until(..) | Formula::W(..) => PREC_UNTIL,
            _ => PREC_UNARY,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            f.write_str("(")?;
            self.fmt_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Prop(p) => write!(f, "{p}"),
            Formula::Not(inner) => {
                f.write_str("!")?;
                inner.fmt_at(f, PREC_UNARY)
            }
            Formula::EX(inner) => fmt_unary(f, "EX", inner),
            Formula::AX(inner) => fmt_unary(f, "AX", inner),
            Formula::F(inner) => fmt_unary(f, "F", inner),
            Formula::G(inner) => fmt_unary(f, "G", inner),
            // `&` and `|` associate to the left; `=>`, `U` and `W` to the right.
            Formula::Or(a, b) => fmt_binary(f, a, " | ", b, PREC_OR, PREC_OR + 1),
            Formula::And(a, b) => fmt_binary(f, a, " & ", b, PREC_AND, PREC_AND + 1),
            Formula::Implies(a, b) => fmt_binary(f, a, " => ", b, PREC_IMPLIES + 1, PREC_IMPLIES),
            Formula::Until(a, b) => fmt_binary(f, a, " U ", b, PREC_UNTIL + 1, PREC_UNTIL),
            Formula::W(a, b) => fmt_binary(f, a, " W ", b, PREC_UNTIL + 1, PREC_UNTIL),
        }
    }
}

fn fmt_unary(f: &mut fmt::Formatter<'_>, op: &str, inner: &Formula) -> fmt::Result {
    write!(f, "{op}(")?;
    inner.fmt_at(f, 0)?;
    f.write_str(")")
}

fn fmt_binary(
    f: &mut fmt::Formatter<'_>,
    a: &Formula,
    op: &str,
    b: &Formula,
    left_prec: u8,
    right_prec: u8,
) -> fmt::Result {
    a.fmt_at(f, left_prec)?;
    f.write_str(op)?;
    b.fmt_at(f, right_prec)
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Literal(v) => write!(f, "{v}"),
            Pattern::Var(name) => f.write_str(name),
            Pattern::Wildcard => f.write_str("_"),
        }
    }
}

impl fmt::Display for Proposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.op_name)?;
        for (i, p) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")?;
        match &self.ret {
            None => Ok(()),
            Some(RetPredicate::Equals(p)) => write!(f, " == {p}"),
            Some(RetPredicate::Contains(p)) => write!(f, " contains {p}"),
        }
    }
}
