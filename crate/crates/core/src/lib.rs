//! Temporal logic over partially ordered executions of replicated data types.
//!
//! An [`AbstractExecution`] is a set of operation events ordered by
//! visibility. Formulas are evaluated at events, with temporal operators
//! ranging over visibility successors rather than a single timeline.

pub mod datatypes;
pub mod eval;
pub mod event;
pub mod fixtures;
pub mod formula;
pub mod graph;
pub mod lawkit;
pub mod trace;

pub use datatypes::{DatatypeError, DatatypeSpec, GeneratorConfig};
pub use eval::{
    check_execution, check_execution_with, CompiledFormula, EvalError, Evaluator, Failure,
    OperationMatcher, PropMatcher, Verdict,
};
pub use event::{Event, EventId, OperationRecord, Value};
pub use formula::{parse, Formula, Interpretation, ParseError, Pattern, Proposition, RetPredicate};
pub use graph::{AbstractExecution, GraphError, DEFAULT_EXTENSION_BOUND};
pub use trace::{load_execution, TraceDocument, TraceError, TraceEvent};

/// Multi-value register property: after `put(a)`, reads keep returning `a`
/// until a put of a different value intervenes.
pub const CANONICAL_MVR_FORMULA: &str =
    "G(put(a) => ((get() => get() contains a) W (put(_) & !put(a))))";

/// The same property phrased from the immediate successors of the put, with
/// any put releasing the obligation. Agrees with [`CANONICAL_MVR_FORMULA`] on
/// the reference executions but is too strong in general: a put on another
/// branch can overwrite `a` without lying between the read and the put.
pub const MVR_AX_FORMULA: &str = "G(put(a) => AX((get() => get() contains a) W put(_)))";

/// No execution of an operation before it is granted.
pub const ACCESS_GRANT_FORMULA: &str = "!exec(op, s, o) W grant(op, s, o)";

/// After a revocation, no execution until a new grant.
pub const ACCESS_REVOKE_FORMULA: &str =
    "G(revoke(op, s, o) => AX(!exec(op, s, o) W grant(op, s, o)))";
