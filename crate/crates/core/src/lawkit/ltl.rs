//! Finite-trace LTL, used as an oracle on totally ordered executions.
//!
//! `EX` is read as the strong next (`X`, false at the last position) and
//! `AX` as the weak next (true at the last position). `F`, `G` and `W` are
//! evaluated through their definitions in terms of `U` and negation.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::formula::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtlError {
    #[error("position {position} is outside a trace of length {len}")]
    Position { position: usize, len: usize },
    #[error("proposition `{0}` is not atomic; LTL states only carry 0-ary propositions")]
    UnsupportedProposition(String),
}

/// A finite sequence of states, each the set of atomic propositions true in it.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LtlTrace {
    pub states: Vec<BTreeSet<String>>,
}

impl LtlTrace {
    pub fn new(states: Vec<BTreeSet<String>>) -> Self {
        LtlTrace { states }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// `(σ, j) ⊨ f`.
pub fn ltl_sat(trace: &LtlTrace, j: usize, f: &Formula) -> Result<bool, LtlError> {
    if j >= trace.len() {
        return Err(LtlError::Position {
            position: j,
            len: trace.len(),
        });
    }
    sat_at(trace, j, f)
}

fn sat_at(t: &LtlTrace, j: usize, f: &Formula) -> Result<bool, LtlError> {
    let n = t.len();
    Ok(match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Prop(p) => {
            if !p.args.is_empty() || p.ret.is_some() {
                return Err(LtlError::UnsupportedProposition(p.to_string()));
            }
            t.states[j].contains(&p.op_name)
        }
        Formula::Not(a) => !sat_at(t, j, a)?,
        Formula::Or(a, b) => sat_at(t, j, a)? || sat_at(t, j, b)?,
        Formula::And(a, b) => !(!sat_at(t, j, a)? || !sat_at(t, j, b)?),
        Formula::Implies(a, b) => !sat_at(t, j, a)? || sat_at(t, j, b)?,
        Formula::EX(a) => j + 1 < n && sat_at(t, j + 1, a)?,
        Formula::AX(a) => j + 1 >= n || sat_at(t, j + 1, a)?,
        Formula::Until(a, b) => until(t, j, a, b)?,
        Formula::F(a) => until(t, j, &Formula::True, a)?,
        Formula::G(a) => !until(t, j, &Formula::True, &Formula::not((**a).clone()))?,
        Formula::W(a, b) => sat_at(t, j, &Formula::globally((**a).clone()))? || until(t, j, a, b)?,
    })
}

/// `∃k. j ≤ k < |σ|` with ψ at `k` and φ at every `i` in `j..k`.
fn until(t: &LtlTrace, j: usize, a: &Formula, b: &Formula) -> Result<bool, LtlError> {
    for k in j..t.len() {
        if sat_at(t, k, b)? {
            let mut prefix = true;
            for i in j..k {
                if !sat_at(t, i, a)? {
                    prefix = false;
                    break;
                }
            }
            if prefix {
                return Ok(true);
            }
        }
    }
    Ok(false)
}
