//! Command implementations behind the `eptl` binary.
//!
//! Every command returns an [`Outcome`] instead of printing or exiting, so the
//! same code paths are exercised by the tests and the binary.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value as Json};

use eptl::datatypes::{generate, validate_returns, ReturnMismatch};
use eptl::formula::Pattern;
use eptl::lawkit::{self, law_catalog, LawReport};
use eptl::{
    check_execution, load_execution, parse, AbstractExecution, DatatypeSpec, Formula,
    GeneratorConfig, Interpretation, TraceDocument, Value, DEFAULT_EXTENSION_BOUND,
};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(code: i32, stdout: String) -> Self {
        Outcome {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn input_error(msg: impl std::fmt::Display) -> Self {
        Outcome {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "eptl", version)]
#[command(about = "Check temporal properties of partially ordered executions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a formula against a trace
    Check(CheckArgs),
    /// Generate a random valid trace of a replicated datatype
    Gen(GenArgs),
    /// Verify the rewrite-law catalog over exhaustive small models
    Laws(LawsArgs),
    /// List every serialization of a trace
    Serialize(SerializeArgs),
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Trace file (JSON)
    pub trace: PathBuf,
    /// Formula text
    #[arg(
        required_unless_present = "formula_file",
        conflicts_with = "formula_file"
    )]
    pub formula: Option<String>,
    /// Read the formula from a file instead
    #[arg(long)]
    pub formula_file: Option<PathBuf>,
    /// Interpretation domain for free variables, e.g. `1,2,"x"`
    #[arg(long)]
    pub domain: Option<String>,
    /// Also validate recorded return values against a datatype
    #[arg(long)]
    pub datatype: Option<DatatypeSpec>,
    /// Write the event graph in DOT format
    #[arg(long)]
    pub dot: Option<PathBuf>,
    /// Machine-readable report
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 2)]
    pub replicas: usize,
    #[arg(long, default_value_t = 8)]
    pub ops: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "mvr")]
    pub datatype: DatatypeSpec,
    #[arg(long = "merge-prob", default_value_t = 0.3)]
    pub merge_prob: f64,
    /// Output file; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LawsArgs {
    #[arg(long, default_value_t = 4)]
    pub max_events: usize,
    #[arg(long, default_value_t = 2)]
    pub props: usize,
    /// Check only the named law
    #[arg(long)]
    pub law: Option<String>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SerializeArgs {
    pub trace: PathBuf,
    /// Refuse traces with more events than this
    #[arg(long, default_value_t = DEFAULT_EXTENSION_BOUND)]
    pub bound: usize,
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(argv) {
        Ok(cli) => dispatch(cli.command),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                Outcome::ok(code, text)
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            }
        }
    }
}

pub fn dispatch(command: Command) -> Outcome {
    match command {
        Command::Check(a) => cmd_check(&a),
        Command::Gen(a) => cmd_gen(&a),
        Command::Laws(a) => cmd_laws(&a),
        Command::Serialize(a) => cmd_serialize(&a),
    }
}

fn read_trace(path: &Path) -> Result<AbstractExecution, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    load_execution(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Parses a comma-separated list of formula literals. Bare identifiers are
/// taken as strings.
pub fn parse_domain(text: &str) -> Result<BTreeSet<Value>, String> {
    let f = parse(&format!("domain({text})")).map_err(|e| format!("bad --domain: {e}"))?;
    let Formula::Prop(p) = f else {
        return Err("bad --domain".into());
    };
    p.args
        .into_iter()
        .map(|pat| match pat {
            Pattern::Literal(v) => Ok(v),
            Pattern::Var(name) => Ok(Value::Str(name)),
            Pattern::Wildcard => Err("bad --domain: `_` is not a value".to_string()),
        })
        .collect()
}

fn render_interp(i: &Interpretation) -> String {
    let parts: Vec<String> = i.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("{{{}}}", parts.join(", "))
}

fn mismatch_json(m: &ReturnMismatch) -> Json {
    json!({
        "event": m.event.as_str(),
        "expected": m.expected,
        "recorded": m.recorded,
    })
}

pub fn cmd_check(a: &CheckArgs) -> Outcome {
    let exec = match read_trace(&a.trace) {
        Ok(x) => x,
        Err(e) => return Outcome::input_error(e),
    };
    let text = match (&a.formula, &a.formula_file) {
        (Some(t), _) => t.clone(),
        (None, Some(p)) => match fs::read_to_string(p) {
            Ok(t) => t,
            Err(e) => return Outcome::input_error(format!("{}: {e}", p.display())),
        },
        (None, None) => return Outcome::input_error("no formula given"),
    };
    let formula = match parse(text.trim()) {
        Ok(f) => f,
        Err(e) => return Outcome::input_error(format!("formula: {e}")),
    };
    let domain = match a.domain.as_deref().map(parse_domain).transpose() {
        Ok(d) => d,
        Err(e) => return Outcome::input_error(e),
    };
    if let Some(path) = &a.dot {
        if let Err(e) = fs::write(path, exec.to_dot()) {
            return Outcome::input_error(format!("{}: {e}", path.display()));
        }
    }
    let mismatches = match a.datatype.map(|d| validate_returns(&exec, d)).transpose() {
        Ok(m) => m,
        Err(e) => return Outcome::input_error(e),
    };
    let verdict = match check_execution(&exec, &formula, domain.as_ref()) {
        Ok(v) => v,
        Err(e) => return Outcome::input_error(e),
    };
    let returns_ok = mismatches.as_ref().is_none_or(|m| m.is_empty());
    let code = if verdict.satisfied && returns_ok {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    };

    if a.json {
        let report = json!({
            "schema_version": SCHEMA_VERSION,
            "formula": formula.render(),
            "satisfied": verdict.satisfied,
            "interpretations": verdict.interpretations,
            "failures": verdict.failures.iter().map(|f| json!({
                "start": f.start.as_str(),
                "interpretation": f.interpretation,
                "event": f.event.as_str(),
                "subformula": f.subformula,
                "subformula_holds": f.holds,
                "path": f.path,
            })).collect::<Vec<_>>(),
            "returns": mismatches.as_ref().map(|ms| json!({
                "datatype": a.datatype.map(|d| d.name()),
                "valid": ms.is_empty(),
                "mismatches": ms.iter().map(mismatch_json).collect::<Vec<_>>(),
            })),
        });
        let mut out = serde_json::to_string_pretty(&report).expect("reports serialize");
        out.push('\n');
        return Outcome::ok(code, out);
    }

    let mut out = String::new();
    let _ = writeln!(out, "formula: {formula}");
    if verdict.satisfied {
        let _ = writeln!(
            out,
            "satisfied ({} interpretation{})",
            verdict.interpretations,
            if verdict.interpretations == 1 {
                ""
            } else {
                "s"
            }
        );
    } else {
        let _ = writeln!(out, "violated ({} failure(s))", verdict.failures.len());
        for f in &verdict.failures {
            let _ = writeln!(
                out,
                "  start {} under {}: `{}` {} at {}",
                f.start,
                render_interp(&f.interpretation),
                f.subformula,
                if f.holds { "holds" } else { "fails" },
                f.event
            );
        }
    }
    if let (Some(ms), Some(d)) = (&mismatches, a.datatype) {
        if ms.is_empty() {
            let _ = writeln!(out, "returns: valid {d} execution");
        } else {
            let _ = writeln!(out, "returns: {} mismatch(es) against {d}", ms.len());
            for m in ms {
                let recorded = m
                    .recorded
                    .as_ref()
                    .map_or("nothing".into(), Value::to_string);
                let _ = writeln!(
                    out,
                    "  {} returned {recorded}, expected {}",
                    m.event, m.expected
                );
            }
        }
    }
    Outcome::ok(code, out)
}

pub fn cmd_gen(a: &GenArgs) -> Outcome {
    let config = GeneratorConfig {
        replicas: a.replicas,
        ops: a.ops,
        seed: a.seed,
        datatype: a.datatype,
        merge_probability: a.merge_prob,
    };
    let exec = match generate(&config) {
        Ok(x) => x,
        Err(e) => return Outcome::input_error(e),
    };
    let doc = TraceDocument::from_execution(&exec).to_json();
    match &a.out {
        Some(path) => match fs::write(path, &doc) {
            Ok(()) => Outcome::ok(EXIT_OK, String::new()),
            Err(e) => Outcome::input_error(format!("{}: {e}", path.display())),
        },
        None => Outcome::ok(EXIT_OK, doc),
    }
}

pub fn cmd_laws(a: &LawsArgs) -> Outcome {
    let mut laws = law_catalog();
    if let Some(name) = &a.law {
        laws.retain(|l| l.name == name);
        if laws.is_empty() {
            let known: Vec<&str> = law_catalog().iter().map(|l| l.name).collect();
            return Outcome::input_error(format!(
                "unknown law `{name}`; known laws: {}",
                known.join(", ")
            ));
        }
    }
    let reports = match lawkit::check_laws(&laws, a.max_events, a.props) {
        Ok(r) => r,
        Err(e) => return Outcome::input_error(e),
    };
    let all_met = reports.iter().all(|r| r.expectation_met);
    let code = if all_met { EXIT_OK } else { EXIT_VIOLATION };

    if a.json {
        let report = json!({
            "schema_version": SCHEMA_VERSION,
            "max_events": a.max_events,
            "props": a.props,
            "all_expectations_met": all_met,
            "laws": reports.iter().map(LawReport::to_json).collect::<Vec<_>>(),
        });
        let mut out = serde_json::to_string_pretty(&report).expect("reports serialize");
        out.push('\n');
        return Outcome::ok(code, out);
    }

    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<28} {:<12} {:>8} {:>8}  result",
        "law", "kind", "models", "events"
    );
    for r in &reports {
        let result = match (r.expectation_met, &r.counterexample, r.fixture_refutes) {
            (true, _, Some(true)) => "refuted by fixture",
            (true, _, _) => "holds",
            (false, Some(_), _) => "COUNTEREXAMPLE",
            (false, None, _) => "FIXTURE DOES NOT REFUTE",
        };
        let _ = writeln!(
            out,
            "{:<28} {:<12} {:>8} {:>8}  {result}",
            r.name,
            r.kind.label(),
            r.models_checked,
            r.events_checked
        );
        let _ = writeln!(out, "    {}", r.statement);
        if let Some(cx) = &r.counterexample {
            let snippet = serde_json::to_string(&cx.to_json()).expect("counterexamples serialize");
            let _ = writeln!(out, "    counterexample at {}: {snippet}", cx.event);
        }
    }
    let met = reports.iter().filter(|r| r.expectation_met).count();
    let _ = writeln!(out, "{met}/{} entries as expected", reports.len());
    Outcome::ok(code, out)
}

pub fn cmd_serialize(a: &SerializeArgs) -> Outcome {
    let exec = match read_trace(&a.trace) {
        Ok(x) => x,
        Err(e) => return Outcome::input_error(e),
    };
    match exec.linear_extensions(a.bound) {
        Ok(orders) => {
            let mut out = String::new();
            for order in orders {
                let ids: Vec<&str> = order.iter().map(|id| id.as_str()).collect();
                let _ = writeln!(out, "{}", ids.join(","));
            }
            Outcome::ok(EXIT_OK, out)
        }
        Err(e) => Outcome::input_error(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_literals() {
        let d = parse_domain(r#"1, "x", true, y, {1, 2}"#).unwrap();
        assert!(d.contains(&Value::Int(1)));
        assert!(d.contains(&Value::str("x")));
        assert!(d.contains(&Value::str("y")));
        assert!(d.contains(&Value::Bool(true)));
        assert!(d.contains(&Value::set([Value::Int(1), Value::Int(2)])));
        assert!(parse_domain("_").is_err());
        assert!(parse_domain("1,").is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["eptl", "laws", "--max-events", "99"]).code, EXIT_INPUT);
        assert_eq!(run(["eptl", "frobnicate"]).code, EXIT_INPUT);
        assert_eq!(
            run(["eptl", "laws", "--law", "no-such-law"]).code,
            EXIT_INPUT
        );
        assert_eq!(run(["eptl", "gen", "--datatype", "queue"]).code, EXIT_INPUT);
    }
}
