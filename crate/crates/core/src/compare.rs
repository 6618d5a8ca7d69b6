//! Runs one query under both semantics and classifies the agreement.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::lazyeval::{run_with_stats, EvalError, EvalStats, Outcome};
use crate::modes::{check_plain, make_plain, ModesError};
use crate::oracle::{ld_solve_with, SearchReport, SolveOptions};
use crate::syntax::{parse_query, Kind, Mode, PredKey, Program, ProgramError, Query};
use crate::term::Term;
use crate::translate::{translate, FunProgram, TranslateError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    Equivalent,
    BothFail,
    MultiAnswerDivergence,
    LazyFailOracleSucceeds,
    OracleFlounderLazySucceeds,
    Error,
}

impl Verdict {
    pub const ALL: [Verdict; 6] = [
        Verdict::Equivalent,
        Verdict::BothFail,
        Verdict::MultiAnswerDivergence,
        Verdict::LazyFailOracleSucceeds,
        Verdict::OracleFlounderLazySucceeds,
        Verdict::Error,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Verdict::Equivalent => "Equivalent",
            Verdict::BothFail => "BothFail",
            Verdict::MultiAnswerDivergence => "MultiAnswerDivergence",
            Verdict::LazyFailOracleSucceeds => "LazyFailOracleSucceeds",
            Verdict::OracleFlounderLazySucceeds => "OracleFlounderLazySucceeds",
            Verdict::Error => "Error",
        }
    }

    /// Verdicts that count as agreement when no expectation is given.
    pub fn is_agreement(self) -> bool {
        matches!(self, Verdict::Equivalent | Verdict::BothFail)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Verdict {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Verdict::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown verdict `{}`", s.trim()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BridgeError {
    #[error("query must be a single atom")]
    NotSingleAtom,
    #[error("query calls a built-in")]
    Builtin,
    #[error("no function for predicate {0}")]
    UnknownPredicate(PredKey),
    #[error("input argument {0} is not ground")]
    NonGroundInput(usize),
    #[error("output argument {0} is not a fresh variable")]
    OutputNotFresh(usize),
}

/// A query atom read as a function call.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bridge {
    pub pred: PredKey,
    pub function: String,
    pub kind: Kind,
    pub inputs: Vec<Term>,
    /// Names of the output variables in output order.
    pub outputs: Vec<String>,
}

pub fn bridge_query(p: &Program, fp: &FunProgram, q: &Query) -> Result<Bridge, BridgeError> {
    let [atom] = q.atoms.as_slice() else {
        return Err(BridgeError::NotSingleAtom);
    };
    if atom.builtin().is_some() {
        return Err(BridgeError::Builtin);
    }
    let key = atom.key();
    let (_, f) = fp.by_pred(&key).ok_or_else(|| BridgeError::UnknownPredicate(key.clone()))?;
    let modes = &p.modes.get(&key).ok_or_else(|| BridgeError::UnknownPredicate(key.clone()))?.modes;
    let mut inputs = Vec::new();
    let mut outputs: Vec<String> = Vec::new();
    let mut seen = Vec::new();
    for (i, (m, t)) in modes.iter().zip(&atom.args).enumerate() {
        match m {
            Mode::In if t.is_ground() => inputs.push(t.clone()),
            Mode::In => return Err(BridgeError::NonGroundInput(i + 1)),
            Mode::Out => match t.as_var() {
                Some(v) if !seen.contains(v) => {
                    seen.push(v.clone());
                    outputs.push(v.name.to_string());
                }
                _ => return Err(BridgeError::OutputNotFresh(i + 1)),
            },
        }
    }
    Ok(Bridge { pred: key, function: f.name.to_string(), kind: f.kind, inputs, outputs })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompareError {
    #[error(transparent)]
    Program(#[from] ProgramError),
    #[error(transparent)]
    Modes(#[from] ModesError),
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Bridge(#[from] BridgeError),
}

/// A program prepared for comparison: the source for the oracle, and its
/// (plainified if needed) translation for the lazy side.
#[derive(Debug, Clone)]
pub struct CompareSession {
    pub source: Program,
    pub lazy: Program,
    pub fp: FunProgram,
    pub budget: u64,
    pub solve: SolveOptions,
}

pub const DEFAULT_BUDGET: u64 = 1_000_000;

impl CompareSession {
    pub fn new(p: &Program) -> Result<Self, CompareError> {
        let lazy = if check_plain(p).holds { p.clone() } else { make_plain(p)? };
        let fp = translate(&lazy)?;
        Ok(CompareSession {
            source: p.clone(),
            lazy,
            fp,
            budget: DEFAULT_BUDGET,
            solve: SolveOptions::default(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LazySide {
    /// `Some` when evaluation produced a value or `Fail`.
    pub outcome: Option<Outcome>,
    pub error: Option<String>,
    pub stats: EvalStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSide {
    /// Bindings of the output variables in the first answer.
    pub first: Option<Vec<Term>>,
    pub answers: usize,
    pub exhausted: bool,
    pub floundered: Option<String>,
    pub error: Option<String>,
    pub steps: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub query: String,
    pub expect: Option<Verdict>,
    pub verdict: Verdict,
    pub lazy: LazySide,
    pub oracle: OracleSide,
    pub note: Option<String>,
}

impl CompareRow {
    /// Agreement, or exactly the verdict that was annotated.
    pub fn ok(&self) -> bool {
        match self.expect {
            Some(e) => e == self.verdict,
            None => self.verdict.is_agreement(),
        }
    }
}

fn error_row(query: &str, expect: Option<Verdict>, note: String) -> CompareRow {
    CompareRow {
        query: query.to_string(),
        expect,
        verdict: Verdict::Error,
        lazy: LazySide { outcome: None, error: None, stats: EvalStats::default() },
        oracle: OracleSide {
            first: None,
            answers: 0,
            exhausted: false,
            floundered: None,
            error: None,
            steps: 0,
        },
        note: Some(note),
    }
}

fn oracle_side(report: &SearchReport, outputs: &[String]) -> OracleSide {
    let first = report
        .answers
        .first()
        .map(|a| outputs.iter().map(|v| a.bindings.get(v).cloned().unwrap_or_else(|| Term::var(v, 0))).collect());
    OracleSide {
        first,
        answers: report.answers.len(),
        exhausted: report.exhausted,
        floundered: report.floundered.clone(),
        error: report.type_error.clone(),
        steps: report.steps,
    }
}

fn classify(lazy: &Result<Outcome, EvalError>, report: &SearchReport, outputs: &[String]) -> (Verdict, Option<String>) {
    let answer_matches = |ts: &[Term]| {
        report
            .answers
            .iter()
            .position(|a| outputs.iter().zip(ts).all(|(v, t)| a.bindings.get(v) == Some(t)))
    };
    let oracle_stuck = report.floundered.is_some() || (report.answers.is_empty() && report.limit_hit.is_some());
    match lazy {
        Err(e) => (Verdict::Error, Some(format!("lazy: {e}"))),
        Ok(Outcome::Value(_)) if oracle_stuck => (Verdict::OracleFlounderLazySucceeds, None),
        Ok(_) if report.type_error.is_some() => {
            (Verdict::Error, report.type_error.as_ref().map(|e| format!("oracle: {e}")))
        }
        Ok(Outcome::Value(ts)) => match answer_matches(ts) {
            Some(0) => (Verdict::Equivalent, None),
            Some(i) => (Verdict::MultiAnswerDivergence, Some(format!("lazy value is oracle answer {}", i + 1))),
            None if report.answers.is_empty() => (Verdict::Error, Some("lazy value, oracle has no answer".into())),
            None => (Verdict::Error, Some("lazy value differs from every oracle answer".into())),
        },
        Ok(Outcome::Fail) if oracle_stuck => (Verdict::Error, Some("lazy Fail, oracle inconclusive".into())),
        Ok(Outcome::Fail) => match report.answers.len() {
            0 => (Verdict::BothFail, None),
            1 => (Verdict::LazyFailOracleSucceeds, None),
            _ => (Verdict::MultiAnswerDivergence, None),
        },
    }
}

/// Compares one query given as source text.
pub fn compare_query(s: &CompareSession, query: &str, expect: Option<Verdict>) -> CompareRow {
    let q = match parse_query(query) {
        Ok(q) => q,
        Err(e) => return error_row(query, expect, e.to_string()),
    };
    let bridge = match bridge_query(&s.lazy, &s.fp, &q) {
        Ok(b) => b,
        Err(e) => return error_row(query, expect, e.to_string()),
    };
    let (lazy, stats) = run_with_stats(&s.fp, &bridge.function, &bridge.inputs, s.budget);
    let report = ld_solve_with(&s.source, &q, &s.solve, &mut ());
    let (verdict, note) = classify(&lazy, &report, &bridge.outputs);
    let (outcome, error) = match lazy {
        Ok(o) => (Some(o), None),
        Err(e) => (None, Some(e.to_string())),
    };
    CompareRow {
        query: query.trim().to_string(),
        expect,
        verdict,
        lazy: LazySide { outcome, error, stats },
        oracle: oracle_side(&report, &bridge.outputs),
        note,
    }
}

/// One line of a queries file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryLine {
    pub line: usize,
    pub query: String,
    pub expect: Option<Verdict>,
}

/// Reads one query per line; `%` lines and blank lines are skipped, and a
/// trailing `# expect: Verdict` annotates the line.
pub fn parse_queries(text: &str) -> Result<Vec<QueryLine>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') || line.starts_with('#') {
            continue;
        }
        let (query, expect) = match line.split_once('#') {
            Some((q, note)) => {
                let note = note.trim();
                let v = note
                    .strip_prefix("expect:")
                    .ok_or_else(|| format!("line {}: unknown annotation `{note}`", i + 1))?;
                (q.trim(), Some(v.parse::<Verdict>().map_err(|e| format!("line {}: {e}", i + 1))?))
            }
            None => (line, None),
        };
        out.push(QueryLine { line: i + 1, query: query.to_string(), expect });
    }
    Ok(out)
}
