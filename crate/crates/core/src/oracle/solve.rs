use std::collections::HashSet;
use std::fmt;

use indexmap::IndexMap;
use serde::Serialize;

use super::{rename_clause, unify_atoms, unify_into, Substitution};
use crate::syntax::{Atom, Builtin, Clause, Program, Query};
use crate::term::{Term, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DerivationLimits {
    pub max_steps: u64,
    pub max_depth: usize,
    pub max_answers: usize,
}

impl Default for DerivationLimits {
    fn default() -> Self {
        DerivationLimits { max_steps: 100_000, max_depth: 10_000, max_answers: 16 }
    }
}

impl DerivationLimits {
    /// Parses `steps=N,depth=D,answers=K`; omitted keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut lim = DerivationLimits::default();
        for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = part.split_once('=').ok_or_else(|| format!("expected key=value, got '{part}'"))?;
            let n: u64 = value.trim().parse().map_err(|_| format!("bad number in '{part}'"))?;
            if n == 0 {
                return Err(format!("limit '{key}' must be positive"));
            }
            match key.trim() {
                "steps" => lim.max_steps = n,
                "depth" => lim.max_depth = n as usize,
                "answers" => lim.max_answers = n as usize,
                other => return Err(format!("unknown limit '{other}'")),
            }
        }
        Ok(lim)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SolveOptions {
    pub limits: DerivationLimits,
    pub occurs_check: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { limits: DerivationLimits::default(), occurs_check: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Answer {
    /// Query variables in order; unbound or partially bound parts print as `_G<n>`.
    pub bindings: IndexMap<String, Term>,
    /// Number of resolution steps on the successful branch.
    pub length: usize,
    #[serde(skip)]
    pub theta: Substitution,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitKind {
    Steps,
    Depth,
    Answers,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchReport {
    pub answers: Vec<Answer>,
    /// The whole search tree was explored.
    pub exhausted: bool,
    pub limit_hit: Option<LimitKind>,
    /// Built-in selected with arguments too uninstantiated to evaluate.
    pub floundered: Option<String>,
    /// Arithmetic comparison on non-integers.
    pub type_error: Option<String>,
    pub steps: u64,
    /// Branches that ended because the selected atom had no matching clause
    /// or a built-in test failed.
    pub failed_branches: u64,
}

impl SearchReport {
    pub fn aborted(&self) -> bool {
        self.floundered.is_some() || self.type_error.is_some()
    }
}

impl fmt::Display for SearchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.answers.iter().enumerate() {
            if i > 0 {
                writeln!(f, ";")?;
            }
            if a.bindings.is_empty() {
                writeln!(f, "yes")?;
            }
            for (v, t) in &a.bindings {
                writeln!(f, "{v} = {t}")?;
            }
        }
        if let Some(a) = &self.floundered {
            writeln!(f, "floundered on {a}")?;
        } else if let Some(a) = &self.type_error {
            writeln!(f, "type error in {a}")?;
        } else if self.answers.is_empty() {
            writeln!(f, "{}", if self.limit_hit.is_some() { "no (search limit reached)" } else { "no" })?;
        }
        Ok(())
    }
}

/// Hooks into the search; all default to no-ops.
pub trait SearchObserver {
    /// A goal is about to have its leftmost atom selected.
    fn on_select(&mut self, _goal: &[Atom]) {}
    /// The leftmost atom of `goal` was resolved with the (renamed) `clause`.
    fn on_resolve(&mut self, _goal: &[Atom], _clause: &Clause, _mgu: &Substitution, _resolvent: &[Atom]) {}
}

impl SearchObserver for () {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinFault {
    NonGround,
    Type,
}

/// Evaluates a comparison built-in on its two arguments.
pub fn eval_comparison(op: Builtin, a: &Term, b: &Term) -> Result<bool, BuiltinFault> {
    if !a.is_ground() || !b.is_ground() {
        return Err(BuiltinFault::NonGround);
    }
    let ints = || match (a, b) {
        (Term::Int(x), Term::Int(y)) => Ok((*x, *y)),
        _ => Err(BuiltinFault::Type),
    };
    Ok(match op {
        Builtin::Eq => a == b,
        Builtin::Neq => a != b,
        Builtin::Lt => ints().map(|(x, y)| x < y)?,
        Builtin::Le => ints().map(|(x, y)| x <= y)?,
        Builtin::Gt => ints().map(|(x, y)| x > y)?,
        Builtin::Ge => ints().map(|(x, y)| x >= y)?,
        Builtin::Match => unreachable!("`=` is unification, not a comparison"),
    })
}

struct Frame {
    goal: Vec<Atom>,
    template: Vec<Term>,
    depth: usize,
    next_clause: usize,
    children: usize,
    visited: bool,
}

/// LD-resolution: leftmost selection, depth-first, clauses in source order.
pub fn ld_solve(p: &Program, q: &Query, limits: DerivationLimits) -> SearchReport {
    ld_solve_with(p, q, &SolveOptions { limits, occurs_check: true }, &mut ())
}

pub fn ld_solve_with(
    p: &Program,
    q: &Query,
    opts: &SolveOptions,
    obs: &mut dyn SearchObserver,
) -> SearchReport {
    let lim = opts.limits;
    let query_vars: HashSet<&Var> = q.vars.iter().collect();
    let mut next_id = q.max_var_id().map_or(0, |m| m + 1);
    let mut report = SearchReport {
        answers: Vec::new(),
        exhausted: false,
        limit_hit: None,
        floundered: None,
        type_error: None,
        steps: 0,
        failed_branches: 0,
    };
    let mut stack = vec![Frame {
        goal: q.atoms.clone(),
        template: q.vars.iter().map(|v| Term::Var(v.clone())).collect(),
        depth: 0,
        next_clause: 0,
        children: 0,
        visited: false,
    }];

    while let Some(frame) = stack.last_mut() {
        if frame.goal.is_empty() {
            let frame = stack.pop().expect("non-empty stack");
            report.answers.push(make_answer(q, &query_vars, &frame));
            if report.answers.len() >= lim.max_answers {
                report.limit_hit = Some(LimitKind::Answers);
                return report;
            }
            continue;
        }
        if !frame.visited {
            frame.visited = true;
            obs.on_select(&frame.goal);
        }
        if report.steps >= lim.max_steps {
            report.limit_hit = Some(LimitKind::Steps);
            return report;
        }
        if frame.depth >= lim.max_depth {
            report.limit_hit.get_or_insert(LimitKind::Depth);
            stack.pop();
            continue;
        }
        let selected = &frame.goal[0];

        if let Some(op) = selected.builtin() {
            let frame = stack.pop().expect("non-empty stack");
            report.steps += 1;
            let selected = &frame.goal[0];
            let (a, b) = (&selected.args[0], &selected.args[1]);
            let mgu = if op == Builtin::Match {
                let mut s = Substitution::new();
                unify_into(&mut s, a, b, opts.occurs_check).then_some(s)
            } else {
                match eval_comparison(op, a, b) {
                    Ok(true) => Some(Substitution::new()),
                    Ok(false) => None,
                    Err(BuiltinFault::NonGround) => {
                        report.floundered = Some(selected.to_string());
                        return report;
                    }
                    Err(BuiltinFault::Type) => {
                        report.type_error = Some(selected.to_string());
                        return report;
                    }
                }
            };
            match mgu {
                Some(mgu) => {
                    let goal: Vec<Atom> = frame.goal[1..].iter().map(|a| mgu.apply_atom(a)).collect();
                    stack.push(Frame {
                        goal,
                        template: frame.template.iter().map(|t| mgu.apply(t)).collect(),
                        depth: frame.depth + 1,
                        next_clause: 0,
                        children: 0,
                        visited: false,
                    });
                }
                None => report.failed_branches += 1,
            }
            continue;
        }

        let clauses = p.clauses(&selected.key());
        let mut resolved = None;
        while frame.next_clause < clauses.len() {
            let c = &clauses[frame.next_clause];
            frame.next_clause += 1;
            let renamed = rename_clause(c, next_id);
            if let Some(mgu) = unify_atoms(selected, &renamed.head, opts.occurs_check) {
                next_id += c.max_var_id().map_or(0, |m| m + 1);
                resolved = Some((renamed, mgu));
                break;
            }
        }
        match resolved {
            Some((clause, mgu)) => {
                report.steps += 1;
                frame.children += 1;
                let goal: Vec<Atom> =
                    clause.body.iter().chain(&frame.goal[1..]).map(|a| mgu.apply_atom(a)).collect();
                obs.on_resolve(&frame.goal, &clause, &mgu, &goal);
                let child = Frame {
                    goal,
                    template: frame.template.iter().map(|t| mgu.apply(t)).collect(),
                    depth: frame.depth + 1,
                    next_clause: 0,
                    children: 0,
                    visited: false,
                };
                stack.push(child);
            }
            None => {
                if frame.children == 0 {
                    report.failed_branches += 1;
                }
                stack.pop();
            }
        }
    }
    report.exhausted = report.limit_hit.is_none();
    report
}

fn make_answer(q: &Query, query_vars: &HashSet<&Var>, frame: &Frame) -> Answer {
    let rename = |t: &Term| {
        t.map_vars(&mut |v| {
            if query_vars.contains(v) {
                Term::Var(v.clone())
            } else {
                Term::Var(Var::new(format!("_G{}", v.id), v.id))
            }
        })
    };
    let bindings = q.vars.iter().zip(&frame.template).map(|(v, t)| (v.name.to_string(), rename(t))).collect();
    let theta = Substitution::from_pairs(
        q.vars
            .iter()
            .zip(&frame.template)
            .filter(|(v, t)| t.as_var() != Some(v))
            .map(|(v, t)| (v.clone(), t.clone())),
    );
    Answer { bindings, length: frame.depth, theta }
}
