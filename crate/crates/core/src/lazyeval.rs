//! Call-by-need evaluator for the pattern-guard IR.
//!
//! Every variable of an alternative owns a heap slot. Slots are delayed
//! expressions, projections out of another slot, indirections, or evaluated
//! weak-head normal forms. A slot under evaluation is marked in progress;
//! demanding it again is reported as a black hole.

use std::fmt;
use std::rc::Rc;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::grow;
use crate::syntax::{Builtin, Kind};
use crate::term::Term;
use crate::translate::{Alternative, FunExpr, FunProgram, Pattern, Qualifier};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("black hole: a binding demanded its own value")]
    BlackHole,
    #[error("step budget of {0} exhausted")]
    BudgetExceeded(u64),
    #[error("no alternative of {0} matched")]
    MatchFailure(String),
    #[error("instantiation error: {0}")]
    Instantiation(String),
    #[error("type error: {0}")]
    Type(String),
    #[error("unknown function {0}")]
    UnknownFunction(String),
    #[error("{function} expects {expected} argument(s), got {got}")]
    Arity { function: String, expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Outcome {
    /// Output values in output-position order.
    Value(Vec<Term>),
    Fail,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Fail => f.write_str("Fail"),
            Outcome::Value(ts) if ts.len() == 1 => write!(f, "{}", ts[0]),
            Outcome::Value(ts) => {
                f.write_str("(")?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct EvalStats {
    pub steps: u64,
    /// Guard alternatives entered and then abandoned.
    pub backtracks: u64,
    pub black_hole: bool,
    pub heap: usize,
}

type SlotId = usize;
type Env = Rc<[SlotId]>;

#[derive(Clone, Copy, Debug)]
enum Shape {
    Tuple(usize),
    Con(usize),
    Suc,
}

#[derive(Clone, Debug)]
enum Value {
    Int(i64),
    Atom(Arc<str>),
    Con(Arc<str>, Vec<SlotId>),
    Tuple(Vec<SlotId>),
    Suc(SlotId),
    Fail,
}

#[derive(Clone, Debug)]
enum Slot<'f> {
    Unbound,
    Delayed(&'f FunExpr, Env),
    Proj(SlotId, Shape, usize),
    Ind(SlotId),
    InProgress,
    Evaluated(Value),
}

struct Machine<'f> {
    fp: &'f FunProgram,
    heap: Vec<Slot<'f>>,
    budget: u64,
    stats: EvalStats,
}

impl<'f> Machine<'f> {
    fn alloc(&mut self, s: Slot<'f>) -> SlotId {
        self.heap.push(s);
        self.heap.len() - 1
    }

    fn value(&mut self, v: Value) -> SlotId {
        self.alloc(Slot::Evaluated(v))
    }

    fn step(&mut self) -> Result<(), EvalError> {
        if self.stats.steps >= self.budget {
            return Err(EvalError::BudgetExceeded(self.budget));
        }
        self.stats.steps += 1;
        Ok(())
    }

    fn inject(&mut self, t: &Term) -> SlotId {
        match t {
            Term::Var(_) => self.alloc(Slot::Unbound),
            Term::Int(n) => self.value(Value::Int(*n)),
            Term::Atom(a) => self.value(Value::Atom(a.clone())),
            Term::Compound(f, args) => {
                let xs = args.iter().map(|a| self.inject(a)).collect();
                self.value(Value::Con(f.clone(), xs))
            }
        }
    }

    /// Follows indirections; an indirection cycle can never produce a value.
    fn deref(&self, mut s: SlotId) -> Result<SlotId, EvalError> {
        for _ in 0..=self.heap.len() {
            match self.heap[s] {
                Slot::Ind(t) => s = t,
                _ => return Ok(s),
            }
        }
        Err(EvalError::BlackHole)
    }

    /// Allocates a slot for `e` without evaluating anything.
    fn delay(&mut self, e: &'f FunExpr, env: &Env) -> SlotId {
        match e {
            FunExpr::Var(id) => env[*id],
            FunExpr::Int(n) => self.value(Value::Int(*n)),
            FunExpr::Atom(a) => self.value(Value::Atom(a.clone())),
            FunExpr::Construct(f, args) => {
                let xs = args.iter().map(|a| self.delay(a, env)).collect();
                self.value(Value::Con(f.clone(), xs))
            }
            FunExpr::Tuple(args) => {
                let xs = args.iter().map(|a| self.delay(a, env)).collect();
                self.value(Value::Tuple(xs))
            }
            FunExpr::Suc(x) => {
                let s = self.delay(x, env);
                self.value(Value::Suc(s))
            }
            FunExpr::Fail => self.value(Value::Fail),
            FunExpr::Call { .. } | FunExpr::Builtin(..) => self.alloc(Slot::Delayed(e, env.clone())),
        }
    }

    /// Forces a slot to weak-head normal form and returns the slot that
    /// holds the value.
    fn whnf(&mut self, s: SlotId) -> Result<SlotId, EvalError> {
        let s = self.deref(s)?;
        match std::mem::replace(&mut self.heap[s], Slot::InProgress) {
            Slot::Evaluated(v) => {
                self.heap[s] = Slot::Evaluated(v);
                Ok(s)
            }
            Slot::InProgress => {
                self.stats.black_hole = true;
                Err(EvalError::BlackHole)
            }
            Slot::Unbound => {
                self.heap[s] = Slot::Unbound;
                Err(EvalError::Instantiation("demanded a variable that is never bound".into()))
            }
            Slot::Ind(_) => unreachable!("dereferenced"),
            Slot::Delayed(e, env) => {
                let r = grow(|| self.eval(e, &env))?;
                self.heap[s] = Slot::Ind(r);
                Ok(r)
            }
            Slot::Proj(src, shape, i) => {
                let v = grow(|| self.whnf(src))?;
                let part = match (&self.heap[v], shape) {
                    (Slot::Evaluated(Value::Tuple(xs)), Shape::Tuple(n)) if xs.len() == n => xs[i],
                    (Slot::Evaluated(Value::Con(_, xs)), Shape::Con(n)) if xs.len() == n => xs[i],
                    (Slot::Evaluated(Value::Suc(x)), Shape::Suc) => *x,
                    _ => return Err(EvalError::MatchFailure("irrefutable pattern".into())),
                };
                let r = grow(|| self.whnf(part))?;
                self.heap[s] = Slot::Ind(r);
                Ok(r)
            }
        }
    }

    fn get(&self, s: SlotId) -> &Value {
        match &self.heap[s] {
            Slot::Evaluated(v) => v,
            other => unreachable!("slot {s} not evaluated: {other:?}"),
        }
    }

    fn eval(&mut self, e: &'f FunExpr, env: &Env) -> Result<SlotId, EvalError> {
        match e {
            FunExpr::Call { func, args, .. } => {
                let xs: Vec<SlotId> = args.iter().map(|a| self.delay(a, env)).collect();
                self.call(*func, xs)
            }
            FunExpr::Builtin(b, args) => {
                let ok = self.builtin(*b, &args[0], &args[1], env)?;
                let unit = self.value(Value::Tuple(Vec::new()));
                Ok(self.value(if ok { Value::Suc(unit) } else { Value::Fail }))
            }
            _ => {
                let s = self.delay(e, env);
                self.whnf(s)
            }
        }
    }

    fn call(&mut self, func: usize, args: Vec<SlotId>) -> Result<SlotId, EvalError> {
        let f = self.fp.by_index(func);
        if args.len() != f.input_arity {
            return Err(EvalError::Arity { function: f.name.to_string(), expected: f.input_arity, got: args.len() });
        }
        for alt in &f.equation.alternatives {
            self.step()?;
            let env = self.enter(alt, &args);
            if self.qualifiers(alt, &env)? {
                let r = self.delay(&alt.result, &env);
                return self.whnf(r);
            }
            self.stats.backtracks += 1;
        }
        if f.kind == Kind::Test {
            Ok(self.value(Value::Fail))
        } else {
            Err(EvalError::MatchFailure(f.name.to_string()))
        }
    }

    /// Builds the environment of an alternative and installs all of its
    /// `let` bindings up front, so they may refer to each other.
    fn enter(&mut self, alt: &'f Alternative, args: &[SlotId]) -> Env {
        let mut slots: Vec<SlotId> = args.to_vec();
        for _ in args.len()..alt.vars.len() {
            slots.push(self.alloc(Slot::Unbound));
        }
        let env: Env = slots.into();
        for q in &alt.qualifiers {
            if let Qualifier::Let { pattern, bound } = q {
                let s = self.delay(bound, &env);
                self.bind_lazily(pattern, s, &env);
            }
        }
        env
    }

    /// Points every still unbound variable of `p` at the matching part of
    /// `src`, without forcing anything.
    fn bind_lazily(&mut self, p: &Pattern, src: SlotId, env: &Env) {
        match p {
            Pattern::Var(id) => {
                let v = env[*id];
                if matches!(self.heap[v], Slot::Unbound) && v != src {
                    self.heap[v] = Slot::Ind(src);
                }
            }
            Pattern::Wildcard | Pattern::Int(_) | Pattern::Atom(_) => {}
            Pattern::Construct(_, ps) | Pattern::Tuple(ps) => {
                let n = ps.len();
                let shape = if matches!(p, Pattern::Tuple(_)) { Shape::Tuple(n) } else { Shape::Con(n) };
                for (i, q) in ps.iter().enumerate() {
                    if binds_anything(q) {
                        let part = self.alloc(Slot::Proj(src, shape, i));
                        self.bind_lazily(q, part, env);
                    }
                }
            }
            Pattern::Suc(q) => {
                if binds_anything(q) {
                    let part = self.alloc(Slot::Proj(src, Shape::Suc, 0));
                    self.bind_lazily(q, part, env);
                }
            }
        }
    }

    fn qualifiers(&mut self, alt: &'f Alternative, env: &Env) -> Result<bool, EvalError> {
        for q in &alt.qualifiers {
            let ok = match q {
                Qualifier::Let { .. } => true,
                Qualifier::Match { pattern, scrutinee } => {
                    let s = self.delay(scrutinee, env);
                    let fresh = unbound_vars(pattern, env, &self.heap);
                    self.bind_lazily(pattern, s, env);
                    self.matches(pattern, s, env, &fresh)?
                }
                Qualifier::Test(b, l, r) => self.builtin(*b, l, r, env)?,
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Forces `s` only as deep as `p` mentions constructors. Variables in
    /// `fresh` were bound lazily to the scrutinee; others must be equal.
    fn matches(&mut self, p: &Pattern, s: SlotId, env: &Env, fresh: &[usize]) -> Result<bool, EvalError> {
        match p {
            Pattern::Wildcard => Ok(true),
            Pattern::Var(id) if fresh.contains(id) => Ok(true),
            Pattern::Var(id) => {
                let a = self.deep(env[*id])?;
                let b = self.deep(s)?;
                Ok(a == b)
            }
            _ => {
                let v = grow(|| self.whnf(s))?;
                let parts: Vec<SlotId> = match (p, self.get(v)) {
                    (Pattern::Int(n), Value::Int(m)) => return Ok(n == m),
                    (Pattern::Atom(a), Value::Atom(b)) => return Ok(a == b),
                    (Pattern::Construct(f, ps), Value::Con(g, xs)) if f == g && ps.len() == xs.len() => xs.clone(),
                    (Pattern::Tuple(ps), Value::Tuple(xs)) if ps.len() == xs.len() => xs.clone(),
                    (Pattern::Suc(_), Value::Suc(x)) => vec![*x],
                    _ => return Ok(false),
                };
                let subs: Vec<&Pattern> = match p {
                    Pattern::Construct(_, ps) | Pattern::Tuple(ps) => ps.iter().collect(),
                    Pattern::Suc(q) => vec![q],
                    _ => unreachable!(),
                };
                for (q, x) in subs.into_iter().zip(parts) {
                    if !self.matches(q, x, env, fresh)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    fn builtin(&mut self, b: Builtin, l: &'f FunExpr, r: &'f FunExpr, env: &Env) -> Result<bool, EvalError> {
        self.step()?;
        let (ls, rs) = (self.delay(l, env), self.delay(r, env));
        let a = self.deep(ls).map_err(instantiation(b))?;
        let c = self.deep(rs).map_err(instantiation(b))?;
        match b {
            Builtin::Eq | Builtin::Match => Ok(a == c),
            Builtin::Neq => Ok(a != c),
            _ => match (&a, &c) {
                (Term::Int(x), Term::Int(y)) => Ok(match b {
                    Builtin::Lt => x < y,
                    Builtin::Le => x <= y,
                    Builtin::Gt => x > y,
                    _ => x >= y,
                }),
                _ => Err(EvalError::Type(format!("{a} {} {c}: integers expected", b.symbol()))),
            },
        }
    }

    /// Reads a slot back as a fully evaluated term.
    fn deep(&mut self, s: SlotId) -> Result<Term, EvalError> {
        let v = grow(|| self.whnf(s))?;
        match self.get(v).clone() {
            Value::Int(n) => Ok(Term::Int(n)),
            Value::Atom(a) => Ok(Term::Atom(a)),
            Value::Con(f, xs) => {
                let args = xs.into_iter().map(|x| grow(|| self.deep(x))).collect::<Result<Vec<_>, _>>()?;
                Ok(Term::Compound(f, args))
            }
            Value::Tuple(_) => Err(EvalError::Type("tuple in a data position".into())),
            Value::Suc(_) | Value::Fail => Err(EvalError::Type("Result value in a data position".into())),
        }
    }
}

fn instantiation(b: Builtin) -> impl Fn(EvalError) -> EvalError {
    move |e| match e {
        EvalError::Instantiation(_) => {
            EvalError::Instantiation(format!("built-in {} applied to a non-ground operand", b.symbol()))
        }
        e => e,
    }
}

fn binds_anything(p: &Pattern) -> bool {
    match p {
        Pattern::Var(_) => true,
        Pattern::Wildcard | Pattern::Int(_) | Pattern::Atom(_) => false,
        Pattern::Construct(_, ps) | Pattern::Tuple(ps) => ps.iter().any(binds_anything),
        Pattern::Suc(q) => binds_anything(q),
    }
}

fn unbound_vars(p: &Pattern, env: &Env, heap: &[Slot<'_>]) -> Vec<usize> {
    fn go(p: &Pattern, env: &Env, heap: &[Slot<'_>], out: &mut Vec<usize>) {
        match p {
            Pattern::Var(id) => {
                if matches!(heap[env[*id]], Slot::Unbound) && !out.contains(id) {
                    out.push(*id);
                }
            }
            Pattern::Wildcard | Pattern::Int(_) | Pattern::Atom(_) => {}
            Pattern::Construct(_, ps) | Pattern::Tuple(ps) => ps.iter().for_each(|q| go(q, env, heap, out)),
            Pattern::Suc(q) => go(q, env, heap, out),
        }
    }
    let mut out = Vec::new();
    go(p, env, heap, &mut out);
    out
}

/// Evaluates `fname` applied to `args` and reports the outcome together with
/// the step counters, which are meaningful even when evaluation fails.
pub fn run_with_stats(
    fp: &FunProgram,
    fname: &str,
    args: &[Term],
    budget: u64,
) -> (Result<Outcome, EvalError>, EvalStats) {
    let mut m = Machine { fp, heap: Vec::new(), budget, stats: EvalStats::default() };
    let r = run(&mut m, fname, args);
    m.stats.heap = m.heap.len();
    if matches!(r, Err(EvalError::BlackHole)) {
        m.stats.black_hole = true;
    }
    (r, m.stats)
}

fn run(m: &mut Machine<'_>, fname: &str, args: &[Term]) -> Result<Outcome, EvalError> {
    let func = m.fp.index_of(fname).ok_or_else(|| EvalError::UnknownFunction(fname.to_string()))?;
    let f = m.fp.by_index(func);
    let xs: Vec<SlotId> = args.iter().map(|a| m.inject(a)).collect();
    let r = m.call(func, xs)?;
    let payload = if f.kind == Kind::Test {
        match m.get(r) {
            Value::Suc(p) => *p,
            Value::Fail => return Ok(Outcome::Fail),
            _ => return Err(EvalError::Type(format!("{} returned a non-Result value", f.name))),
        }
    } else {
        r
    };
    let parts = match f.output_arity {
        1 => vec![payload],
        n => {
            let v = m.whnf(payload)?;
            match m.get(v) {
                Value::Tuple(xs) if xs.len() == n => xs.clone(),
                _ => return Err(EvalError::Type(format!("{} did not return a {n}-tuple", f.name))),
            }
        }
    };
    let terms = parts.into_iter().map(|p| m.deep(p)).collect::<Result<Vec<_>, _>>()?;
    Ok(Outcome::Value(terms))
}

pub fn eval_call(fp: &FunProgram, fname: &str, args: &[Term], budget: u64) -> Result<Outcome, EvalError> {
    run_with_stats(fp, fname, args, budget).0
}
