//! Literal translation of consistent, plain programs into the pattern-guard IR.
//!
//! Each predicate becomes one function whose alternatives are its clauses in
//! source order. Head inputs are matched against the parameters; a test body
//! atom becomes `Suc outs <- f ins`, a non-test one `let outs = f ins`.

mod haskell;
mod ir;

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use indexmap::IndexMap;
use thiserror::Error;

use crate::modes::{check_consistent, check_plain, AnalysisReport};
use crate::syntax::{Atom, Builtin, Clause, Kind, Mode, PredKey, Program};
use crate::term::{Term, Var};

pub use haskell::emit_haskell;
pub use ir::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("program is not plain:\n{0}")]
    NotPlain(AnalysisReport),
    #[error("program is not consistent:\n{0}")]
    NotConsistent(AnalysisReport),
    #[error("unknown predicate {0}")]
    UnknownPredicate(PredKey),
    #[error("unknown built-in {0}")]
    UnknownBuiltin(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TranslateOptions {
    /// Emit comparison built-ins as `Suc () <- a == b` matches instead of
    /// boolean guards.
    pub builtins_as_calls: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BuiltinForm {
    Guard,
    Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BuiltinTranslation {
    Qualifier(Qualifier),
    Expr(FunExpr),
}

/// Translates a comparison built-in applied to already translated operands.
pub fn translate_builtin(
    op: &str,
    args: Vec<FunExpr>,
    form: BuiltinForm,
) -> Result<BuiltinTranslation, TranslateError> {
    let b = Builtin::from_symbol(op, args.len())
        .filter(|b| *b != Builtin::Match)
        .ok_or_else(|| TranslateError::UnknownBuiltin(format!("{op}/{}", args.len())))?;
    Ok(match form {
        BuiltinForm::Guard => {
            let mut it = args.into_iter();
            let (l, r) = (it.next().expect("arity 2"), it.next().expect("arity 2"));
            BuiltinTranslation::Qualifier(Qualifier::Test(b, l, r))
        }
        BuiltinForm::Expr => BuiltinTranslation::Expr(FunExpr::Builtin(b, args)),
    })
}

const HASKELL_RESERVED: &[&str] = &[
    "case", "class", "data", "default", "deriving", "do", "else", "foreign", "if", "import", "in",
    "infix", "infixl", "infixr", "instance", "let", "module", "newtype", "of", "then", "type",
    "where", "otherwise", "True", "False", "Suc", "Fail", "Result",
];

fn sanitize_fn_name(name: &str) -> String {
    let mut s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '\'' { c } else { '_' })
        .collect();
    match s.chars().next() {
        Some(c) if c.is_ascii_lowercase() || c == '_' => {}
        Some(c) if c.is_ascii_uppercase() => {
            s = format!("{}{}", c.to_ascii_lowercase(), &s[1..]);
        }
        _ => s = format!("p_{s}"),
    }
    s
}

struct Callee {
    index: usize,
    name: Arc<str>,
    kind: Kind,
    modes: Vec<Mode>,
}

/// Per-alternative variable table.
struct Scope<'a> {
    vars: Vec<String>,
    map: HashMap<Var, LocalId>,
    used: HashSet<String>,
    reserved: &'a HashSet<String>,
}

impl<'a> Scope<'a> {
    fn new(params: &[String], reserved: &'a HashSet<String>) -> Self {
        Scope {
            vars: params.to_vec(),
            map: HashMap::new(),
            used: params.iter().cloned().collect(),
            reserved,
        }
    }

    fn local(&mut self, v: &Var) -> LocalId {
        if let Some(&id) = self.map.get(v) {
            return id;
        }
        let mut name = v.name.to_lowercase();
        while self.used.contains(&name) || self.reserved.contains(&name) {
            name.push('\'');
        }
        self.used.insert(name.clone());
        self.vars.push(name);
        let id = self.vars.len() - 1;
        self.map.insert(v.clone(), id);
        id
    }

    fn pattern(&mut self, t: &Term) -> Pattern {
        match t {
            Term::Var(v) if v.is_anonymous() => Pattern::Wildcard,
            Term::Var(v) => Pattern::Var(self.local(v)),
            Term::Int(n) => Pattern::Int(*n),
            Term::Atom(a) => Pattern::Atom(a.clone()),
            Term::Compound(f, args) => {
                Pattern::Construct(f.clone(), args.iter().map(|a| self.pattern(a)).collect())
            }
        }
    }

    fn expr(&mut self, t: &Term) -> FunExpr {
        match t {
            Term::Var(v) => FunExpr::Var(self.local(v)),
            Term::Int(n) => FunExpr::Int(*n),
            Term::Atom(a) => FunExpr::Atom(a.clone()),
            Term::Compound(f, args) => {
                FunExpr::Construct(f.clone(), args.iter().map(|a| self.expr(a)).collect())
            }
        }
    }
}

fn tuple_pattern(mut ps: Vec<Pattern>) -> Pattern {
    if ps.len() == 1 {
        ps.pop().expect("one element")
    } else {
        Pattern::Tuple(ps)
    }
}

fn tuple_expr(mut es: Vec<FunExpr>) -> FunExpr {
    if es.len() == 1 {
        es.pop().expect("one element")
    } else {
        FunExpr::Tuple(es)
    }
}

fn split_by_modes<'t>(modes: &[Mode], args: &'t [Term]) -> (Vec<&'t Term>, Vec<&'t Term>) {
    let mut ins = Vec::new();
    let mut outs = Vec::new();
    for (m, t) in modes.iter().zip(args) {
        match m {
            Mode::In => ins.push(t),
            Mode::Out => outs.push(t),
        }
    }
    (ins, outs)
}

struct Translator<'p> {
    prog: &'p Program,
    callees: HashMap<PredKey, Callee>,
    reserved: HashSet<String>,
    opts: TranslateOptions,
}

impl Translator<'_> {
    fn body_atom(&self, scope: &mut Scope<'_>, atom: &Atom) -> Result<Qualifier, TranslateError> {
        match atom.builtin() {
            Some(Builtin::Match) => Ok(Qualifier::Match {
                pattern: scope.pattern(&atom.args[0]),
                scrutinee: scope.expr(&atom.args[1]),
            }),
            Some(op) => {
                let args = vec![scope.expr(&atom.args[0]), scope.expr(&atom.args[1])];
                let form = if self.opts.builtins_as_calls { BuiltinForm::Expr } else { BuiltinForm::Guard };
                Ok(match translate_builtin(op.symbol(), args, form)? {
                    BuiltinTranslation::Qualifier(q) => q,
                    BuiltinTranslation::Expr(e) => {
                        Qualifier::Match { pattern: Pattern::Suc(Box::new(Pattern::Tuple(Vec::new()))), scrutinee: e }
                    }
                })
            }
            None => {
                let callee =
                    self.callees.get(&atom.key()).ok_or_else(|| TranslateError::UnknownPredicate(atom.key()))?;
                let (ins, outs) = split_by_modes(&callee.modes, &atom.args);
                let args = ins.into_iter().map(|t| scope.expr(t)).collect();
                let outs = tuple_pattern(outs.into_iter().map(|t| scope.pattern(t)).collect());
                let call = FunExpr::Call { func: callee.index, name: callee.name.clone(), args };
                Ok(match callee.kind {
                    Kind::Test => Qualifier::Match { pattern: Pattern::Suc(Box::new(outs)), scrutinee: call },
                    Kind::NonTest => Qualifier::Let { pattern: outs, bound: call },
                })
            }
        }
    }

    fn alternative(
        &self,
        callee: &Callee,
        params: &[String],
        index: usize,
        clause: &Clause,
    ) -> Result<Alternative, TranslateError> {
        let mut scope = Scope::new(params, &self.reserved);
        let (ins, outs) = split_by_modes(&callee.modes, &clause.head.args);
        let mut qualifiers = Vec::new();
        if !ins.is_empty() {
            let pats: Vec<Pattern> = ins.into_iter().map(|t| scope.pattern(t)).collect();
            let scrutinee = tuple_expr((0..params.len()).map(FunExpr::Var).collect());
            qualifiers.push(Qualifier::Match { pattern: tuple_pattern(pats), scrutinee });
        }
        for b in &clause.body {
            qualifiers.push(self.body_atom(&mut scope, b)?);
        }
        let mut result = tuple_expr(outs.into_iter().map(|t| scope.expr(t)).collect());
        if callee.kind == Kind::Test {
            result = FunExpr::Suc(Box::new(result));
        }
        Ok(Alternative { vars: scope.vars, qualifiers, result, clause: index + 1 })
    }
}

pub fn translate(p: &Program) -> Result<FunProgram, TranslateError> {
    translate_with(p, TranslateOptions::default())
}

pub fn translate_with(p: &Program, opts: TranslateOptions) -> Result<FunProgram, TranslateError> {
    let consistent = check_consistent(p);
    if !consistent.holds {
        return Err(TranslateError::NotConsistent(consistent));
    }
    let plain = check_plain(p);
    if !plain.holds {
        return Err(TranslateError::NotPlain(plain));
    }

    let mut arities: HashMap<&str, usize> = HashMap::new();
    for k in p.predicates.keys() {
        *arities.entry(&k.name).or_default() += 1;
    }
    let mut callees = HashMap::new();
    let mut taken: HashSet<String> = HASKELL_RESERVED.iter().map(|s| s.to_string()).collect();
    for (index, key) in p.predicates.keys().enumerate() {
        let modes = p.modes.get(key).ok_or_else(|| TranslateError::UnknownPredicate(key.clone()))?.modes.clone();
        let mut name = sanitize_fn_name(&key.name);
        if arities[&*key.name] > 1 {
            name = format!("{name}_{}", key.arity);
        }
        while taken.contains(&name) {
            name.push('\'');
        }
        taken.insert(name.clone());
        callees.insert(key.clone(), Callee { index, name: name.into(), kind: p.kind(key), modes });
    }

    let tr = Translator { prog: p, callees, reserved: taken, opts };
    let mut functions = IndexMap::new();
    for (key, clauses) in &tr.prog.predicates {
        let callee = &tr.callees[key];
        let input_arity = callee.modes.iter().filter(|m| **m == Mode::In).count();
        let params: Vec<String> = (1..=input_arity).map(|i| format!("x{i}")).collect();
        let alternatives = clauses
            .iter()
            .enumerate()
            .map(|(i, c)| tr.alternative(callee, &params, i, c))
            .collect::<Result<Vec<_>, _>>()?;
        let f = Function {
            name: callee.name.clone(),
            pred: key.clone(),
            kind: callee.kind,
            input_arity,
            output_arity: callee.modes.len() - input_arity,
            equation: Equation { params, alternatives, otherwise_fail: callee.kind == Kind::Test },
        };
        functions.insert(callee.name.clone(), f);
    }
    Ok(FunProgram { functions })
}

fn nested_calls(e: &FunExpr, top_ok: bool) -> Vec<Arc<str>> {
    let mut skip = top_ok;
    let mut out = Vec::new();
    e.visit_calls(&mut |c| {
        if skip {
            skip = false;
            return;
        }
        if let FunExpr::Call { name, .. } = c {
            out.push(name.clone());
        }
    });
    out
}

/// Checks that test functions are only called under a `Suc` pattern and
/// non-test functions only as `let` bindings.
pub fn check_kind_discipline(fp: &FunProgram) -> Result<(), Vec<String>> {
    let mut problems = Vec::new();
    for f in fp.functions.values() {
        for alt in &f.equation.alternatives {
            let no_nested = |e: &FunExpr, top_ok: bool, problems: &mut Vec<String>| {
                for name in nested_calls(e, top_ok) {
                    problems.push(format!("{}: call to {name} outside a qualifier", f.name));
                }
            };
            for q in &alt.qualifiers {
                match q {
                    Qualifier::Match { pattern, scrutinee } => {
                        if let FunExpr::Call { func, name, .. } = scrutinee {
                            let k = fp.by_index(*func).kind;
                            if k != Kind::Test || !matches!(pattern, Pattern::Suc(_)) {
                                problems.push(format!("{}: {name} ({k}) matched without a Suc pattern", f.name));
                            }
                            no_nested(scrutinee, true, &mut problems);
                        } else {
                            no_nested(scrutinee, false, &mut problems);
                        }
                    }
                    Qualifier::Let { bound, .. } => {
                        if let FunExpr::Call { func, name, .. } = bound {
                            let k = fp.by_index(*func).kind;
                            if k != Kind::NonTest {
                                problems.push(format!("{}: test function {name} bound by let", f.name));
                            }
                            no_nested(bound, true, &mut problems);
                        } else {
                            no_nested(bound, false, &mut problems);
                        }
                    }
                    Qualifier::Test(_, l, r) => {
                        no_nested(l, false, &mut problems);
                        no_nested(r, false, &mut problems);
                    }
                }
            }
            no_nested(&alt.result, false, &mut problems);
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(problems)
    }
}
