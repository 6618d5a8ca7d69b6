//! Pattern-guard functional IR.
//!
//! Variables are indices into the owning alternative's `vars` table; the
//! first `input_arity` entries are the function parameters.

use std::sync::Arc;

use indexmap::IndexMap;
use serde::Serialize;

use crate::syntax::{Builtin, Kind, PredKey};

pub type LocalId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Pattern {
    Var(LocalId),
    Wildcard,
    Int(i64),
    Atom(Arc<str>),
    Construct(Arc<str>, Vec<Pattern>),
    Tuple(Vec<Pattern>),
    Suc(Box<Pattern>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum FunExpr {
    Var(LocalId),
    Int(i64),
    Atom(Arc<str>),
    Construct(Arc<str>, Vec<FunExpr>),
    /// Arity 0 is the unit value `()`.
    Tuple(Vec<FunExpr>),
    /// Call of function number `func`; `args` has one entry per input.
    Call { func: usize, name: Arc<str>, args: Vec<FunExpr> },
    Suc(Box<FunExpr>),
    Fail,
    /// A built-in test used as an expression: `Suc ()` or `Fail`.
    Builtin(Builtin, Vec<FunExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Qualifier {
    /// `pattern <- scrutinee`
    Match { pattern: Pattern, scrutinee: FunExpr },
    /// `let pattern = bound`; the pattern is a variable, a wildcard or a
    /// tuple of those. Scope is the whole alternative.
    Let { pattern: Pattern, bound: FunExpr },
    /// Boolean guard on a comparison built-in.
    Test(Builtin, FunExpr, FunExpr),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Alternative {
    pub vars: Vec<String>,
    /// Empty means the trivial guard `True`.
    pub qualifiers: Vec<Qualifier>,
    pub result: FunExpr,
    /// 1-based source clause.
    pub clause: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Equation {
    pub params: Vec<String>,
    pub alternatives: Vec<Alternative>,
    pub otherwise_fail: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Function {
    pub name: Arc<str>,
    pub pred: PredKey,
    pub kind: Kind,
    pub input_arity: usize,
    pub output_arity: usize,
    pub equation: Equation,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FunProgram {
    pub functions: IndexMap<Arc<str>, Function>,
}

impl FunProgram {
    pub fn get(&self, name: &str) -> Option<&Function> {
        self.functions.get(name)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.functions.get_index_of(name)
    }

    pub fn by_index(&self, i: usize) -> &Function {
        &self.functions[i]
    }

    pub fn by_pred(&self, key: &PredKey) -> Option<(usize, &Function)> {
        self.functions.values().enumerate().find(|(_, f)| &f.pred == key)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("IR serializes")
    }
}

impl FunExpr {
    pub fn unit() -> FunExpr {
        FunExpr::Tuple(Vec::new())
    }

    pub(crate) fn visit_calls<'a>(&'a self, f: &mut impl FnMut(&'a FunExpr)) {
        match self {
            FunExpr::Call { args, .. } => {
                f(self);
                args.iter().for_each(|a| a.visit_calls(f));
            }
            FunExpr::Construct(_, xs) | FunExpr::Tuple(xs) | FunExpr::Builtin(_, xs) => {
                xs.iter().for_each(|a| a.visit_calls(f))
            }
            FunExpr::Suc(e) => e.visit_calls(f),
            FunExpr::Var(_) | FunExpr::Int(_) | FunExpr::Atom(_) | FunExpr::Fail => {}
        }
    }
}
