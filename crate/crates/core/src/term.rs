//! First-order terms shared by the parser, the analyses and both evaluators.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

/// A logic variable. Ids are unique within one clause or query; the solver
/// renames clauses apart before mixing them with a goal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub name: Arc<str>,
    pub id: u32,
}

impl Var {
    pub fn new(name: impl Into<Arc<str>>, id: u32) -> Self {
        Var { name: name.into(), id }
    }

    /// `_` occurrences: each one is a distinct variable.
    pub fn is_anonymous(&self) -> bool {
        &*self.name == "_"
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    Int(i64),
    Atom(Arc<str>),
    Compound(Arc<str>, Vec<Term>),
}

pub const NIL: &str = "[]";
pub const CONS: &str = ".";

impl Term {
    pub fn var(name: &str, id: u32) -> Term {
        Term::Var(Var::new(name, id))
    }

    pub fn atom(name: &str) -> Term {
        Term::Atom(name.into())
    }

    pub fn compound(functor: &str, args: Vec<Term>) -> Term {
        if args.is_empty() {
            Term::Atom(functor.into())
        } else {
            Term::Compound(functor.into(), args)
        }
    }

    pub fn nil() -> Term {
        Term::Atom(NIL.into())
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::Compound(CONS.into(), vec![head, tail])
    }

    /// Builds a proper list, or a partial one when `tail` is given.
    pub fn list(items: impl IntoIterator<Item = Term>, tail: Option<Term>) -> Term {
        let items: Vec<Term> = items.into_iter().collect();
        let mut acc = tail.unwrap_or_else(Term::nil);
        for item in items.into_iter().rev() {
            acc = Term::cons(item, acc);
        }
        acc
    }

    pub fn int_list(values: &[i64]) -> Term {
        Term::list(values.iter().map(|&v| Term::Int(v)), None)
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Int(_) | Term::Atom(_) => true,
            Term::Compound(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Variable occurrences in depth-first, left-to-right order (with repeats).
    pub fn var_occurrences<'a>(&'a self, out: &mut Vec<&'a Var>) {
        match self {
            Term::Var(v) => out.push(v),
            Term::Int(_) | Term::Atom(_) => {}
            Term::Compound(_, args) => {
                for a in args {
                    a.var_occurrences(out);
                }
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut occ = Vec::new();
        self.var_occurrences(&mut occ);
        occ.into_iter().cloned().collect()
    }

    pub fn occurs(&self, var: &Var) -> bool {
        match self {
            Term::Var(v) => v == var,
            Term::Int(_) | Term::Atom(_) => false,
            Term::Compound(_, args) => args.iter().any(|a| a.occurs(var)),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Compound(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
            _ => 0,
        }
    }

    /// Splits a list term into its elements and the final tail.
    pub fn list_parts(&self) -> Option<(Vec<&Term>, &Term)> {
        let mut items = Vec::new();
        let mut cur = self;
        while let Term::Compound(f, args) = cur {
            if &**f == CONS && args.len() == 2 {
                items.push(&args[0]);
                cur = &args[1];
            } else {
                break;
            }
        }
        if items.is_empty() {
            None
        } else {
            Some((items, cur))
        }
    }

    /// Elements of a proper list; `None` for anything else.
    pub fn as_proper_list(&self) -> Option<Vec<&Term>> {
        if matches!(self, Term::Atom(a) if &**a == NIL) {
            return Some(Vec::new());
        }
        let (items, tail) = self.list_parts()?;
        match tail {
            Term::Atom(a) if &**a == NIL => Some(items),
            _ => None,
        }
    }

    /// Rewrites every variable through `f`.
    pub fn map_vars(&self, f: &mut impl FnMut(&Var) -> Term) -> Term {
        match self {
            Term::Var(v) => f(v),
            Term::Int(_) | Term::Atom(_) => self.clone(),
            Term::Compound(name, args) => {
                Term::Compound(name.clone(), args.iter().map(|a| a.map_vars(f)).collect())
            }
        }
    }
}

pub(crate) fn atom_needs_quotes(name: &str) -> bool {
    if name == NIL {
        return false;
    }
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return true,
    }
    !chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn write_atom(f: &mut impl fmt::Write, name: &str) -> fmt::Result {
    if atom_needs_quotes(name) {
        f.write_char('\'')?;
        for c in name.chars() {
            match c {
                '\'' => f.write_str("\\'")?,
                '\\' => f.write_str("\\\\")?,
                '\n' => f.write_str("\\n")?,
                c => f.write_char(c)?,
            }
        }
        f.write_char('\'')
    } else {
        f.write_str(name)
    }
}

/// Prints a term in canonical, re-parseable syntax. `name_var` decides how
/// variables are spelled.
pub(crate) fn write_term(
    f: &mut impl fmt::Write,
    t: &Term,
    name_var: &dyn Fn(&Var) -> String,
) -> fmt::Result {
    match t {
        Term::Var(v) => f.write_str(&name_var(v)),
        Term::Int(n) => write!(f, "{n}"),
        Term::Atom(a) => write_atom(f, a),
        Term::Compound(name, args) => {
            if let Some((items, tail)) = t.list_parts() {
                f.write_char('[')?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_char(',')?;
                    }
                    write_term(f, item, name_var)?;
                }
                if !matches!(tail, Term::Atom(a) if &**a == NIL) {
                    f.write_char('|')?;
                    write_term(f, tail, name_var)?;
                }
                return f.write_char(']');
            }
            write_atom(f, name)?;
            f.write_char('(')?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    f.write_char(',')?;
                }
                write_term(f, a, name_var)?;
            }
            f.write_char(')')
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self, &|v| v.name.to_string())
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Canonical text of a term (list sugar, quoted atoms where needed).
pub fn print_term(t: &Term) -> String {
    t.to_string()
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl Serialize for Var {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.name)
    }
}
