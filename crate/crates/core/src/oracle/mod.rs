//! Reference semantics: unification, LD-resolution and runtime monitors.

mod monitor;
mod solve;

use std::collections::BTreeMap;

use crate::syntax::{Atom, Clause};
use crate::term::{Term, Var};

pub use monitor::*;
pub use solve::*;

/// An idempotent substitution: no bound variable occurs in any binding.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<Var, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, Term)>) -> Self {
        Substitution { map: pairs.into_iter().collect() }
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.map.get(v)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.map.iter()
    }

    pub fn apply(&self, t: &Term) -> Term {
        if self.map.is_empty() {
            return t.clone();
        }
        t.map_vars(&mut |v| self.map.get(v).cloned().unwrap_or_else(|| Term::Var(v.clone())))
    }

    pub fn apply_atom(&self, a: &Atom) -> Atom {
        Atom { pred: a.pred.clone(), args: a.args.iter().map(|t| self.apply(t)).collect() }
    }

    /// `self` followed by `other`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut map: BTreeMap<Var, Term> = self.map.iter().map(|(v, t)| (v.clone(), other.apply(t))).collect();
        for (v, t) in &other.map {
            map.entry(v.clone()).or_insert_with(|| t.clone());
        }
        map.retain(|v, t| t.as_var() != Some(v));
        Substitution { map }
    }

    pub fn restrict<'a>(&self, vars: impl IntoIterator<Item = &'a Var>) -> Substitution {
        Substitution {
            map: vars
                .into_iter()
                .filter_map(|v| self.map.get(v).map(|t| (v.clone(), t.clone())))
                .collect(),
        }
    }

    pub fn is_idempotent(&self) -> bool {
        self.map.values().all(|t| self.map.keys().all(|v| !t.occurs(v)))
    }

    /// Binds an unbound `v` to `t`, where `t` already has `self` applied.
    fn bind(&mut self, v: Var, t: Term) {
        let single = Substitution { map: BTreeMap::from([(v.clone(), t.clone())]) };
        for r in self.map.values_mut() {
            *r = single.apply(r);
        }
        self.map.insert(v, t);
    }
}

/// Most general unifier with the occurs check.
pub fn unify(a: &Term, b: &Term) -> Option<Substitution> {
    unify_with(a, b, true)
}

/// Most general unifier; without the occurs check a cyclic binding is
/// accepted and the result is no longer idempotent.
pub fn unify_with(a: &Term, b: &Term, occurs_check: bool) -> Option<Substitution> {
    let mut s = Substitution::new();
    unify_into(&mut s, a, b, occurs_check).then_some(s)
}

pub(crate) fn unify_into(s: &mut Substitution, a: &Term, b: &Term, occurs_check: bool) -> bool {
    let mut stack = vec![(a.clone(), b.clone())];
    while let Some((x, y)) = stack.pop() {
        let x = deref(s, x);
        let y = deref(s, y);
        match (x, y) {
            (Term::Var(a), Term::Var(b)) if a == b => {}
            (Term::Var(v), t) | (t, Term::Var(v)) => {
                let t = s.apply(&t);
                if occurs_check && t.occurs(&v) {
                    return false;
                }
                s.bind(v, t);
            }
            (Term::Int(a), Term::Int(b)) => {
                if a != b {
                    return false;
                }
            }
            (Term::Atom(a), Term::Atom(b)) => {
                if a != b {
                    return false;
                }
            }
            (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return false;
                }
                stack.extend(xs.into_iter().zip(ys));
            }
            _ => return false,
        }
    }
    true
}

fn deref(s: &Substitution, t: Term) -> Term {
    match &t {
        Term::Var(v) => s.get(v).cloned().unwrap_or(t),
        _ => t,
    }
}

fn atom_term(a: &Atom) -> Term {
    Term::Compound(a.pred.clone(), a.args.clone())
}

pub fn unify_atoms(a: &Atom, b: &Atom, occurs_check: bool) -> Option<Substitution> {
    if a.pred != b.pred || a.args.len() != b.args.len() {
        return None;
    }
    unify_with(&atom_term(a), &atom_term(b), occurs_check)
}

/// One-way matching: finds `σ` with `pattern σ = target`, binding only
/// variables of `pattern`.
pub fn match_term(pattern: &Term, target: &Term) -> Option<Substitution> {
    let mut map: BTreeMap<Var, Term> = BTreeMap::new();
    let mut stack = vec![(pattern, target)];
    while let Some((p, t)) = stack.pop() {
        match (p, t) {
            (Term::Var(v), _) => match map.get(v) {
                Some(bound) if bound != t => return None,
                Some(_) => {}
                None => {
                    map.insert(v.clone(), t.clone());
                }
            },
            (Term::Int(a), Term::Int(b)) if a == b => {}
            (Term::Atom(a), Term::Atom(b)) if a == b => {}
            (Term::Compound(f, xs), Term::Compound(g, ys)) if f == g && xs.len() == ys.len() => {
                stack.extend(xs.iter().zip(ys));
            }
            _ => return None,
        }
    }
    Some(Substitution { map })
}

/// Renames a clause apart by shifting every variable id by `offset`.
pub fn rename_clause(c: &Clause, offset: u32) -> Clause {
    let mut f = |v: &Var| Term::Var(Var::new(v.name.clone(), v.id + offset));
    Clause { head: c.head.map_vars(&mut f), body: c.body.iter().map(|b| b.map_vars(&mut f)).collect() }
}

/// One LD step: resolves the leftmost atom of `query` with a clause that is
/// already variable-disjoint from it.
pub fn resolve_step(query: &[Atom], clause: &Clause) -> Option<(Vec<Atom>, Substitution)> {
    let (first, rest) = query.split_first()?;
    let mgu = unify_atoms(first, &clause.head, true)?;
    let resolvent = clause.body.iter().chain(rest).map(|a| mgu.apply_atom(a)).collect();
    Some((resolvent, mgu))
}
