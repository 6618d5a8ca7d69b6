//! Static mode analyses and the plain-form transformation.
//!
//! Producing positions are the head's input positions and the body atoms'
//! output positions; every other argument position is consuming. Queries
//! are analysed as clauses with a dummy zero-arity head.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::oracle::unify;
use crate::syntax::{Atom, Builtin, Clause, ClauseRef, Mode, PredKey, Program, Query};
use crate::term::{Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModesError {
    #[error("missing mode declaration for {0}")]
    MissingMode(PredKey),
    #[error("program is not consistent:\n{0}")]
    InconsistentInput(AnalysisReport),
}

/// Which atom of a clause an argument position belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Locator {
    Head,
    /// 1-based index into the body.
    Body(usize),
}

/// An argument position; `arg` is 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position {
    pub atom: Locator,
    pub arg: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.atom {
            Locator::Head => write!(f, "head.{}", self.arg),
            Locator::Body(i) => write!(f, "body{}.{}", i, self.arg),
        }
    }
}

impl Serialize for Position {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PositionClassification {
    pub producing: Vec<Position>,
    pub consuming: Vec<Position>,
}

pub(crate) const QUERY_HEAD: &str = "?-";

fn modes_of(prog: &Program, atom: &Atom) -> Result<Vec<Mode>, ModesError> {
    if &*atom.pred == QUERY_HEAD && atom.args.is_empty() {
        return Ok(Vec::new());
    }
    prog.atom_modes(atom).ok_or_else(|| ModesError::MissingMode(atom.key()))
}

pub fn classify_positions(c: &Clause, prog: &Program) -> Result<PositionClassification, ModesError> {
    let mut out = PositionClassification::default();
    let mut visit = |loc: Locator, atom: &Atom, producing: Mode| -> Result<(), ModesError> {
        for (i, m) in modes_of(prog, atom)?.into_iter().enumerate() {
            let pos = Position { atom: loc, arg: i + 1 };
            if m == producing {
                out.producing.push(pos);
            } else {
                out.consuming.push(pos);
            }
        }
        Ok(())
    };
    visit(Locator::Head, &c.head, Mode::In)?;
    for (i, b) in c.body.iter().enumerate() {
        visit(Locator::Body(i + 1), b, Mode::Out)?;
    }
    Ok(out)
}

/// Clause or embedded query an analysis result refers to.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Origin {
    Clause(ClauseRef),
    /// 1-based index of an embedded query.
    Query(usize),
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Clause(c) => write!(f, "{c}"),
            Origin::Query(i) => write!(f, "query {i}"),
        }
    }
}

impl Serialize for Origin {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub origin: Origin,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub position: Option<Position>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variable: Option<String>,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.origin)?;
        if let Some(p) = &self.position {
            write!(f, " at {p}")?;
        }
        if let Some(v) = &self.variable {
            write!(f, " ({v})")?;
        }
        write!(f, ": {}", self.reason)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClauseVerdict {
    pub origin: Origin,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outputs_linear: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub head_input_linear: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Consistent,
    Plain,
    WellModed,
    SimplyModed,
}

impl fmt::Display for Analysis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Analysis::Consistent => "consistent",
            Analysis::Plain => "plain",
            Analysis::WellModed => "well-moded",
            Analysis::SimplyModed => "simply-moded",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub analysis: Analysis,
    pub holds: bool,
    pub clauses: Vec<ClauseVerdict>,
    pub violations: Vec<Violation>,
}

impl AnalysisReport {
    pub fn verdict(&self, origin: &Origin) -> Option<&ClauseVerdict> {
        self.clauses.iter().find(|c| &c.origin == origin)
    }
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.analysis, if self.holds { "yes" } else { "no" })?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

/// One analysed unit: a clause, or a query under a dummy head.
struct Unit {
    origin: Origin,
    clause: Clause,
}

fn query_clause(q: &Query) -> Clause {
    Clause { head: Atom::new(QUERY_HEAD, Vec::new()), body: q.atoms.clone() }
}

fn units(prog: &Program) -> Vec<Unit> {
    let mut out: Vec<Unit> = prog
        .all_clauses()
        .map(|(r, c)| Unit { origin: Origin::Clause(r), clause: c.clone() })
        .collect();
    out.extend(
        prog.queries
            .iter()
            .enumerate()
            .map(|(i, q)| Unit { origin: Origin::Query(i + 1), clause: query_clause(q) }),
    );
    out
}

type Args<'a> = Vec<(Position, &'a Term)>;

/// A clause's arguments split by mode, with their positions.
struct Split<'a> {
    head_in: Args<'a>,
    head_out: Args<'a>,
    /// per body atom: (inputs, outputs, is `=`)
    body: Vec<(Args<'a>, Args<'a>, bool)>,
}

fn split_atom<'a>(
    prog: &Program,
    loc: Locator,
    atom: &'a Atom,
) -> Result<(Args<'a>, Args<'a>), ModesError> {
    let mut ins = Vec::new();
    let mut outs = Vec::new();
    for (i, (m, t)) in modes_of(prog, atom)?.into_iter().zip(&atom.args).enumerate() {
        let pos = Position { atom: loc, arg: i + 1 };
        match m {
            Mode::In => ins.push((pos, t)),
            Mode::Out => outs.push((pos, t)),
        }
    }
    Ok((ins, outs))
}

fn split<'a>(prog: &Program, c: &'a Clause) -> Result<Split<'a>, ModesError> {
    let (head_in, head_out) = split_atom(prog, Locator::Head, &c.head)?;
    let mut body = Vec::new();
    for (i, b) in c.body.iter().enumerate() {
        let (ins, outs) = split_atom(prog, Locator::Body(i + 1), b)?;
        body.push((ins, outs, b.builtin() == Some(Builtin::Match)));
    }
    Ok(Split { head_in, head_out, body })
}

fn vars_of<'a>(terms: impl IntoIterator<Item = &'a (Position, &'a Term)>) -> Vec<(Position, &'a Var)> {
    let mut out = Vec::new();
    for (p, t) in terms {
        let mut occ = Vec::new();
        t.var_occurrences(&mut occ);
        out.extend(occ.into_iter().map(|v| (*p, v)));
    }
    out
}

fn violation(origin: &Origin, position: Option<Position>, var: Option<&Var>, reason: &str) -> Violation {
    Violation {
        origin: origin.clone(),
        position,
        variable: var.map(|v| v.name.to_string()),
        reason: reason.to_string(),
    }
}

type UnitCheck = fn(&Origin, &Split<'_>, &mut Vec<Violation>) -> (Option<bool>, Option<bool>);

fn checker(analysis: Analysis) -> UnitCheck {
    match analysis {
        Analysis::Consistent => consistent_unit,
        Analysis::Plain => plain_unit,
        Analysis::WellModed => well_moded_unit,
        Analysis::SimplyModed => simply_moded_unit,
    }
}

fn run_analysis(prog: &Program, analysis: Analysis) -> AnalysisReport {
    let check = checker(analysis);
    let mut clauses = Vec::new();
    let mut violations = Vec::new();
    for u in units(prog) {
        let mut vs = Vec::new();
        let (a, b) = match split(prog, &u.clause) {
            Ok(s) => check(&u.origin, &s, &mut vs),
            Err(e) => {
                vs.push(violation(&u.origin, None, None, &e.to_string()));
                (None, None)
            }
        };
        clauses.push(ClauseVerdict {
            origin: u.origin,
            holds: vs.is_empty(),
            outputs_linear: a,
            head_input_linear: b,
        });
        violations.extend(vs);
    }
    AnalysisReport { analysis, holds: violations.is_empty(), clauses, violations }
}

/// Violations of `analysis` for a goal read as a query.
pub fn query_violations(prog: &Program, analysis: Analysis, goal: &[Atom]) -> Result<Vec<Violation>, ModesError> {
    let c = Clause { head: Atom::new(QUERY_HEAD, Vec::new()), body: goal.to_vec() };
    let s = split(prog, &c)?;
    let mut vs = Vec::new();
    checker(analysis)(&Origin::Query(0), &s, &mut vs);
    Ok(vs)
}

/// Every variable occurs in at least one producing position.
pub fn check_consistent(prog: &Program) -> AnalysisReport {
    run_analysis(prog, Analysis::Consistent)
}

fn consistent_unit(origin: &Origin, s: &Split<'_>, vs: &mut Vec<Violation>) -> (Option<bool>, Option<bool>) {
    {
        let mut produced: HashSet<&Var> = vars_of(&s.head_in).into_iter().map(|(_, v)| v).collect();
        for (_, outs, _) in &s.body {
            produced.extend(vars_of(outs).into_iter().map(|(_, v)| v));
        }
        let mut consuming = vars_of(&s.head_out);
        for (ins, _, _) in &s.body {
            consuming.extend(vars_of(ins));
        }
        let mut reported = HashSet::new();
        for (p, v) in consuming {
            if !produced.contains(v) && reported.insert(v) {
                vs.push(violation(origin, Some(p), Some(v), "occurs only in consuming positions"));
            }
        }
        (None, None)
    }
}

/// Plain: body outputs are a linear family of variables, none of which
/// also fills a head input position, and the head inputs are linear. The
/// output of a `=` goal is a pattern and may be any linear term.
pub fn check_plain(prog: &Program) -> AnalysisReport {
    run_analysis(prog, Analysis::Plain)
}

fn plain_unit(origin: &Origin, s: &Split<'_>, vs: &mut Vec<Violation>) -> (Option<bool>, Option<bool>) {
    {
        let before = vs.len();
        let head_vars: HashSet<&Var> = vars_of(&s.head_in).into_iter().map(|(_, v)| v).collect();
        let mut seen: HashSet<&Var> = HashSet::new();
        for (_, outs, is_match) in &s.body {
            for (p, t) in outs {
                if !is_match && !t.is_var() {
                    vs.push(violation(origin, Some(*p), None, &format!("output {t} is not a variable")));
                }
            }
            for (p, v) in vars_of(outs) {
                if head_vars.contains(v) {
                    vs.push(violation(origin, Some(p), Some(v), "output variable also fills a head input"));
                } else if !seen.insert(v) {
                    vs.push(violation(origin, Some(p), Some(v), "output variable is repeated"));
                }
            }
        }
        let outputs_linear = vs.len() == before;
        let mid = vs.len();
        let mut seen_in = HashSet::new();
        for (p, v) in vars_of(&s.head_in) {
            if !seen_in.insert(v) {
                vs.push(violation(origin, Some(p), Some(v), "head input variable is repeated"));
            }
        }
        (Some(outputs_linear), Some(vs.len() == mid))
    }
}

/// Every input variable of a body atom (and of the head outputs) is produced
/// by the head inputs or an earlier body output.
pub fn check_well_moded(prog: &Program) -> AnalysisReport {
    run_analysis(prog, Analysis::WellModed)
}

fn well_moded_unit(origin: &Origin, s: &Split<'_>, vs: &mut Vec<Violation>) -> (Option<bool>, Option<bool>) {
    {
        let mut produced: HashSet<&Var> = vars_of(&s.head_in).into_iter().map(|(_, v)| v).collect();
        for (ins, outs, _) in &s.body {
            let mut reported = HashSet::new();
            for (p, v) in vars_of(ins) {
                if !produced.contains(v) && reported.insert(v) {
                    vs.push(violation(origin, Some(p), Some(v), "input not produced to its left"));
                }
            }
            produced.extend(vars_of(outs).into_iter().map(|(_, v)| v));
        }
        let mut reported = HashSet::new();
        for (p, v) in vars_of(&s.head_out) {
            if !produced.contains(v) && reported.insert(v) {
                vs.push(violation(origin, Some(p), Some(v), "head output not produced by the body"));
            }
        }
        (None, None)
    }
}

/// Body outputs are distinct variables that occur neither in the head inputs
/// nor in the inputs of the same or an earlier body atom.
pub fn check_simply_moded(prog: &Program) -> AnalysisReport {
    run_analysis(prog, Analysis::SimplyModed)
}

fn simply_moded_unit(origin: &Origin, s: &Split<'_>, vs: &mut Vec<Violation>) -> (Option<bool>, Option<bool>) {
    {
        let mut inputs: HashSet<&Var> = vars_of(&s.head_in).into_iter().map(|(_, v)| v).collect();
        let mut outputs: HashSet<&Var> = HashSet::new();
        for (ins, outs, is_match) in &s.body {
            inputs.extend(vars_of(ins).into_iter().map(|(_, v)| v));
            for (p, t) in outs {
                if !is_match && !t.is_var() {
                    vs.push(violation(origin, Some(*p), None, &format!("output {t} is not a variable")));
                }
            }
            for (p, v) in vars_of(outs) {
                if inputs.contains(v) {
                    vs.push(violation(origin, Some(p), Some(v), "output variable occurs in an input to its left"));
                } else if !outputs.insert(v) {
                    vs.push(violation(origin, Some(p), Some(v), "output variable is repeated"));
                }
            }
        }
        (None, None)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Discrimination {
    Yes,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UndecidedPair {
    pub pred: PredKey,
    pub first: usize,
    pub second: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StaticDiscrimination {
    pub verdict: Discrimination,
    pub undecided: Vec<UndecidedPair>,
}

fn complementary(a: Builtin, b: Builtin) -> bool {
    use Builtin::*;
    matches!((a, b), (Eq, Neq) | (Neq, Eq) | (Lt, Ge) | (Ge, Lt) | (Gt, Le) | (Le, Gt))
}

fn complementary_swapped(a: Builtin, b: Builtin) -> bool {
    use Builtin::*;
    matches!((a, b), (Eq, Neq) | (Neq, Eq) | (Lt, Le) | (Le, Lt) | (Gt, Ge) | (Ge, Gt))
}

fn offset_vars(c: &Clause, by: u32) -> Clause {
    let mut f = |v: &Var| Term::Var(Var::new(v.name.clone(), v.id + by));
    Clause { head: c.head.map_vars(&mut f), body: c.body.iter().map(|b| b.map_vars(&mut f)).collect() }
}

fn input_tuple(prog: &Program, atom: &Atom) -> Term {
    let ins = prog.split_args(atom).map(|(i, _)| i).unwrap_or_default();
    Term::Compound("in".into(), ins.into_iter().cloned().collect())
}

fn clauses_discriminated(prog: &Program, a: &Clause, b: &Clause) -> bool {
    let b = offset_vars(b, a.max_var_id().map_or(0, |m| m + 1));
    let Some(mgu) = unify(&input_tuple(prog, &a.head), &input_tuple(prog, &b.head)) else {
        return true;
    };
    let tests = |c: &Clause| -> Vec<(Builtin, Term, Term)> {
        c.body
            .iter()
            .filter_map(|g| match g.builtin() {
                Some(Builtin::Match) | None => None,
                Some(op) => Some((op, mgu.apply(&g.args[0]), mgu.apply(&g.args[1]))),
            })
            .collect()
    };
    let (ta, tb) = (tests(a), tests(&b));
    ta.iter().any(|(oa, la, ra)| {
        tb.iter().any(|(ob, lb, rb)| {
            (complementary(*oa, *ob) && la == lb && ra == rb)
                || (complementary_swapped(*oa, *ob) && la == rb && ra == lb)
        })
    })
}

/// Sufficient syntactic check that at most one clause's tests can succeed
/// for any ground input tuple.
pub fn check_input_discriminative_static(prog: &Program) -> StaticDiscrimination {
    let mut undecided = Vec::new();
    for (key, cs) in &prog.predicates {
        for i in 0..cs.len() {
            for j in i + 1..cs.len() {
                if !clauses_discriminated(prog, &cs[i], &cs[j]) {
                    undecided.push(UndecidedPair { pred: key.clone(), first: i + 1, second: j + 1 });
                }
            }
        }
    }
    let verdict = if undecided.is_empty() { Discrimination::Yes } else { Discrimination::Unknown };
    StaticDiscrimination { verdict, undecided }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProgramReport {
    pub consistent: AnalysisReport,
    pub plain: AnalysisReport,
    pub well_moded: AnalysisReport,
    pub simply_moded: AnalysisReport,
    pub input_discriminative: StaticDiscrimination,
    pub warnings: Vec<String>,
}

impl ProgramReport {
    pub fn translatable(&self) -> bool {
        self.consistent.holds && self.plain.holds
    }
}

impl fmt::Display for ProgramReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in [&self.consistent, &self.plain, &self.well_moded, &self.simply_moded] {
            write!(f, "{r}")?;
        }
        let d = &self.input_discriminative;
        writeln!(f, "input-discriminative (static): {:?}", d.verdict)?;
        for p in &d.undecided {
            writeln!(f, "  {}: clauses {} and {} undecided", p.pred, p.first, p.second)?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

pub fn analyze(prog: &Program) -> ProgramReport {
    ProgramReport {
        consistent: check_consistent(prog),
        plain: check_plain(prog),
        well_moded: check_well_moded(prog),
        simply_moded: check_simply_moded(prog),
        input_discriminative: check_input_discriminative_static(prog),
        warnings: prog.warnings.clone(),
    }
}

// ---------------------------------------------------------------------------
// Plain-form transformation

struct Fresh {
    names: HashSet<String>,
    next_id: u32,
}

impl Fresh {
    fn for_clause(c: &Clause) -> Self {
        let mut occ = Vec::new();
        c.head.var_occurrences(&mut occ);
        for b in &c.body {
            b.var_occurrences(&mut occ);
        }
        Fresh {
            names: occ.iter().map(|v| v.name.to_string()).collect(),
            next_id: occ.iter().map(|v| v.id + 1).max().unwrap_or(0),
        }
    }

    fn var(&mut self, base: &str) -> Var {
        let base = base.trim_end_matches('\'');
        let base = if base.starts_with('_') || base.is_empty() { "V" } else { base };
        let name = (1..)
            .map(|n| format!("{base}{n}"))
            .find(|n| !self.names.contains(n))
            .expect("unbounded counter");
        self.names.insert(name.clone());
        let v = Var::new(name, self.next_id);
        self.next_id += 1;
        v
    }
}

fn eq_goal(a: &Var, b: &Var) -> Atom {
    Atom::new(Builtin::Eq.symbol(), vec![Term::Var(a.clone()), Term::Var(b.clone())])
}

/// Replaces occurrences of variables already in `produced` (or repeated
/// within `t`) by fresh variables; returns the rewritten term and the
/// `==` goals linking each fresh variable to its original.
fn linearize(t: &Term, produced: &mut HashSet<Var>, fresh: &mut Fresh, eqs: &mut Vec<Atom>) -> Term {
    t.map_vars(&mut |v| {
        if produced.insert(v.clone()) {
            Term::Var(v.clone())
        } else {
            let f = fresh.var(&v.name);
            eqs.push(eq_goal(v, &f));
            produced.insert(f.clone());
            Term::Var(f)
        }
    })
}

fn plain_clause(prog: &Program, c: &Clause) -> Result<Clause, ModesError> {
    let mut fresh = Fresh::for_clause(c);
    let mut produced: HashSet<Var> = HashSet::new();

    let head_modes = modes_of(prog, &c.head)?;
    let mut head_eqs = Vec::new();
    let head_args: Vec<Term> = c
        .head
        .args
        .iter()
        .zip(&head_modes)
        .map(|(t, m)| match m {
            Mode::In => linearize(t, &mut produced, &mut fresh, &mut head_eqs),
            Mode::Out => t.clone(),
        })
        .collect();

    let mut body = head_eqs;
    for atom in &c.body {
        let modes = modes_of(prog, atom)?;
        let is_match = atom.builtin() == Some(Builtin::Match);
        let mut after = Vec::new();
        let mut args = Vec::with_capacity(atom.args.len());
        for (t, m) in atom.args.iter().zip(&modes) {
            if *m == Mode::In {
                args.push(t.clone());
                continue;
            }
            match t {
                Term::Var(_) => args.push(linearize(t, &mut produced, &mut fresh, &mut after)),
                _ if is_match => args.push(linearize(t, &mut produced, &mut fresh, &mut after)),
                _ => {
                    let out = fresh.var("Out");
                    produced.insert(out.clone());
                    let mut eqs = Vec::new();
                    let pattern = linearize(t, &mut produced, &mut fresh, &mut eqs);
                    after.push(Atom::new(Builtin::Match.symbol(), vec![pattern, Term::Var(out.clone())]));
                    after.extend(eqs);
                    args.push(Term::Var(out));
                }
            }
        }
        body.push(Atom { pred: atom.pred.clone(), args });
        body.extend(after);
    }
    Ok(Clause { head: Atom { pred: c.head.pred.clone(), args: head_args }, body })
}

/// Rewrites a consistent program into an equivalent plain one. Plain input
/// comes back unchanged.
pub fn make_plain(prog: &Program) -> Result<Program, ModesError> {
    let consistent = check_consistent(prog);
    if !consistent.holds {
        return Err(ModesError::InconsistentInput(consistent));
    }
    let mut out = prog.clone();
    for cs in out.predicates.values_mut() {
        for c in cs.iter_mut() {
            *c = plain_clause(prog, c)?;
        }
    }
    for q in out.queries.iter_mut() {
        let c = plain_clause(prog, &query_clause(q))?;
        *q = Query::from_atoms(c.body);
    }
    Ok(out)
}
