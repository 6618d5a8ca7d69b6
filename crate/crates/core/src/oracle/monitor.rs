//! Runtime assertions over LD derivations.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::{match_term, rename_clause, unify_atoms, Substitution};
use super::solve::{ld_solve_with, DerivationLimits, LimitKind, SearchObserver, SearchReport, SolveOptions};
use crate::modes::{check_simply_moded, check_well_moded, query_violations, Analysis};
use crate::syntax::{Atom, Clause, Kind, PredKey, Program, Query};
use crate::term::{Term, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MonitorKind {
    Groundness,
    DoubleMatching,
    InputDiscriminative,
    PartitionCorrectness,
    Persistence,
}

impl MonitorKind {
    pub const ALL: [MonitorKind; 5] = [
        MonitorKind::Groundness,
        MonitorKind::DoubleMatching,
        MonitorKind::InputDiscriminative,
        MonitorKind::PartitionCorrectness,
        MonitorKind::Persistence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MonitorKind::Groundness => "groundness",
            MonitorKind::DoubleMatching => "double-matching",
            MonitorKind::InputDiscriminative => "input-discriminative",
            MonitorKind::PartitionCorrectness => "partition-correctness",
            MonitorKind::Persistence => "persistence",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s || format!("{m:?}").eq_ignore_ascii_case(s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonitorError {
    #[error("{monitor} monitor needs a {requirement} program and query")]
    Precondition { monitor: &'static str, requirement: &'static str },
}

/// Two clauses whose tests both succeed on the same ground input tuple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub pred: PredKey,
    pub inputs: Vec<Term>,
    pub clauses: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchSummary {
    pub answers: usize,
    pub exhausted: bool,
    pub limit_hit: Option<LimitKind>,
    pub floundered: Option<String>,
    pub steps: u64,
}

impl From<&SearchReport> for SearchSummary {
    fn from(r: &SearchReport) -> Self {
        SearchSummary {
            answers: r.answers.len(),
            exhausted: r.exhausted,
            limit_hit: r.limit_hit,
            floundered: r.floundered.clone().or_else(|| r.type_error.clone()),
            steps: r.steps,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonitorReport {
    pub monitor: MonitorKind,
    /// Number of events the monitor inspected.
    pub checks: u64,
    pub violations: Vec<String>,
    /// Checks that ran out of search budget.
    pub inconclusive: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<Witness>,
    /// Selections skipped because their inputs were not ground.
    #[serde(skip_serializing_if = "is_zero")]
    pub skipped: u64,
    pub search: SearchSummary,
}

fn is_zero(n: &u64) -> bool {
    *n == 0
}

impl MonitorReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.witnesses.is_empty()
    }

    /// Human verdict for the input-discriminative monitor.
    pub fn discrimination_verdict(&self) -> &'static str {
        match (self.witnesses.is_empty(), self.search.exhausted) {
            (false, _) => "violation",
            (true, true) => "discriminative-on-run",
            (true, false) => "discriminative-on-run (bounded)",
        }
    }
}

impl fmt::Display for MonitorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.monitor == MonitorKind::InputDiscriminative {
            self.discrimination_verdict()
        } else if self.passed() {
            "ok"
        } else {
            "violated"
        };
        writeln!(f, "{}: {} ({} checks)", self.monitor.name(), status, self.checks)?;
        for v in &self.violations {
            writeln!(f, "  violation: {v}")?;
        }
        for w in &self.witnesses {
            let ins: Vec<String> = w.inputs.iter().map(Term::to_string).collect();
            writeln!(
                f,
                "  witness: {} on ({}) clauses {} and {}",
                w.pred,
                ins.join(","),
                w.clauses.0,
                w.clauses.1
            )?;
        }
        for i in &self.inconclusive {
            writeln!(f, "  inconclusive: {i}")?;
        }
        if self.skipped > 0 {
            writeln!(f, "  skipped {} non-ground selections", self.skipped)?;
        }
        writeln!(f, "  answers: {}", self.search.answers)
    }
}

fn with_query(p: &Program, q: &Query) -> Program {
    Program {
        predicates: p.predicates.clone(),
        modes: p.modes.clone(),
        partition: p.partition.clone(),
        queries: vec![q.clone()],
        delays: Vec::new(),
        warnings: Vec::new(),
    }
}

fn require(
    p: &Program,
    q: &Query,
    monitor: MonitorKind,
    simply: bool,
) -> Result<(), MonitorError> {
    let both = with_query(p, q);
    if !check_well_moded(&both).holds {
        return Err(MonitorError::Precondition { monitor: monitor.name(), requirement: "well-moded" });
    }
    if simply && !check_simply_moded(&both).holds {
        return Err(MonitorError::Precondition {
            monitor: monitor.name(),
            requirement: "well-moded and simply-moded",
        });
    }
    Ok(())
}

fn finish(monitor: MonitorKind, report: &SearchReport) -> MonitorReport {
    MonitorReport {
        monitor,
        checks: 0,
        violations: Vec::new(),
        inconclusive: Vec::new(),
        witnesses: Vec::new(),
        skipped: 0,
        search: report.into(),
    }
}

fn input_terms(p: &Program, a: &Atom) -> Vec<Term> {
    p.split_args(a).map(|(i, _)| i.into_iter().cloned().collect()).unwrap_or_default()
}

fn output_terms(p: &Program, a: &Atom) -> Vec<Term> {
    p.split_args(a).map(|(_, o)| o.into_iter().cloned().collect()).unwrap_or_default()
}

fn tuple(ts: Vec<Term>) -> Term {
    Term::Compound("t".into(), ts)
}

// --- groundness ------------------------------------------------------------

struct Groundness<'p> {
    p: &'p Program,
    checks: u64,
    violations: Vec<String>,
}

impl SearchObserver for Groundness<'_> {
    fn on_select(&mut self, goal: &[Atom]) {
        let a = &goal[0];
        self.checks += 1;
        if !input_terms(self.p, a).iter().all(Term::is_ground) {
            self.violations.push(format!("selected {a} with non-ground inputs"));
        }
    }
}

/// Checks that every selected atom is ground in its input positions.
pub fn monitor_groundness(p: &Program, q: &Query, opts: &SolveOptions) -> Result<MonitorReport, MonitorError> {
    require(p, q, MonitorKind::Groundness, false)?;
    Ok(monitor_groundness_unchecked(p, q, opts))
}

/// The groundness monitor without its well-modedness precondition; used to
/// observe what goes wrong on mis-moded programs.
pub fn monitor_groundness_unchecked(p: &Program, q: &Query, opts: &SolveOptions) -> MonitorReport {
    let mut obs = Groundness { p, checks: 0, violations: Vec::new() };
    let report = ld_solve_with(p, q, opts, &mut obs);
    let mut out = finish(MonitorKind::Groundness, &report);
    out.checks = obs.checks;
    out.violations = obs.violations;
    out
}

// --- double matching -------------------------------------------------------

/// Checks whether `a` and `b` are equal up to a consistent renaming of
/// variables.
pub fn is_variant(a: &Term, b: &Term) -> bool {
    fn go(a: &Term, b: &Term, fwd: &mut HashMap<Var, Var>, back: &mut HashMap<Var, Var>) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => {
                let f = fwd.entry(x.clone()).or_insert_with(|| y.clone()).clone();
                let g = back.entry(y.clone()).or_insert_with(|| x.clone()).clone();
                &f == y && &g == x
            }
            (Term::Int(x), Term::Int(y)) => x == y,
            (Term::Atom(x), Term::Atom(y)) => x == y,
            (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| go(x, y, fwd, back))
            }
            _ => false,
        }
    }
    go(a, b, &mut HashMap::new(), &mut HashMap::new())
}

struct DoubleMatching<'p> {
    p: &'p Program,
    checks: u64,
    violations: Vec<String>,
}

impl SearchObserver for DoubleMatching<'_> {
    fn on_resolve(&mut self, goal: &[Atom], clause: &Clause, mgu: &Substitution, _resolvent: &[Atom]) {
        let a = &goal[0];
        let h = &clause.head;
        self.checks += 1;
        let Some(s1) = match_term(&tuple(input_terms(self.p, h)), &tuple(input_terms(self.p, a))) else {
            self.violations.push(format!("{h} inputs do not match {a}"));
            return;
        };
        let h_out = s1.apply(&tuple(output_terms(self.p, h)));
        let Some(s2) = match_term(&tuple(output_terms(self.p, a)), &h_out) else {
            self.violations.push(format!("outputs of {a} do not match {h_out}"));
            return;
        };
        let sigma = Substitution::from_pairs(
            s1.iter().chain(s2.iter()).map(|(v, t)| (v.clone(), t.clone())),
        );
        let both = Term::Compound("pair".into(), vec![atom_term(a), atom_term(h)]);
        let via_matching = sigma.apply(&both);
        let via_mgu = mgu.apply(&both);
        let unified = sigma.apply(&atom_term(a)) == sigma.apply(&atom_term(h));
        if !unified || !is_variant(&via_matching, &via_mgu) {
            self.violations.push(format!(
                "double matching of {a} with {h} gives {via_matching}, mgu gives {via_mgu}"
            ));
        }
    }
}

fn atom_term(a: &Atom) -> Term {
    Term::Compound(a.pred.clone(), a.args.clone())
}

/// Checks at each resolution step that two one-way matches reproduce the mgu.
pub fn monitor_double_matching(
    p: &Program,
    q: &Query,
    opts: &SolveOptions,
) -> Result<MonitorReport, MonitorError> {
    require(p, q, MonitorKind::DoubleMatching, true)?;
    let mut obs = DoubleMatching { p, checks: 0, violations: Vec::new() };
    let report = ld_solve_with(p, q, opts, &mut obs);
    let mut out = finish(MonitorKind::DoubleMatching, &report);
    out.checks = obs.checks;
    out.violations = obs.violations;
    Ok(out)
}

// --- input discriminative --------------------------------------------------

struct Discriminative<'p> {
    p: &'p Program,
    side: SolveOptions,
    seen: HashSet<String>,
    checks: u64,
    skipped: u64,
    witnesses: Vec<Witness>,
    inconclusive: Vec<String>,
}

impl Discriminative<'_> {
    /// Whether clause `c` can get through its tests when called with `a`:
    /// `Some(true)` yes, `Some(false)` no, `None` undecided within limits.
    fn tests_pass(&self, a: &Atom, c: &Clause) -> Option<bool> {
        let offset = a.args.iter().flat_map(|t| t.vars()).map(|v| v.id + 1).max().unwrap_or(0);
        let renamed = rename_clause(c, offset);
        let Some(mgu) = unify_atoms(a, &renamed.head, true) else {
            return Some(false);
        };
        let last_test = renamed.body.iter().rposition(|b| self.p.kind(&b.key()) == Kind::Test);
        let Some(last) = last_test else {
            return Some(true);
        };
        let prefix: Vec<Atom> = renamed.body[..=last].iter().map(|b| mgu.apply_atom(b)).collect();
        let r = ld_solve_with(self.p, &Query::from_atoms(prefix), &self.side, &mut ());
        if !r.answers.is_empty() {
            Some(true)
        } else if r.exhausted {
            Some(false)
        } else {
            None
        }
    }
}

impl SearchObserver for Discriminative<'_> {
    fn on_select(&mut self, goal: &[Atom]) {
        let a = &goal[0];
        if a.builtin().is_some() {
            return;
        }
        let inputs = input_terms(self.p, a);
        if !inputs.iter().all(Term::is_ground) {
            self.skipped += 1;
            return;
        }
        let key = format!("{}{:?}", a.key(), inputs.iter().map(Term::to_string).collect::<Vec<_>>());
        if !self.seen.insert(key) {
            return;
        }
        self.checks += 1;
        let clauses = self.p.clauses(&a.key());
        let mut passing = Vec::new();
        for (i, c) in clauses.iter().enumerate() {
            match self.tests_pass(a, c) {
                Some(true) => passing.push(i + 1),
                Some(false) => {}
                None => self.inconclusive.push(format!("{a} clause {}", i + 1)),
            }
        }
        if passing.len() >= 2 {
            self.witnesses.push(Witness { pred: a.key(), inputs, clauses: (passing[0], passing[1]) });
        }
    }
}

/// Looks for ground calls on which two clauses both pass their tests.
pub fn monitor_input_discriminative(p: &Program, q: &Query, opts: &SolveOptions) -> MonitorReport {
    let side = SolveOptions {
        limits: DerivationLimits { max_answers: 1, ..opts.limits },
        occurs_check: opts.occurs_check,
    };
    let mut obs = Discriminative {
        p,
        side,
        seen: HashSet::new(),
        checks: 0,
        skipped: 0,
        witnesses: Vec::new(),
        inconclusive: Vec::new(),
    };
    let report = ld_solve_with(p, q, opts, &mut obs);
    let mut out = finish(MonitorKind::InputDiscriminative, &report);
    out.checks = obs.checks;
    out.skipped = obs.skipped;
    out.witnesses = obs.witnesses;
    out.inconclusive = obs.inconclusive;
    out
}

// --- partition correctness -------------------------------------------------

struct PartitionCheck<'p> {
    p: &'p Program,
    side: SolveOptions,
    seen: BTreeMap<String, ()>,
    checks: u64,
    violations: Vec<String>,
    inconclusive: Vec<String>,
}

impl SearchObserver for PartitionCheck<'_> {
    fn on_select(&mut self, goal: &[Atom]) {
        let a = &goal[0];
        if a.builtin().is_some() || self.p.kind(&a.key()) != Kind::NonTest {
            return;
        }
        if self.seen.insert(a.to_string(), ()).is_some() {
            return;
        }
        self.checks += 1;
        let r = ld_solve_with(self.p, &Query::from_atoms(vec![a.clone()]), &self.side, &mut ());
        if r.answers.is_empty() {
            if r.exhausted {
                self.violations.push(format!("non-test {a} has no successful derivation"));
            } else {
                self.inconclusive.push(a.to_string());
            }
        }
    }
}

/// Checks that every selected non-test atom has at least one success.
pub fn monitor_partition_correctness(p: &Program, q: &Query, opts: &SolveOptions) -> MonitorReport {
    let side = SolveOptions {
        limits: DerivationLimits {
            max_answers: 1,
            max_depth: opts.limits.max_depth.saturating_mul(10),
            ..opts.limits
        },
        occurs_check: opts.occurs_check,
    };
    let mut obs = PartitionCheck {
        p,
        side,
        seen: BTreeMap::new(),
        checks: 0,
        violations: Vec::new(),
        inconclusive: Vec::new(),
    };
    let report = ld_solve_with(p, q, opts, &mut obs);
    let mut out = finish(MonitorKind::PartitionCorrectness, &report);
    out.checks = obs.checks;
    out.violations = obs.violations;
    out.inconclusive = obs.inconclusive;
    out
}

// --- persistence -----------------------------------------------------------

struct Persistence<'p> {
    p: &'p Program,
    simply: bool,
    checks: u64,
    violations: Vec<String>,
}

impl SearchObserver for Persistence<'_> {
    fn on_resolve(&mut self, _goal: &[Atom], _clause: &Clause, _mgu: &Substitution, resolvent: &[Atom]) {
        self.checks += 1;
        let mut analyses = vec![Analysis::WellModed];
        if self.simply {
            analyses.push(Analysis::SimplyModed);
        }
        for an in analyses {
            match query_violations(self.p, an, resolvent) {
                Ok(vs) if vs.is_empty() => {}
                Ok(vs) => self.violations.push(format!(
                    "resolvent {} is not {an}: {}",
                    Query::from_atoms(resolvent.to_vec()),
                    vs[0].reason
                )),
                Err(e) => self.violations.push(e.to_string()),
            }
        }
    }
}

/// Re-checks well-modedness (and simple-modedness when the program and query
/// have it) on every resolvent.
pub fn monitor_persistence(p: &Program, q: &Query, opts: &SolveOptions) -> Result<MonitorReport, MonitorError> {
    require(p, q, MonitorKind::Persistence, false)?;
    let simply = check_simply_moded(&with_query(p, q)).holds;
    let mut obs = Persistence { p, simply, checks: 0, violations: Vec::new() };
    let report = ld_solve_with(p, q, opts, &mut obs);
    let mut out = finish(MonitorKind::Persistence, &report);
    out.checks = obs.checks;
    out.violations = obs.violations;
    Ok(out)
}

/// Runs one monitor by kind.
pub fn run_monitor(
    kind: MonitorKind,
    p: &Program,
    q: &Query,
    opts: &SolveOptions,
) -> Result<MonitorReport, MonitorError> {
    match kind {
        MonitorKind::Groundness => monitor_groundness(p, q, opts),
        MonitorKind::DoubleMatching => monitor_double_matching(p, q, opts),
        MonitorKind::InputDiscriminative => Ok(monitor_input_discriminative(p, q, opts)),
        MonitorKind::PartitionCorrectness => Ok(monitor_partition_correctness(p, q, opts)),
        MonitorKind::Persistence => monitor_persistence(p, q, opts),
    }
}
