mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use lazylp::compare::{compare_query, parse_queries, CompareSession};
use lazylp::modes::{
    check_consistent, check_input_discriminative_static, check_plain, check_simply_moded, check_well_moded,
    query_violations, Analysis, AnalysisReport, Origin,
};
use lazylp::oracle::{
    ld_solve_with, monitor_double_matching, monitor_groundness, monitor_persistence, MonitorError, MonitorReport,
    SolveOptions,
};
use lazylp::syntax::{Program, Query};
use lazylp::{emit_haskell, make_plain, parse_query, print_program, run_with_stats, translate, unify};
use lazylp::{DerivationLimits, EvalError, Outcome, Term, Verdict};
use rand::seq::SliceRandom;
use rand::Rng;

const C1_LIMIT: Duration = Duration::from_secs(1);
const C3_LIMIT: Duration = Duration::from_secs(30);
const C3_MIN_QUERIES: usize = 200;
const C4_BUDGET: u64 = 1_000_000;
const C5_RATIO: (f64, f64) = (1.6, 2.4);
const C5_SIZES: [usize; 3] = [250, 500, 1000];
const C6_LIMIT: Duration = Duration::from_secs(60);
const C6_RANDOM_PROGRAMS: usize = 100;
const C8_PAIRS: usize = 1000;
const C8_DEPTH: usize = 3;
const C8_UNIVERSE_DEPTH: usize = 2;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// --- 1 ---------------------------------------------------------------------

fn squash(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn tokens(s: &str) -> Vec<String> {
    let s = s.replace("[ ]", "[]");
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_alphanumeric() || c == '_' {
            let start = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_' || cs[i] == '\'') {
                i += 1;
            }
            out.push(cs[start..i].iter().collect());
        } else if c == '[' && cs.get(i + 1) == Some(&']') {
            out.push("[]".into());
            i += 2;
        } else if "<-=/>".contains(c) && cs.get(i + 1).is_some_and(|n| "-=".contains(*n)) {
            out.push(cs[i..i + 2].iter().collect());
            i += 2;
        } else {
            out.push(c.to_string());
            i += 1;
        }
    }
    out
}

const KEYWORDS: [&str; 3] = ["let", "otherwise", "True"];

/// Tokens with `(a:b)` parentheses dropped and bound names replaced by their
/// order of first appearance within each equation.
fn alpha_normal(text: &str, functions: &[&str]) -> Vec<String> {
    let body: String = text.lines().filter(|l| !l.starts_with("data ")).collect::<Vec<_>>().join("\n");
    let mut ts = tokens(&body);
    let is_ident = |t: &str| t.chars().next().is_some_and(|c| c.is_lowercase() || c == '_');
    let mut i = 0;
    while i + 4 < ts.len() {
        if ts[i] == "(" && ts[i + 4] == ")" && ts[i + 2] == ":" && is_ident(&ts[i + 1]) && is_ident(&ts[i + 3]) {
            ts.remove(i + 4);
            ts.remove(i);
        } else {
            i += 1;
        }
    }
    let mut names: Vec<String> = Vec::new();
    let mut out = Vec::new();
    for (k, t) in ts.iter().enumerate() {
        let starts_equation = functions.contains(&t.as_str()) && (k == 0 || ts[k - 1] == "=" || ts[k - 1] == "Fail");
        if starts_equation && ts.get(k + 1).is_some_and(|n| n == "(" || is_ident(n)) {
            names.clear();
        }
        if is_ident(t) && !functions.contains(&t.as_str()) && !KEYWORDS.contains(&t.as_str()) {
            let idx = names.iter().position(|n| n == t).unwrap_or_else(|| {
                names.push(t.clone());
                names.len() - 1
            });
            out.push(format!("v{idx}"));
        } else {
            out.push(t.clone());
        }
    }
    out
}

const REFERENCE_APPEND_NONTEST: &str = "
append (x1,x2)
  | ([ ], list) <- (x1, x2)
      = list
  | ((x:xs), list) <- (x1, x2)
  , let tail' = append (xs, list)
      = x:tail'
";

const REFERENCE_APPEND_TEST: &str = "
append (x1,x2)
  | ([ ], list) <- (x1, x2)
      = Suc list
  | ((x:xs), list) <- (x1, x2)
  , Suc tail' <- append (xs, list)
      = Suc (x:tail')
  | otherwise = Fail
";

fn emitted(file: &str, all_test: bool) -> String {
    let p = fixture(file);
    let p = if all_test { p.with_all_test() } else { p };
    emit_haskell(&translate(&p).expect("translates"))
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let cases = [
        ("append.lp", false, "append.hs"),
        ("append.lp", true, "append_test.hs"),
        ("polish.lp", false, "polish.hs"),
        ("delmax.lp", false, "delmax.hs"),
        ("backtracker.lp", false, "backtracker.hs"),
    ];
    for (file, all_test, gold) in cases {
        let got = emitted(file, all_test);
        ensure(squash(&got) == squash(&golden(gold)), || format!("{file} differs from {gold}:\n{got}"))?;
    }
    for (all_test, reference) in [(false, REFERENCE_APPEND_NONTEST), (true, REFERENCE_APPEND_TEST)] {
        let got = alpha_normal(&emitted("append.lp", all_test), &["append"]);
        let want = alpha_normal(reference, &["append"]);
        ensure(got == want, || format!("append (all_test={all_test}) not alpha-equivalent:\n{got:?}\n{want:?}"))?;
    }
    let el = start.elapsed();
    ensure(el < C1_LIMIT, || format!("took {el:?}"))?;
    Ok(format!("5 goldens, 2 alpha-equivalent scripts, {el:.2?}"))
}

// --- 2 ---------------------------------------------------------------------

fn failing_clauses(r: &AnalysisReport, pick: impl Fn(&lazylp::modes::ClauseVerdict) -> bool) -> Vec<(String, usize)> {
    r.clauses
        .iter()
        .filter(|c| pick(c))
        .filter_map(|c| match &c.origin {
            Origin::Clause(cr) => Some((cr.pred.to_string(), cr.index)),
            Origin::Query(_) => None,
        })
        .collect()
}

fn clause_lines(p: &Program) -> Vec<String> {
    print_program(p).lines().filter(|l| !l.starts_with(":-") && !l.starts_with("?-")).map(str::to_string).collect()
}

fn criterion_2() -> Check {
    let data: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(repo_root().join("fixtures/verdicts.json")).unwrap())
            .map_err(|e| e.to_string())?;
    let entries = data["fixtures"].as_array().ok_or("no fixtures array")?;
    let mut checked = 0;
    for e in entries {
        let file = e["file"].as_str().ok_or("entry without file")?;
        let p = fixture(file);
        let flag = |key: &str, actual: bool| -> Result<(), String> {
            match e.get(key).and_then(|v| v.as_bool()) {
                Some(want) if want != actual => Err(format!("{file}: {key} is {actual}, expected {want}")),
                _ => Ok(()),
            }
        };
        flag("consistent", check_consistent(&p).holds)?;
        flag("plain", check_plain(&p).holds)?;
        flag("well_moded", check_well_moded(&p).holds)?;
        let simply = check_simply_moded(&p);
        flag("simply_moded", simply.holds)?;
        if let Some(want) = e.get("input_discriminative").and_then(|v| v.as_str()) {
            let got = format!("{:?}", check_input_discriminative_static(&p).verdict);
            ensure(got == want, || format!("{file}: input_discriminative {got}, expected {want}"))?;
        }
        let pairs = |key: &str| -> Option<Vec<(String, usize)>> {
            e.get(key).and_then(|v| v.as_array()).map(|a| {
                a.iter()
                    .map(|x| (x[0].as_str().unwrap().to_string(), x[1].as_u64().unwrap() as usize))
                    .collect()
            })
        };
        if let Some(want) = pairs("not_input_linear") {
            let got = failing_clauses(&check_plain(&p), |c| c.head_input_linear == Some(false));
            ensure(got == want, || format!("{file}: not input-linear {got:?}, expected {want:?}"))?;
        }
        if let Some(want) = pairs("not_simply_moded") {
            let got = failing_clauses(&simply, |c| !c.holds);
            ensure(got == want, || format!("{file}: not simply moded {got:?}, expected {want:?}"))?;
        }
        if let Some(want) = e.get("plainified").and_then(|v| v.as_array()) {
            let plain = make_plain(&p).map_err(|e| format!("{file}: {e}"))?;
            let got = clause_lines(&plain);
            let want: Vec<String> = want.iter().map(|s| s.as_str().unwrap().to_string()).collect();
            ensure(got == want, || format!("{file}: plainified {got:?}, expected {want:?}"))?;
            ensure(check_plain(&plain).holds, || format!("{file}: plainified program is not plain"))?;
            if let Some(want) = e.get("plainified_simply_moded").and_then(|v| v.as_bool()) {
                let got = check_simply_moded(&plain).holds;
                ensure(got == want, || format!("{file}: plainified simply moded {got}"))?;
            }
        }
        checked += 1;
    }
    Ok(format!("{checked} fixtures"))
}

// --- 3 ---------------------------------------------------------------------

fn int_list(xs: &[i64]) -> String {
    format!("[{}]", xs.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let mut rng = rng(3);
    let session = |f: &str| CompareSession::new(&fixture(f)).map_err(|e| format!("{f}: {e}"));
    let append = session("append.lp")?;
    let member = session("member.lp")?;
    let polish = session("polish.lp")?;
    let delmax = session("delmax.lp")?;
    let back = session("backtracker.lp")?;

    let mut work: Vec<(&CompareSession, String, &[Verdict])> = Vec::new();
    const AGREE: &[Verdict] = &[Verdict::Equivalent, Verdict::BothFail];
    const DELMAX: &[Verdict] = &[Verdict::Equivalent, Verdict::BothFail, Verdict::OracleFlounderLazySucceeds];
    for _ in 0..50 {
        let (a, b) = (random_list(&mut rng, 6, 9), random_list(&mut rng, 6, 9));
        work.push((&append, format!("append({},{},X).", int_list(&a), int_list(&b)), AGREE));
    }
    for _ in 0..50 {
        let xs = random_list(&mut rng, 6, 5);
        work.push((&member, format!("member({},{}).", rng.gen_range(0..=5), int_list(&xs)), AGREE));
    }
    for _ in 0..40 {
        let len = rng.gen_range(0..10);
        let xs: Vec<&str> = (0..len).map(|_| *["r", "w"].choose(&mut rng).unwrap()).collect();
        work.push((&polish, format!("polish([{}],X).", xs.join(",")), AGREE));
    }
    for _ in 0..40 {
        let xs = random_list(&mut rng, 6, 9);
        work.push((&delmax, format!("del_max({},X).", int_list(&xs)), DELMAX));
    }
    for _ in 0..40 {
        let xs = random_list(&mut rng, 5, 3);
        work.push((&delmax, format!("del_if_first({},{},X).", int_list(&xs), rng.gen_range(0..=3)), AGREE));
    }
    work.push((&back, "backtracker(X).".into(), &[Verdict::Equivalent]));
    for _ in 0..9 {
        let a = ["a", "b", "c", "d"].choose(&mut rng).unwrap();
        work.push((&back, format!("picky_modifier({a},X)."), AGREE));
    }
    ensure(work.len() >= C3_MIN_QUERIES, || format!("only {} queries", work.len()))?;

    let mut tally = std::collections::BTreeMap::new();
    for (s, q, allowed) in &work {
        let row = compare_query(s, q, None);
        ensure(allowed.contains(&row.verdict), || format!("{q}: {} {:?}", row.verdict, row.note))?;
        *tally.entry(row.verdict.name()).or_insert(0) += 1;
    }
    let gentest = session("gentest.lp")?;
    let lines = parse_queries(&fixture_text("queries/gentest.txt"))?;
    for l in &lines {
        let row = compare_query(&gentest, &l.query, l.expect);
        ensure(row.ok(), || format!("gentest {}: {} (expected {:?})", l.query, row.verdict, l.expect))?;
    }
    let el = start.elapsed();
    ensure(el < C3_LIMIT, || format!("took {el:?}"))?;
    Ok(format!("{} queries {tally:?}, gentest annotations hold, {el:.2?}", work.len()))
}

// --- 4 ---------------------------------------------------------------------

fn criterion_4() -> Check {
    let mut rng = rng(4);
    let fp = translate(&fixture("polish.lp")).map_err(|e| e.to_string())?;
    let mut lengths = vec![0, 1, 2, 3, 10, 100, 500, 1000];
    lengths.extend((0..8).map(|_| rng.gen_range(0..=1000)));
    for n in &lengths {
        let xs: Vec<&str> = (0..*n).map(|_| *["r", "w"].choose(&mut rng).unwrap()).collect();
        let want: Vec<&str> = xs.iter().filter(|c| **c == "r").chain(xs.iter().filter(|c| **c == "w")).copied().collect();
        let input = Term::list(xs.iter().map(|a| Term::atom(a)), None);
        let (r, st) = run_with_stats(&fp, "polish", &[input], C4_BUDGET);
        let want = Term::list(want.iter().map(|a| Term::atom(a)), None);
        ensure(r.as_ref() == Ok(&Outcome::Value(vec![want])), || format!("length {n}: {r:?}"))?;
        ensure(!st.black_hole, || format!("length {n}: black hole flagged"))?;
    }
    let fp = translate(&fixture("eqcircular.lp")).map_err(|e| e.to_string())?;
    let (r, st) = run_with_stats(&fp, "p", &[], C4_BUDGET);
    ensure(matches!(r, Err(EvalError::BlackHole)), || format!("eqcircular gave {r:?}"))?;
    Ok(format!("{} polish lists up to 1000 stable-partitioned; eqcircular black hole after {} steps", lengths.len(), st.steps))
}

// --- 5 ---------------------------------------------------------------------

fn del_max_oracle(xs: &[i64]) -> Vec<i64> {
    let m = xs.iter().copied().fold(0, i64::max);
    xs.iter().copied().filter(|&x| x != m).collect()
}

fn del_max(fp: &lazylp::FunProgram, xs: &[i64], budget: u64) -> (Result<Outcome, EvalError>, u64) {
    let (r, st) = run_with_stats(fp, "del_max", &[Term::int_list(xs)], budget);
    (r, st.steps)
}

fn criterion_5() -> Check {
    let mut rng = rng(5);
    let p = fixture("delmax.lp");
    let fp = translate(&p).map_err(|e| e.to_string())?;
    let mut cases = vec![vec![3, 1, 3, 2], vec![], vec![5]];
    cases.extend((0..40).map(|_| random_list(&mut rng, 30, 9)));
    for xs in &cases {
        let (r, _) = del_max(&fp, xs, C4_BUDGET);
        let want = Outcome::Value(vec![Term::int_list(&del_max_oracle(xs))]);
        ensure(r.as_ref() == Ok(&want), || format!("del_max({xs:?}) gave {r:?}"))?;
    }
    let strict = translate(&p.with_all_test()).map_err(|e| e.to_string())?;
    for xs in [vec![3, 1, 3, 2], vec![5], vec![1, 2, 3]] {
        let (r, _) = del_max(&strict, &xs, C4_BUDGET);
        ensure(matches!(r, Err(EvalError::BlackHole | EvalError::BudgetExceeded(_))), || {
            format!("all-test del_max({xs:?}) gave {r:?}")
        })?;
    }
    let mut ratios = Vec::new();
    for n in C5_SIZES {
        let small = random_ints(&mut rng, n, 1000);
        let large = random_ints(&mut rng, 2 * n, 1000);
        let (r1, s1) = del_max(&fp, &small, 100 * C4_BUDGET);
        let (r2, s2) = del_max(&fp, &large, 100 * C4_BUDGET);
        ensure(r1.is_ok() && r2.is_ok(), || format!("n={n}: {r1:?} {r2:?}"))?;
        let ratio = s2 as f64 / s1 as f64;
        ensure((C5_RATIO.0..=C5_RATIO.1).contains(&ratio), || format!("n={n}: steps {s1} -> {s2}, ratio {ratio:.3}"))?;
        ratios.push(format!("{n}:{ratio:.3}"));
    }
    Ok(format!("{} lists correct, all-test diverges, step ratios {}", cases.len(), ratios.join(" ")))
}

// --- 6 ---------------------------------------------------------------------

#[derive(Default)]
struct MonitorTally {
    runs: u64,
    checks: u64,
    double_matching_runs: u64,
    violations: Vec<String>,
}

impl MonitorTally {
    fn absorb(&mut self, label: &str, r: Result<MonitorReport, MonitorError>) -> Result<bool, String> {
        match r {
            Ok(rep) => {
                self.runs += 1;
                self.checks += rep.checks;
                self.violations.extend(rep.violations.iter().map(|v| format!("{label}: {v}")));
                Ok(true)
            }
            Err(e) => Err(format!("{label}: {e}")),
        }
    }

    fn all(&mut self, label: &str, p: &Program, q: &Query, opts: &SolveOptions) -> Result<(), String> {
        self.absorb(&format!("{label} persistence"), monitor_persistence(p, q, opts))?;
        self.absorb(&format!("{label} groundness"), monitor_groundness(p, q, opts))?;
        match monitor_double_matching(p, q, opts) {
            Err(MonitorError::Precondition { .. }) => {}
            r => {
                self.absorb(&format!("{label} double matching"), r)?;
                self.double_matching_runs += 1;
            }
        }
        Ok(())
    }
}

fn criterion_6() -> Check {
    let start = Instant::now();
    let opts = SolveOptions {
        limits: DerivationLimits { max_steps: 5_000, max_depth: 500, max_answers: 8 },
        occurs_check: true,
    };
    let mut tally = MonitorTally::default();
    let mut fixtures_used = 0;
    for name in ["append", "member", "polish", "delmax", "backtracker", "eqcircular", "gentest", "lastrev"] {
        let p = fixture(&format!("{name}.lp"));
        if !check_well_moded(&p).holds {
            continue;
        }
        fixtures_used += 1;
        for l in parse_queries(&fixture_text(&format!("queries/{name}.txt")))? {
            let q = parse_query(&l.query).map_err(|e| e.to_string())?;
            if query_violations(&p, Analysis::WellModed, &q.atoms).map_err(|e| e.to_string())?.is_empty() {
                tally.all(&format!("{name} {}", l.query), &p, &q, &opts)?;
            }
        }
    }
    let mut rng = rng(6);
    for i in 0..C6_RANDOM_PROGRAMS {
        let (src, queries) = random_well_moded(&mut rng, i % 2 == 0);
        let (p, qs) = parse_all(&src, &queries);
        ensure(check_well_moded(&p).holds, || format!("generator produced an ill-moded program:\n{src}"))?;
        for (q, text) in qs.iter().zip(&queries) {
            tally.all(&format!("program {i} {text}"), &p, q, &opts)?;
        }
    }
    ensure(tally.violations.is_empty(), || tally.violations.join("\n"))?;
    ensure(tally.double_matching_runs > 0, || "double matching never ran".into())?;
    let el = start.elapsed();
    ensure(el < C6_LIMIT, || format!("took {el:?}"))?;
    Ok(format!(
        "{fixtures_used} fixtures + {C6_RANDOM_PROGRAMS} programs, {} monitor runs ({} double matching), {} checks, 0 violations, {el:.2?}",
        tally.runs, tally.double_matching_runs, tally.checks
    ))
}

// --- 7 ---------------------------------------------------------------------

fn criterion_7() -> Check {
    let p = fixture("backtracker.lp");
    let c = Term::atom("c");
    let fp = translate(&p).map_err(|e| e.to_string())?;
    let (r, st) = run_with_stats(&fp, "backtracker", &[], C4_BUDGET);
    ensure(r.as_ref() == Ok(&Outcome::Value(vec![c.clone()])), || format!("lazy gave {r:?}"))?;
    ensure(st.backtracks >= 1, || "no abandoned alternative".into())?;
    let q = parse_query("backtracker(X).").unwrap();
    let rep = ld_solve_with(&p, &q, &SolveOptions::default(), &mut ());
    let first = rep.answers.first().and_then(|a| a.bindings.get("X"));
    ensure(first == Some(&c), || format!("oracle first answer {first:?}"))?;
    ensure(rep.failed_branches >= 1, || "oracle reports no failed branch".into())?;
    Ok(format!("X = c; lazy backtracks {}, oracle failed branches {}", st.backtracks, rep.failed_branches))
}

// --- 8 ---------------------------------------------------------------------

fn slot(t: &Term) -> Option<usize> {
    t.as_var().map(|v| v.id as usize)
}

fn equal_under(a: &Term, b: &Term, s: &[&Term; 3]) -> bool {
    match (slot(a), slot(b)) {
        (Some(i), _) => equal_under(s[i], b, s),
        (_, Some(j)) => equal_under(a, s[j], s),
        _ => match (a, b) {
            (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| equal_under(x, y, s))
            }
            _ => a == b,
        },
    }
}

/// Binds the variables of `pattern` so that it equals the ground `target`.
fn matches<'t>(pattern: &Term, target: &'t Term, env: &mut [Option<&'t Term>; 3]) -> bool {
    if let Some(i) = slot(pattern) {
        return match env[i] {
            Some(t) => t == target,
            None => {
                env[i] = Some(target);
                true
            }
        };
    }
    match (pattern, target) {
        (Term::Compound(f, xs), Term::Compound(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| matches(x, y, env))
        }
        _ => pattern == target,
    }
}

fn criterion_8() -> Check {
    let mut rng = rng(8);
    let universe = ground_universe(C8_UNIVERSE_DEPTH);
    let mut assignments = Vec::with_capacity(universe.len().pow(3));
    for x in &universe {
        for y in &universe {
            for z in &universe {
                assignments.push([x, y, z]);
            }
        }
    }
    let (mut unifiable, mut witnessed) = (0, 0);
    for _ in 0..C8_PAIRS {
        let (a, b) = (small_term(&mut rng, C8_DEPTH), small_term(&mut rng, C8_DEPTH));
        let ground: Vec<bool> = assignments.iter().map(|s| equal_under(&a, &b, s)).collect();
        let any = ground.iter().any(|&g| g);
        match unify(&a, &b) {
            None => ensure(!any, || format!("{a} = {b}: no unifier reported but a ground one exists"))?,
            Some(theta) => {
                unifiable += 1;
                witnessed += usize::from(any);
                ensure(theta.apply(&a) == theta.apply(&b), || format!("{a} = {b}: not a unifier"))?;
                ensure(theta.is_idempotent(), || format!("{a} = {b}: not idempotent"))?;
                let image: Vec<Term> = (0..3).map(|i| theta.apply(&var(i))).collect();
                for (s, &g) in assignments.iter().zip(&ground) {
                    let mut env = [None; 3];
                    let instance = (0..3).all(|i| matches(&image[i], s[i], &mut env));
                    ensure(instance == g, || {
                        format!("{a} = {b}: ground unifier {s:?} instance-of-mgu {instance}, unifies {g}")
                    })?;
                }
            }
        }
    }
    Ok(format!(
        "{C8_PAIRS} pairs, {unifiable} unifiable ({witnessed} with ground witnesses among {} assignments)",
        assignments.len()
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1. translation fidelity (goldens, alpha-equivalent append scripts, < 1 s)", criterion_1),
        ("2. analysis verdict matrix", criterion_2),
        ("3. semantic equivalence on >= 200 random ground queries (< 30 s)", criterion_3),
        ("4. circular let: polish up to length 1000, eqcircular black hole", criterion_4),
        ("5. laziness/strictness split and linear del_max (ratio in [1.6, 2.4])", criterion_5),
        ("6. persistence, groundness and double-matching monitors (< 60 s)", criterion_6),
        ("7. backtracking mimicry", criterion_7),
        ("8. unifier agrees with a brute-force mgu oracle", criterion_8),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match res {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
