#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::PathBuf;

use lazylp::syntax::{parse_program, parse_query, Program, Query};
use lazylp::Term;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn fixture_text(name: &str) -> String {
    let path = repo_root().join("fixtures").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn fixture(name: &str) -> Program {
    parse_program(&fixture_text(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_ints(rng: &mut impl Rng, n: usize, hi: i64) -> Vec<i64> {
    (0..n).map(|_| rng.gen_range(0..=hi)).collect()
}

/// A list of length below `max_len`.
pub fn random_list(rng: &mut impl Rng, max_len: usize, hi: i64) -> Vec<i64> {
    let n = rng.gen_range(0..max_len);
    random_ints(rng, n, hi)
}

// --- terms over a, g/1, f/2 -----------------------------------------------

pub const VARS: [&str; 3] = ["X", "Y", "Z"];

pub fn var(i: usize) -> Term {
    Term::var(VARS[i], i as u32)
}

/// A random term of depth at most `depth` over the constant `a`, the unary
/// `g`, the binary `f` and the variables X, Y, Z.
pub fn small_term(rng: &mut impl Rng, depth: usize) -> Term {
    let choice = if depth == 0 { rng.gen_range(0..2) } else { rng.gen_range(0..4) };
    match choice {
        0 => Term::atom("a"),
        1 => var(rng.gen_range(0..VARS.len())),
        2 => Term::compound("g", vec![small_term(rng, depth - 1)]),
        _ => Term::compound("f", vec![small_term(rng, depth - 1), small_term(rng, depth - 1)]),
    }
}

/// Every ground term of depth at most `depth` over a, g/1, f/2.
pub fn ground_universe(depth: usize) -> Vec<Term> {
    let mut level = vec![Term::atom("a")];
    for _ in 0..depth {
        let mut next = vec![Term::atom("a")];
        for t in &level {
            next.push(Term::compound("g", vec![t.clone()]));
        }
        for s in &level {
            for t in &level {
                next.push(Term::compound("f", vec![s.clone(), t.clone()]));
            }
        }
        level = next;
    }
    level
}

// --- well-moded programs ---------------------------------------------------

struct Pred {
    name: String,
    modes: Vec<bool>,
}

struct Vars {
    next: usize,
}

impl Vars {
    fn fresh(&mut self) -> String {
        self.next += 1;
        format!("V{}", self.next)
    }
}

fn data_term(rng: &mut impl Rng, depth: usize, pick_var: &mut impl FnMut(&mut dyn rand::RngCore) -> Option<String>) -> String {
    let k = if depth == 0 { rng.gen_range(0..3) } else { rng.gen_range(0..6) };
    match k {
        0 => ["a", "b", "[]"].choose(rng).unwrap().to_string(),
        1 | 2 => pick_var(rng).unwrap_or_else(|| "a".into()),
        3 => format!("f({})", data_term(rng, depth - 1, pick_var)),
        4 => format!(
            "[{}|{}]",
            data_term(rng, depth - 1, pick_var),
            data_term(rng, depth - 1, pick_var)
        ),
        _ => format!("h({},{})", data_term(rng, depth - 1, pick_var), data_term(rng, depth - 1, pick_var)),
    }
}

/// A term whose variables are all fresh.
fn fresh_term(rng: &mut impl Rng, vars: &mut Vars, bound: &mut Vec<String>) -> String {
    let mut made = Vec::new();
    let t = data_term(rng, 2, &mut |_| {
        let v = vars.fresh();
        made.push(v.clone());
        Some(v)
    });
    bound.extend(made);
    t
}

/// A term built only from variables in `avail`.
fn avail_term(rng: &mut impl Rng, avail: &[String]) -> String {
    data_term(rng, 2, &mut |r| avail.choose(r).cloned())
}

fn ground_term(rng: &mut impl Rng) -> String {
    data_term(rng, 2, &mut |_| None)
}

/// Source text of a random well-moded program together with well-moded
/// queries. Predicate `pI` only calls `pJ` with `J < I`, so every
/// derivation is finite. With `simple` set, body outputs are distinct fresh
/// variables, which also makes the program simply moded.
pub fn random_well_moded(rng: &mut impl Rng, simple: bool) -> (String, Vec<String>) {
    let n = rng.gen_range(2..=4);
    let preds: Vec<Pred> = (0..n)
        .map(|i| Pred { name: format!("p{i}"), modes: (0..rng.gen_range(1..=3)).map(|_| rng.gen_bool(0.5)).collect() })
        .collect();
    let mut src = String::new();
    for p in &preds {
        let ms: Vec<&str> = p.modes.iter().map(|&i| if i { "in" } else { "out" }).collect();
        let _ = writeln!(src, ":- mode {}({}).", p.name, ms.join(","));
    }
    for (i, p) in preds.iter().enumerate() {
        for _ in 0..rng.gen_range(1..=3) {
            let mut vars = Vars { next: 0 };
            let mut avail: Vec<String> = Vec::new();
            let mut head: Vec<Option<String>> = vec![None; p.modes.len()];
            for (k, &is_in) in p.modes.iter().enumerate() {
                if is_in {
                    let mut bound = Vec::new();
                    let t = if rng.gen_bool(0.3) && !avail.is_empty() {
                        avail_term(rng, &avail)
                    } else {
                        fresh_term(rng, &mut vars, &mut bound)
                    };
                    avail.extend(bound);
                    head[k] = Some(t);
                }
            }
            let mut body = Vec::new();
            for _ in 0..rng.gen_range(0..=2) {
                if i == 0 || rng.gen_bool(0.2) {
                    if avail.is_empty() {
                        continue;
                    }
                    let op = if rng.gen_bool(0.5) { "==" } else { "\\==" };
                    body.push(format!("{} {op} {}", avail_term(rng, &avail), avail_term(rng, &avail)));
                    continue;
                }
                let callee = &preds[rng.gen_range(0..i)];
                let mut args = Vec::new();
                let mut produced = Vec::new();
                for &is_in in &callee.modes {
                    if is_in {
                        args.push(avail_term(rng, &avail));
                    } else if simple || rng.gen_bool(0.6) {
                        let v = vars.fresh();
                        produced.push(v.clone());
                        args.push(v);
                    } else if rng.gen_bool(0.5) && !avail.is_empty() {
                        args.push(avail_term(rng, &avail));
                    } else {
                        args.push(fresh_term(rng, &mut vars, &mut produced));
                    }
                }
                avail.extend(produced);
                body.push(format!("{}({})", callee.name, args.join(",")));
            }
            for (k, &is_in) in p.modes.iter().enumerate() {
                if !is_in {
                    head[k] = Some(avail_term(rng, &avail));
                }
            }
            let head: Vec<String> = head.into_iter().map(|t| t.expect("every position filled")).collect();
            let _ = write!(src, "{}({})", p.name, head.join(","));
            if body.is_empty() {
                src.push_str(".\n");
            } else {
                let _ = writeln!(src, " :- {}.", body.join(", "));
            }
        }
    }
    let mut queries = Vec::new();
    for _ in 0..3 {
        let mut vars = Vars { next: 100 };
        let mut avail: Vec<String> = Vec::new();
        let mut atoms = Vec::new();
        for _ in 0..rng.gen_range(1..=2) {
            let callee = preds.choose(rng).unwrap();
            let mut args = Vec::new();
            let mut produced = Vec::new();
            for &is_in in &callee.modes {
                if is_in {
                    args.push(if avail.is_empty() { ground_term(rng) } else { avail_term(rng, &avail) });
                } else {
                    let v = vars.fresh();
                    produced.push(v.clone());
                    args.push(v);
                }
            }
            avail.extend(produced);
            atoms.push(format!("{}({})", callee.name, args.join(",")));
        }
        queries.push(format!("{}.", atoms.join(", ")));
    }
    (src, queries)
}

pub fn parse_all(src: &str, queries: &[String]) -> (Program, Vec<Query>) {
    let p = parse_program(src).unwrap_or_else(|e| panic!("{e}\n{src}"));
    let qs = queries.iter().map(|q| parse_query(q).unwrap_or_else(|e| panic!("{e}: {q}"))).collect();
    (p, qs)
}
