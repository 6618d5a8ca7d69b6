//! Browser bindings: analyse a moded program, show its functional
//! translation, and run a query through both semantics.
//!
//! Every export returns a JSON string so the page needs no generated
//! TypeScript glue beyond `wasm-bindgen`'s string passing.

use lazylp::compare::{CompareSession, DEFAULT_BUDGET};
use lazylp::modes::check_plain;
use lazylp::{analyze, compare_query, emit_haskell, make_plain, parse_program, translate};
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const EXAMPLES: [(&str, &str); 8] = [
    ("append", include_str!("../../../fixtures/append.lp")),
    ("member", include_str!("../../../fixtures/member.lp")),
    ("polish", include_str!("../../../fixtures/polish.lp")),
    ("delmax", include_str!("../../../fixtures/delmax.lp")),
    ("backtracker", include_str!("../../../fixtures/backtracker.lp")),
    ("eqcircular", include_str!("../../../fixtures/eqcircular.lp")),
    ("gentest", include_str!("../../../fixtures/gentest.lp")),
    ("lastrev", include_str!("../../../fixtures/lastrev.lp")),
];

fn ok<T: Serialize>(key: &str, value: T) -> String {
    let mut v = json!({ "ok": true });
    v[key] = serde_json::to_value(value).unwrap_or(Value::Null);
    v.to_string()
}

fn err(message: impl ToString) -> String {
    json!({ "ok": false, "error": message.to_string() }).to_string()
}

/// Names of the bundled example programs, as a JSON array.
#[wasm_bindgen]
pub fn example_names() -> String {
    json!(EXAMPLES.iter().map(|(n, _)| *n).collect::<Vec<_>>()).to_string()
}

/// Source text of a bundled example; empty for unknown names.
#[wasm_bindgen]
pub fn example_source(name: &str) -> String {
    EXAMPLES.iter().find(|(n, _)| *n == name).map(|(_, s)| s.to_string()).unwrap_or_default()
}

/// Mode analyses of a program.
#[wasm_bindgen]
pub fn analyze_program(src: &str) -> String {
    match parse_program(src) {
        Ok(p) => {
            let report = analyze(&p);
            let mut v: Value = serde_json::from_str(&ok("report", &report)).expect("valid json");
            v["translatable"] = json!(report.translatable());
            v["summary"] = json!(report.to_string());
            v.to_string()
        }
        Err(e) => err(e),
    }
}

/// Functional translation as source text. Non-plain programs are made plain
/// first when `plainify` is set.
#[wasm_bindgen]
pub fn translate_program(src: &str, all_test: bool, plainify: bool) -> String {
    let run = || -> Result<String, String> {
        let mut p = parse_program(src).map_err(|e| e.to_string())?;
        if all_test {
            p = p.with_all_test();
        }
        if plainify && !check_plain(&p).holds {
            p = make_plain(&p).map_err(|e| e.to_string())?;
        }
        let fp = translate(&p).map_err(|e| e.to_string())?;
        Ok(emit_haskell(&fp))
    };
    match run() {
        Ok(text) => ok("haskell", text),
        Err(e) => err(e),
    }
}

/// Runs one query lazily and through the LD interpreter and classifies the
/// pair. A zero budget means the default.
#[wasm_bindgen]
pub fn run_query(src: &str, query: &str, budget: u32, all_test: bool) -> String {
    let p = match parse_program(src) {
        Ok(p) => p,
        Err(e) => return err(e),
    };
    let session = if all_test {
        CompareSession::new(&p.with_all_test()).map(|mut s| {
            s.source = p.clone();
            s
        })
    } else {
        CompareSession::new(&p)
    };
    let mut session = match session {
        Ok(s) => s,
        Err(e) => return err(e),
    };
    session.budget = if budget == 0 { DEFAULT_BUDGET } else { u64::from(budget) };
    ok("row", compare_query(&session, query, None))
}

/// A random ground query for the bundled examples that take a list.
#[wasm_bindgen]
pub fn random_query(example: &str, len: u32, seed: u32) -> String {
    let mut rng = SmallRng::seed_from_u64(u64::from(seed));
    let mut ints = || (0..len).map(|_| rng.gen_range(0..10).to_string()).collect::<Vec<_>>().join(",");
    match example {
        "append" => format!("append([{}],[{}],X).", ints(), ints()),
        "member" => format!("member({},[{}]).", len % 10, ints()),
        "delmax" => format!("del_max([{}],X).", ints()),
        "lastrev" => format!("last([{}],X).", ints()),
        "polish" => {
            let xs: Vec<&str> = (0..len).map(|_| if rng.gen_bool(0.5) { "r" } else { "w" }).collect();
            format!("polish([{}],X).", xs.join(","))
        }
        "backtracker" => "backtracker(X).".into(),
        "eqcircular" => "p(X).".into(),
        "gentest" => if rng.gen_bool(0.5) { "p(X)." } else { "q(X)." }.into(),
        _ => String::new(),
    }
}
