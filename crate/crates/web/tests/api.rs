use lazylp_web::{analyze_program, example_source, random_query, run_query, translate_program};
use serde_json::Value;

fn json(s: String) -> Value {
    serde_json::from_str(&s).expect("exports return JSON")
}

#[test]
fn polish_round_trip() {
    let src = example_source("polish");
    let report = json(analyze_program(&src));
    assert_eq!(report["translatable"], true);
    assert_eq!(report["report"]["well_moded"]["holds"], false);
    let hs = json(translate_program(&src, false, false));
    assert!(hs["haskell"].as_str().unwrap().contains("distribute"));
    let row = json(run_query(&src, "polish([w,r,w,r],X).", 0, false));
    assert_eq!(row["row"]["verdict"], "Equivalent");
    assert_eq!(row["row"]["lazy"]["outcome"]["Value"][0], "[r,r,w,w]");
}

#[test]
fn random_queries_are_deterministic() {
    assert_eq!(random_query("delmax", 8, 1), random_query("delmax", 8, 1));
    assert_eq!(random_query("unknown", 3, 1), "");
}

#[test]
fn budget_is_respected() {
    let row = json(run_query(&example_source("append"), "append([1,2,3],[],X).", 2, false));
    assert!(row["row"]["lazy"]["error"].as_str().unwrap().contains("budget"));
}
