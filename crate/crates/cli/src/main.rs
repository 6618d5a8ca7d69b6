use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use lazylp::compare::{bridge_query, parse_queries, CompareRow, CompareSession, DEFAULT_BUDGET};
use lazylp::modes::make_plain;
use lazylp::oracle::{ld_solve_with, run_monitor, MonitorKind, SolveOptions};
use lazylp::syntax::{parse_query, Kind, Program};
use lazylp::translate::{check_kind_discipline, emit_haskell, translate};
use lazylp::{analyze, parse_program, print_program, run_with_stats, DerivationLimits, Outcome};

const EXIT_REJECTED: u8 = 1;
const EXIT_RUNTIME: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_NOINPUT: u8 = 66;

/// Moded logic programs: analysis, translation to a lazy functional IR, and
/// cross-checking against an LD-resolution interpreter.
#[derive(Parser, Debug)]
#[command(name = "lazylp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every mode analysis; succeeds iff the program is consistent and plain.
    Check {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Print the program rewritten into plain form.
    Plainify { file: PathBuf },
    /// Emit the functional translation.
    Translate {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Print the IR as JSON instead of source text.
        #[arg(long)]
        dump_ir: bool,
        /// Rewrite into plain form first when needed.
        #[arg(long)]
        plainify: bool,
        /// Declare every predicate test.
        #[arg(long)]
        all_test: bool,
    },
    /// Evaluate a query lazily through the translation.
    Run {
        file: PathBuf,
        query: String,
        #[arg(long)]
        stats: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long)]
        all_test: bool,
    },
    /// Solve a query with the LD-resolution interpreter.
    Solve {
        file: PathBuf,
        query: String,
        /// steps=N,depth=D,answers=K
        #[arg(long)]
        limits: Option<String>,
        #[arg(long)]
        no_occurs: bool,
        /// One of: groundness, double-matching, input-discriminative,
        /// partition-correctness, persistence.
        #[arg(long)]
        monitor: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Compare both semantics on every query of a file.
    Compare {
        file: PathBuf,
        queries: PathBuf,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long)]
        all_test: bool,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

type CmdResult = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_NOINPUT, format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Program, Failure> {
    let text = read(path)?;
    parse_program(&text).map_err(|e| Failure::new(EXIT_REJECTED, format!("{}: {e}", path.display())))
}

fn load_lazy(path: &Path, all_test: bool) -> Result<Program, Failure> {
    let p = load(path)?;
    Ok(if all_test { p.with_all_test() } else { p })
}

fn write_out(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::new(73, format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn check(file: &Path, as_json: bool) -> CmdResult {
    let p = load(file)?;
    let report = analyze(&p);
    if as_json {
        let v = json!({
            "file": file.display().to_string(),
            "translatable": report.translatable(),
            "report": report,
        });
        println!("{}", serde_json::to_string_pretty(&v).expect("report serializes"));
    } else {
        print!("{report}");
    }
    Ok(if report.translatable() { 0 } else { EXIT_REJECTED })
}

fn plainify(file: &Path) -> CmdResult {
    let p = load(file)?;
    let plain = make_plain(&p).map_err(|e| Failure::new(EXIT_REJECTED, e.to_string()))?;
    print!("{}", print_program(&plain));
    Ok(0)
}

fn translate_cmd(file: &Path, output: Option<&Path>, dump_ir: bool, plain: bool, all_test: bool) -> CmdResult {
    let mut p = load_lazy(file, all_test)?;
    if plain {
        p = make_plain(&p).map_err(|e| Failure::new(EXIT_REJECTED, e.to_string()))?;
    }
    let fp = translate(&p).map_err(|e| Failure::new(EXIT_REJECTED, e.to_string()))?;
    if let Err(problems) = check_kind_discipline(&fp) {
        return Err(Failure::new(EXIT_RUNTIME, problems.join("\n")));
    }
    let text = if dump_ir { fp.to_json() + "\n" } else { emit_haskell(&fp) };
    write_out(output, &text)?;
    Ok(0)
}

fn session(file: &Path, all_test: bool, budget: u64) -> Result<CompareSession, Failure> {
    let p = load(file)?;
    let mut s = CompareSession::new(&p).map_err(|e| Failure::new(EXIT_REJECTED, e.to_string()))?;
    if all_test {
        let lazy = p.with_all_test();
        let mut t = CompareSession::new(&lazy).map_err(|e| Failure::new(EXIT_REJECTED, e.to_string()))?;
        t.source = s.source;
        s = t;
    }
    s.budget = budget;
    Ok(s)
}

fn payload(ts: &[lazylp::Term]) -> String {
    match ts {
        [] => "()".into(),
        [t] => t.to_string(),
        ts => format!("({})", ts.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ")),
    }
}

fn run(file: &Path, query: &str, stats: bool, budget: u64, all_test: bool) -> CmdResult {
    let s = session(file, all_test, budget)?;
    let q = parse_query(query).map_err(|e| Failure::new(EXIT_USAGE, format!("query: {e}")))?;
    let bridge = bridge_query(&s.lazy, &s.fp, &q).map_err(|e| Failure::new(EXIT_REJECTED, format!("query: {e}")))?;
    let (result, st) = run_with_stats(&s.fp, &bridge.function, &bridge.inputs, s.budget);
    let code = match &result {
        Ok(Outcome::Value(ts)) => {
            if bridge.kind == Kind::Test {
                println!("Suc {}", payload_atomic(ts));
            }
            for (v, t) in bridge.outputs.iter().zip(ts) {
                println!("{v} = {t}");
            }
            if bridge.kind == Kind::NonTest && ts.is_empty() {
                println!("= ()");
            }
            0
        }
        Ok(Outcome::Fail) => {
            println!("Fail");
            EXIT_REJECTED
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_RUNTIME
        }
    };
    if stats {
        println!(
            "steps: {}  backtracks: {}  black_hole: {}  heap: {}",
            st.steps, st.backtracks, st.black_hole, st.heap
        );
    }
    Ok(code)
}

fn payload_atomic(ts: &[lazylp::Term]) -> String {
    let p = payload(ts);
    if ts.len() == 1 && p.contains(' ') {
        format!("({p})")
    } else {
        p
    }
}

fn solve(file: &Path, query: &str, limits: Option<&str>, no_occurs: bool, monitor: Option<&str>, as_json: bool) -> CmdResult {
    let p = load(file)?;
    let q = parse_query(query).map_err(|e| Failure::new(EXIT_USAGE, format!("query: {e}")))?;
    let limits = match limits {
        Some(l) => DerivationLimits::parse(l).map_err(|e| Failure::new(EXIT_USAGE, format!("--limits: {e}")))?,
        None => DerivationLimits::default(),
    };
    let opts = SolveOptions { limits, occurs_check: !no_occurs };
    if let Some(name) = monitor {
        let kind = MonitorKind::from_name(name)
            .ok_or_else(|| Failure::new(EXIT_USAGE, format!("unknown monitor `{name}`")))?;
        let report = run_monitor(kind, &p, &q, &opts).map_err(|e| Failure::new(EXIT_REJECTED, e.to_string()))?;
        if as_json {
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
        } else {
            print!("{report}");
        }
        return Ok(if report.passed() { 0 } else { EXIT_REJECTED });
    }
    let report = ld_solve_with(&p, &q, &opts, &mut ());
    if as_json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        print!("{report}");
    }
    Ok(if report.aborted() {
        EXIT_RUNTIME
    } else if report.answers.is_empty() {
        EXIT_REJECTED
    } else {
        0
    })
}

fn compare(file: &Path, queries: &Path, as_json: bool, budget: u64, all_test: bool) -> CmdResult {
    let s = session(file, all_test, budget)?;
    let lines = parse_queries(&read(queries)?).map_err(|e| Failure::new(EXIT_REJECTED, e))?;
    let rows: Vec<CompareRow> = lines
        .par_iter()
        .map(|l| lazylp::compare_query(&s, &l.query, l.expect))
        .collect();
    let ok = rows.iter().all(CompareRow::ok);
    if as_json {
        let v = json!({
            "file": file.display().to_string(),
            "ok": ok,
            "rows": rows,
        });
        println!("{}", serde_json::to_string_pretty(&v).expect("rows serialize"));
    } else {
        for r in &rows {
            let lazy = match (&r.lazy.outcome, &r.lazy.error) {
                (Some(o), _) => o.to_string(),
                (None, Some(e)) => e.clone(),
                (None, None) => "-".into(),
            };
            let oracle = match &r.oracle.first {
                Some(ts) => format!("{} ({} answers)", payload(ts), r.oracle.answers),
                None if r.oracle.floundered.is_some() => "floundered".into(),
                None => "no".into(),
            };
            let mark = if r.ok() { "ok" } else { "MISMATCH" };
            println!("{mark:<8} {:<28} {:<40} lazy: {lazy}  oracle: {oracle}", r.verdict.name(), r.query);
            if let Some(n) = &r.note {
                println!("         note: {n}");
            }
        }
    }
    Ok(if ok { 0 } else { EXIT_REJECTED })
}

fn dispatch(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Check { file, json } => check(&file, json),
        Command::Plainify { file } => plainify(&file),
        Command::Translate { file, output, dump_ir, plainify, all_test } => {
            translate_cmd(&file, output.as_deref(), dump_ir, plainify, all_test)
        }
        Command::Run { file, query, stats, budget, all_test } => run(&file, &query, stats, budget, all_test),
        Command::Solve { file, query, limits, no_occurs, monitor, json } => {
            solve(&file, &query, limits.as_deref(), no_occurs, monitor.as_deref(), json)
        }
        Command::Compare { file, queries, json, budget, all_test } => compare(&file, &queries, json, budget, all_test),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
