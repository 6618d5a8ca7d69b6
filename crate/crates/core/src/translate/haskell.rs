//! Haskell surface syntax for the IR, in pattern-guard style.

use std::fmt::Write as _;

use super::ir::{Alternative, FunExpr, FunProgram, Function, Pattern, Qualifier};
use crate::syntax::Builtin;
use crate::term::{CONS, NIL};

pub const RESULT_DECL: &str = "data Result a = Suc a | Fail";

fn op(b: Builtin) -> &'static str {
    match b {
        Builtin::Eq => "==",
        Builtin::Neq => "/=",
        Builtin::Lt => "<",
        Builtin::Le => "<=",
        Builtin::Gt => ">",
        Builtin::Ge => ">=",
        Builtin::Match => "=",
    }
}

fn string_lit(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn atom_lit(a: &str) -> String {
    if a == NIL {
        "[]".into()
    } else {
        string_lit(a)
    }
}

fn int_lit(n: i64, atomic: bool) -> String {
    if n < 0 && atomic {
        format!("({n})")
    } else {
        n.to_string()
    }
}

fn constructor(f: &str) -> String {
    let mut cs = f.chars();
    let mut out: String = match cs.next() {
        Some(c) if c.is_ascii_alphabetic() => c.to_ascii_uppercase().to_string(),
        Some(_) | None => "C_".into(),
    };
    out.extend(cs.map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' }));
    out
}

fn paren(s: String, wrap: bool) -> String {
    if wrap {
        format!("({s})")
    } else {
        s
    }
}

struct Printer<'a> {
    alt: &'a Alternative,
}

impl Printer<'_> {
    fn var(&self, id: usize) -> &str {
        &self.alt.vars[id]
    }

    fn pattern(&self, p: &Pattern, atomic: bool) -> String {
        match p {
            Pattern::Var(id) => self.var(*id).to_string(),
            Pattern::Wildcard => "_".into(),
            Pattern::Int(n) => int_lit(*n, atomic),
            Pattern::Atom(a) => atom_lit(a),
            Pattern::Construct(f, args) if &**f == CONS && args.len() == 2 => {
                let items = list_items_pat(p);
                if let Some(items) = items {
                    let xs: Vec<String> = items.iter().map(|x| self.pattern(x, false)).collect();
                    return format!("[{}]", xs.join(", "));
                }
                paren(format!("{}:{}", self.pattern(&args[0], true), self.pattern(&args[1], false)), atomic)
            }
            Pattern::Construct(f, args) => {
                let xs: Vec<String> = args.iter().map(|x| self.pattern(x, true)).collect();
                paren(format!("{} {}", constructor(f), xs.join(" ")), atomic)
            }
            Pattern::Tuple(xs) => {
                let xs: Vec<String> = xs.iter().map(|x| self.pattern(x, false)).collect();
                format!("({})", xs.join(", "))
            }
            Pattern::Suc(x) => paren(format!("Suc {}", self.pattern(x, true)), atomic),
        }
    }

    fn expr(&self, e: &FunExpr, atomic: bool) -> String {
        match e {
            FunExpr::Var(id) => self.var(*id).to_string(),
            FunExpr::Int(n) => int_lit(*n, atomic),
            FunExpr::Atom(a) => atom_lit(a),
            FunExpr::Construct(f, args) if &**f == CONS && args.len() == 2 => {
                if let Some(items) = list_items_expr(e) {
                    let xs: Vec<String> = items.iter().map(|x| self.expr(x, false)).collect();
                    return format!("[{}]", xs.join(", "));
                }
                paren(format!("{}:{}", self.expr(&args[0], true), self.expr(&args[1], false)), atomic)
            }
            FunExpr::Construct(f, args) => {
                let xs: Vec<String> = args.iter().map(|x| self.expr(x, true)).collect();
                paren(format!("{} {}", constructor(f), xs.join(" ")), atomic)
            }
            FunExpr::Tuple(xs) => {
                let xs: Vec<String> = xs.iter().map(|x| self.expr(x, false)).collect();
                format!("({})", xs.join(", "))
            }
            FunExpr::Call { name, args, .. } => match args.len() {
                0 => name.to_string(),
                1 => paren(format!("{name} {}", self.expr(&args[0], true)), atomic),
                _ => {
                    let xs: Vec<String> = args.iter().map(|x| self.expr(x, false)).collect();
                    paren(format!("{name} ({})", xs.join(", ")), atomic)
                }
            },
            FunExpr::Suc(x) => paren(format!("Suc {}", self.expr(x, true)), atomic),
            FunExpr::Fail => "Fail".into(),
            FunExpr::Builtin(b, args) => paren(
                format!("{} {} {}", self.expr(&args[0], true), op(*b), self.expr(&args[1], true)),
                atomic,
            ),
        }
    }

    fn qualifier(&self, q: &Qualifier) -> String {
        match q {
            Qualifier::Match { pattern, scrutinee } => {
                format!("{} <- {}", self.pattern(pattern, false), self.expr(scrutinee, false))
            }
            Qualifier::Let { pattern, bound } => {
                format!("let {} = {}", self.pattern(pattern, false), self.expr(bound, false))
            }
            Qualifier::Test(b, l, r) => format!("{} {} {}", self.expr(l, true), op(*b), self.expr(r, true)),
        }
    }
}

fn list_items_pat(p: &Pattern) -> Option<Vec<&Pattern>> {
    let mut items = Vec::new();
    let mut cur = p;
    loop {
        match cur {
            Pattern::Construct(f, args) if &**f == CONS && args.len() == 2 => {
                items.push(&args[0]);
                cur = &args[1];
            }
            Pattern::Atom(a) if &**a == NIL => return Some(items),
            _ => return None,
        }
    }
}

fn list_items_expr(e: &FunExpr) -> Option<Vec<&FunExpr>> {
    let mut items = Vec::new();
    let mut cur = e;
    loop {
        match cur {
            FunExpr::Construct(f, args) if &**f == CONS && args.len() == 2 => {
                items.push(&args[0]);
                cur = &args[1];
            }
            FunExpr::Atom(a) if &**a == NIL => return Some(items),
            _ => return None,
        }
    }
}

fn emit_function(out: &mut String, f: &Function) {
    let params = &f.equation.params;
    match params.len() {
        0 => out.push_str(&f.name),
        1 => {
            let _ = write!(out, "{} {}", f.name, params[0]);
        }
        _ => {
            let _ = write!(out, "{} ({})", f.name, params.join(", "));
        }
    }
    out.push('\n');
    for alt in &f.equation.alternatives {
        let pr = Printer { alt };
        if alt.qualifiers.is_empty() {
            out.push_str("  | True\n");
        }
        for (i, q) in alt.qualifiers.iter().enumerate() {
            let lead = if i == 0 { '|' } else { ',' };
            let _ = writeln!(out, "  {lead} {}", pr.qualifier(q));
        }
        let _ = writeln!(out, "      = {}", pr.expr(&alt.result, false));
    }
    if f.equation.otherwise_fail {
        out.push_str("  | otherwise = Fail\n");
    }
}

/// Renders the program: the `Result` declaration, then one definition per
/// function in declaration order.
pub fn emit_haskell(fp: &FunProgram) -> String {
    let mut out = String::from(RESULT_DECL);
    out.push('\n');
    for f in fp.functions.values() {
        out.push('\n');
        emit_function(&mut out, f);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;
    use crate::translate::translate;

    #[test]
    fn empty_program() {
        assert_eq!(emit_haskell(&FunProgram::default()), format!("{RESULT_DECL}\n"));
    }

    #[test]
    fn append_nontest() {
        let src = ":- mode append(in,in,out).\n:- kind append(nontest).
            append([],List,List).
            append([H|Tail],List,[H|Tail']) :- append(Tail,List,Tail').";
        let hs = emit_haskell(&translate(&parse_program(src).unwrap()).unwrap());
        let expected = "data Result a = Suc a | Fail

append (x1, x2)
  | ([], list) <- (x1, x2)
      = list
  | (h:tail, list) <- (x1, x2)
  , let tail' = append (tail, list)
      = h:tail'
";
        assert_eq!(hs, expected);
    }

    #[test]
    fn literals() {
        let src = ":- mode p(in,out).\n:- kind p(test).
            p(f(-3,\"a b\"), [1,2]) :- 1 < 2.";
        let hs = emit_haskell(&translate(&parse_program(src).unwrap()).unwrap());
        assert!(hs.contains("| F (-3) \"a b\" <- x1"), "{hs}");
        assert!(hs.contains(", 1 < 2"), "{hs}");
        assert!(hs.contains("= Suc [1, 2]"), "{hs}");
        assert!(hs.ends_with("  | otherwise = Fail\n"), "{hs}");
    }
}
