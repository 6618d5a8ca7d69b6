//! Source dialect: clauses, queries and `mode` / `kind` / `delay` directives.
//!
//! ```text
//! :- mode append(in,in,out).
//! :- kind append(nontest).
//! append([],L,L).
//! append([H|T],L,[H|R]) :- append(T,L,R).
//! ?- append([1],[2],X).
//! ```
//!
//! `%` starts a line comment, `/* */` a block comment. Double-quoted strings
//! are atoms. The comparison built-ins `== \== < =< > >=` and the matching
//! built-in `=` are written infix in goal position.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::term::{write_atom, write_term, Term, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Mode {
    In,
    Out,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Kind {
    Test,
    NonTest,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Test => "test",
            Kind::NonTest => "nontest",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PredKey {
    pub name: Arc<str>,
    pub arity: usize,
}

impl PredKey {
    pub fn new(name: &str, arity: usize) -> Self {
        PredKey { name: name.into(), arity }
    }
}

impl fmt::Display for PredKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

impl Serialize for PredKey {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Built-in predicates. All are test predicates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Builtin {
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    /// `Pattern = Expr`: matches the (ground) right side against the
    /// left-side pattern, binding the pattern's variables.
    Match,
}

impl Builtin {
    pub const ALL: [Builtin; 7] = [
        Builtin::Eq,
        Builtin::Neq,
        Builtin::Lt,
        Builtin::Le,
        Builtin::Gt,
        Builtin::Ge,
        Builtin::Match,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Builtin::Eq => "==",
            Builtin::Neq => "\\==",
            Builtin::Lt => "<",
            Builtin::Le => "=<",
            Builtin::Gt => ">",
            Builtin::Ge => ">=",
            Builtin::Match => "=",
        }
    }

    pub fn from_symbol(name: &str, arity: usize) -> Option<Builtin> {
        if arity != 2 {
            return None;
        }
        Builtin::ALL.into_iter().find(|b| b.symbol() == name)
    }

    pub fn modes(self) -> [Mode; 2] {
        match self {
            Builtin::Match => [Mode::Out, Mode::In],
            _ => [Mode::In, Mode::In],
        }
    }
}

/// A predicate applied to arguments: a clause head or a body goal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub pred: Arc<str>,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, args: Vec<Term>) -> Self {
        Atom { pred: pred.into(), args }
    }

    pub fn key(&self) -> PredKey {
        PredKey { name: self.pred.clone(), arity: self.args.len() }
    }

    pub fn builtin(&self) -> Option<Builtin> {
        Builtin::from_symbol(&self.pred, self.args.len())
    }

    pub fn var_occurrences<'a>(&'a self, out: &mut Vec<&'a Var>) {
        for a in &self.args {
            a.var_occurrences(out);
        }
    }

    pub fn map_vars(&self, f: &mut impl FnMut(&Var) -> Term) -> Atom {
        Atom { pred: self.pred.clone(), args: self.args.iter().map(|t| t.map_vars(f)).collect() }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub(crate) fn write_with(
        &self,
        f: &mut impl fmt::Write,
        name_var: &dyn Fn(&Var) -> String,
    ) -> fmt::Result {
        if let Some(b) = self.builtin() {
            write_term(f, &self.args[0], name_var)?;
            write!(f, " {} ", b.symbol())?;
            return write_term(f, &self.args[1], name_var);
        }
        write_atom(f, &self.pred)?;
        if !self.args.is_empty() {
            f.write_char('(')?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_char(',')?;
                }
                write_term(f, a, name_var)?;
            }
            f.write_char(')')?;
        }
        Ok(())
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_with(f, &|v| v.name.to_string())
    }
}

impl Serialize for Atom {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub head: Atom,
    pub body: Vec<Atom>,
}

impl Clause {
    pub fn max_var_id(&self) -> Option<u32> {
        let mut occ = Vec::new();
        self.head.var_occurrences(&mut occ);
        for b in &self.body {
            b.var_occurrences(&mut occ);
        }
        occ.iter().map(|v| v.id).max()
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            f.write_str(" :- ")?;
            write_goals(f, &self.body)?;
        }
        f.write_char('.')
    }
}

fn write_goals(f: &mut impl fmt::Write, goals: &[Atom]) -> fmt::Result {
    for (i, g) in goals.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{g}")?;
    }
    Ok(())
}

/// A headless clause. `vars` lists the named query variables in order of
/// first occurrence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub atoms: Vec<Atom>,
    pub vars: Vec<Var>,
}

impl Query {
    pub fn from_atoms(atoms: Vec<Atom>) -> Self {
        let mut occ = Vec::new();
        for a in &atoms {
            a.var_occurrences(&mut occ);
        }
        let mut vars: Vec<Var> = Vec::new();
        for v in occ {
            if !v.is_anonymous() && !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        Query { atoms, vars }
    }

    pub fn max_var_id(&self) -> Option<u32> {
        let mut occ = Vec::new();
        for a in &self.atoms {
            a.var_occurrences(&mut occ);
        }
        occ.iter().map(|v| v.id).max()
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_goals(f, &self.atoms)?;
        f.write_char('.')
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeDecl {
    pub pred: PredKey,
    pub modes: Vec<Mode>,
}

impl ModeDecl {
    pub fn inputs(&self) -> impl Iterator<Item = usize> + '_ {
        self.modes.iter().enumerate().filter(|(_, m)| **m == Mode::In).map(|(i, _)| i)
    }

    pub fn outputs(&self) -> impl Iterator<Item = usize> + '_ {
        self.modes.iter().enumerate().filter(|(_, m)| **m == Mode::Out).map(|(i, _)| i)
    }
}

/// Test / non-test classification. Built-ins are always test; undeclared
/// user predicates default to test.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Partitioning {
    explicit: IndexMap<Arc<str>, Kind>,
}

impl Partitioning {
    pub fn kind(&self, key: &PredKey) -> Kind {
        if Builtin::from_symbol(&key.name, key.arity).is_some() {
            return Kind::Test;
        }
        self.explicit.get(&key.name).copied().unwrap_or(Kind::Test)
    }

    pub fn set(&mut self, name: &str, kind: Kind) {
        self.explicit.insert(name.into(), kind);
    }

    pub fn explicit(&self) -> impl Iterator<Item = (&str, Kind)> {
        self.explicit.iter().map(|(k, v)| (&**k, *v))
    }
}

/// `:- delay p(X,Y) until ground(X), ground(Y).` Parsed and kept, never
/// executed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelayDecl {
    pub atom: Atom,
    pub conditions: Vec<Atom>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    /// Clause groups keyed by predicate, in order of first definition.
    pub predicates: IndexMap<PredKey, Vec<Clause>>,
    pub modes: IndexMap<PredKey, ModeDecl>,
    pub partition: Partitioning,
    pub queries: Vec<Query>,
    pub delays: Vec<DelayDecl>,
    pub warnings: Vec<String>,
}

/// Identifies one clause: predicate plus 1-based position in its group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ClauseRef {
    pub pred: PredKey,
    pub index: usize,
}

impl fmt::Display for ClauseRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} clause {}", self.pred, self.index)
    }
}

impl Program {
    pub fn clauses(&self, key: &PredKey) -> &[Clause] {
        self.predicates.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn all_clauses(&self) -> impl Iterator<Item = (ClauseRef, &Clause)> {
        self.predicates.iter().flat_map(|(key, cs)| {
            cs.iter()
                .enumerate()
                .map(move |(i, c)| (ClauseRef { pred: key.clone(), index: i + 1 }, c))
        })
    }

    pub fn clause_count(&self) -> usize {
        self.predicates.values().map(Vec::len).sum()
    }

    pub fn kind(&self, key: &PredKey) -> Kind {
        self.partition.kind(key)
    }

    /// Modes of an atom's argument positions, for user predicates and built-ins.
    pub fn atom_modes(&self, atom: &Atom) -> Option<Vec<Mode>> {
        if let Some(b) = atom.builtin() {
            return Some(b.modes().to_vec());
        }
        self.modes.get(&atom.key()).map(|m| m.modes.clone())
    }

    /// Input and output argument terms of an atom.
    pub fn split_args<'a>(&self, atom: &'a Atom) -> Option<(Vec<&'a Term>, Vec<&'a Term>)> {
        let modes = self.atom_modes(atom)?;
        let mut ins = Vec::new();
        let mut outs = Vec::new();
        for (m, t) in modes.iter().zip(&atom.args) {
            match m {
                Mode::In => ins.push(t),
                Mode::Out => outs.push(t),
            }
        }
        Some((ins, outs))
    }

    /// A copy with every user predicate declared test.
    pub fn with_all_test(&self) -> Program {
        let mut p = self.clone();
        let names: Vec<Arc<str>> = p
            .predicates
            .keys()
            .chain(p.modes.keys())
            .map(|k| k.name.clone())
            .collect();
        for n in names {
            p.partition.set(&n, Kind::Test);
        }
        p
    }

    /// Checks that every atom has a declared mode and every called predicate
    /// is defined.
    pub fn validate(&self) -> Result<(), ProgramError> {
        let check = |atom: &Atom| -> Result<(), ProgramError> {
            if atom.builtin().is_some() {
                return Ok(());
            }
            let key = atom.key();
            if self.modes.contains_key(&key) {
                return Ok(());
            }
            if let Some(other) = self.modes.keys().find(|k| k.name == key.name) {
                return Err(ProgramError::Mode(format!(
                    "mode for {} has arity {}, but {} is used with arity {}",
                    other.name, other.arity, key.name, key.arity
                )));
            }
            Err(ProgramError::Mode(format!("missing mode declaration for {key}")))
        };
        for (_, c) in self.all_clauses() {
            check(&c.head)?;
            for b in &c.body {
                check(b)?;
            }
        }
        for q in &self.queries {
            for a in &q.atoms {
                check(a)?;
            }
        }
        for (_, c) in self.all_clauses() {
            for b in &c.body {
                if b.builtin().is_none() && !self.predicates.contains_key(&b.key()) {
                    return Err(ProgramError::Undefined(b.key()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProgramError {
    #[error("parse error at {line}:{col}: {message}")]
    Parse { line: usize, col: usize, message: String },
    #[error("mode error: {0}")]
    Mode(String),
    #[error("undefined predicate {0}")]
    Undefined(PredKey),
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Var(String),
    Name(String),
    Quoted(String),
    Str(String),
    Int(i64),
    Punct(&'static str),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const PUNCTS: [&str; 16] =
    ["\\==", ":-", "?-", "==", "=<", ">=", "(", ")", "[", "]", "|", ",", "<", ">", "=", "-"];

fn lex(text: &str) -> Result<Vec<Token>, ProgramError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, message: String| ProgramError::Parse { line, col, message };

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            let (l0, c0) = (line, col);
            bump!();
            bump!();
            loop {
                if i >= chars.len() {
                    return Err(err(l0, c0, "unterminated block comment".into()));
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    bump!();
                    bump!();
                    break;
                }
                bump!();
            }
            continue;
        }
        let (tl, tc) = (line, col);
        let push = |toks: &mut Vec<Token>, tok| toks.push(Token { tok, line: tl, col: tc });

        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                bump!();
            }
            let is_var = c.is_ascii_uppercase() || c == '_';
            if is_var {
                while i < chars.len() && chars[i] == '\'' {
                    bump!();
                }
            }
            let s: String = chars[start..i].iter().collect();
            push(&mut toks, if is_var { Tok::Var(s) } else { Tok::Name(s) });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                bump!();
            }
            let s: String = chars[start..i].iter().collect();
            let n = s.parse::<i64>().map_err(|_| err(tl, tc, format!("integer out of range: {s}")))?;
            push(&mut toks, Tok::Int(n));
            continue;
        }
        if c == '\'' || c == '"' {
            let quote = c;
            bump!();
            let mut s = String::new();
            loop {
                if i >= chars.len() {
                    return Err(err(tl, tc, "unterminated quoted atom".into()));
                }
                let d = chars[i];
                if d == quote {
                    bump!();
                    break;
                }
                if d == '\\' && i + 1 < chars.len() {
                    bump!();
                    let e = chars[i];
                    s.push(match e {
                        'n' => '\n',
                        't' => '\t',
                        other => other,
                    });
                    bump!();
                    continue;
                }
                s.push(d);
                bump!();
            }
            push(&mut toks, if quote == '"' { Tok::Str(s) } else { Tok::Quoted(s) });
            continue;
        }
        if c == '.' {
            let next = chars.get(i + 1).copied();
            if next.is_none() || next.is_some_and(|n| n.is_whitespace() || n == '%') {
                bump!();
                push(&mut toks, Tok::End);
                continue;
            }
            return Err(err(tl, tc, "unexpected '.'".into()));
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        if let Some(p) = PUNCTS.iter().find(|p| rest.starts_with(**p)) {
            for _ in 0..p.chars().count() {
                bump!();
            }
            push(&mut toks, Tok::Punct(p));
            continue;
        }
        return Err(err(tl, tc, format!("unexpected character '{c}'")));
    }
    toks.push(Token { tok: Tok::End, line, col });
    // the trailing sentinel End lets the parser report "unexpected end of input"
    toks.push(Token { tok: Tok::Punct(""), line, col });
    Ok(toks)
}

// ---------------------------------------------------------------------------
// Parser

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    scope: HashMap<String, Var>,
    next_id: u32,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ProgramError> {
        Ok(Parser { toks: lex(text)?, pos: 0, scope: HashMap::new(), next_id: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn at_eof(&self) -> bool {
        // the final two tokens are the synthetic End + sentinel
        self.pos + 2 >= self.toks.len()
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ProgramError> {
        let t = &self.toks[self.pos.min(self.toks.len() - 1)];
        Err(ProgramError::Parse { line: t.line, col: t.col, message: message.into() })
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, p: &str) -> bool {
        if matches!(self.peek(), Tok::Punct(q) if *q == p) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> Result<(), ProgramError> {
        if self.eat(p) {
            Ok(())
        } else {
            self.error(format!("expected '{p}', found {}", describe(self.peek())))
        }
    }

    fn expect_end(&mut self) -> Result<(), ProgramError> {
        if matches!(self.peek(), Tok::End) && !self.at_eof() {
            self.advance();
            Ok(())
        } else {
            self.error(format!("expected '.', found {}", describe(self.peek())))
        }
    }

    fn reset_scope(&mut self) {
        self.scope.clear();
        self.next_id = 0;
    }

    fn fresh(&mut self, name: &str) -> Var {
        let v = Var::new(name, self.next_id);
        self.next_id += 1;
        v
    }

    fn variable(&mut self, name: String) -> Term {
        if name == "_" {
            return Term::Var(self.fresh("_"));
        }
        if let Some(v) = self.scope.get(&name) {
            return Term::Var(v.clone());
        }
        let v = self.fresh(&name);
        self.scope.insert(name, v.clone());
        Term::Var(v)
    }

    fn term(&mut self) -> Result<Term, ProgramError> {
        match self.advance() {
            Tok::Var(name) => Ok(self.variable(name)),
            Tok::Int(n) => Ok(Term::Int(n)),
            Tok::Punct("-") => match self.advance() {
                Tok::Int(n) => Ok(Term::Int(-n)),
                _ => {
                    self.pos -= 1;
                    self.error("expected an integer after '-'")
                }
            },
            Tok::Str(s) => Ok(Term::Atom(s.into())),
            Tok::Name(name) | Tok::Quoted(name) => {
                if self.eat("(") {
                    let args = self.args(")")?;
                    Ok(Term::compound(&name, args))
                } else {
                    Ok(Term::Atom(name.into()))
                }
            }
            Tok::Punct("[") => {
                if self.eat("]") {
                    return Ok(Term::nil());
                }
                let mut items = vec![self.term()?];
                while self.eat(",") {
                    items.push(self.term()?);
                }
                let tail = if self.eat("|") { Some(self.term()?) } else { None };
                self.expect("]")?;
                Ok(Term::list(items, tail))
            }
            other => {
                self.pos -= 1;
                self.error(format!("expected a term, found {}", describe(&other)))
            }
        }
    }

    fn args(&mut self, close: &str) -> Result<Vec<Term>, ProgramError> {
        let mut args = vec![self.term()?];
        while self.eat(",") {
            args.push(self.term()?);
        }
        self.expect(close)?;
        Ok(args)
    }

    fn goal(&mut self) -> Result<Atom, ProgramError> {
        let left = self.term()?;
        if let Tok::Punct(op) = self.peek() {
            if let Some(b) = Builtin::from_symbol(op, 2) {
                self.advance();
                let right = self.term()?;
                return Ok(Atom::new(b.symbol(), vec![left, right]));
            }
        }
        term_to_atom(left).or_else(|t| self.error(format!("{t} is not a callable goal")))
    }

    fn goals(&mut self) -> Result<Vec<Atom>, ProgramError> {
        let mut gs = vec![self.goal()?];
        while self.eat(",") {
            gs.push(self.goal()?);
        }
        Ok(gs)
    }
}

fn term_to_atom(t: Term) -> Result<Atom, Term> {
    match t {
        Term::Atom(a) => Ok(Atom { pred: a, args: Vec::new() }),
        Term::Compound(f, args) => Ok(Atom { pred: f, args }),
        other => Err(other),
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Var(v) => format!("variable {v}"),
        Tok::Name(n) | Tok::Quoted(n) => format!("atom {n}"),
        Tok::Str(s) => format!("string \"{s}\""),
        Tok::Int(n) => format!("integer {n}"),
        Tok::Punct("") => "end of input".into(),
        Tok::Punct(p) => format!("'{p}'"),
        Tok::End => "'.'".into(),
    }
}

fn keyword(t: &Term) -> Option<String> {
    match t {
        Term::Atom(a) => Some(a.to_ascii_lowercase()),
        Term::Var(v) => Some(v.name.to_ascii_lowercase()),
        _ => None,
    }
}

/// Parses a whole source file.
pub fn parse_program(text: &str) -> Result<Program, ProgramError> {
    let mut p = Parser::new(text)?;
    let mut prog = Program::default();
    while !p.at_eof() {
        p.reset_scope();
        if p.eat(":-") {
            directive(&mut p, &mut prog)?;
        } else if p.eat("?-") {
            let atoms = p.goals()?;
            p.expect_end()?;
            prog.queries.push(Query::from_atoms(atoms));
        } else {
            let head = p.goal()?;
            if head.builtin().is_some() {
                return p.error(format!("cannot redefine built-in {}", head.pred));
            }
            let body = if p.eat(":-") { p.goals()? } else { Vec::new() };
            p.expect_end()?;
            prog.predicates.entry(head.key()).or_default().push(Clause { head, body });
        }
    }
    prog.validate()?;
    Ok(prog)
}

fn directive(p: &mut Parser, prog: &mut Program) -> Result<(), ProgramError> {
    let word = match p.advance() {
        Tok::Name(w) => w,
        other => {
            p.pos -= 1;
            return p.error(format!("expected a directive, found {}", describe(&other)));
        }
    };
    match word.as_str() {
        "mode" => {
            let atom = p.goal()?;
            p.expect_end()?;
            let mut modes = Vec::new();
            for a in &atom.args {
                match keyword(a).as_deref() {
                    Some("in") => modes.push(Mode::In),
                    Some("out") => modes.push(Mode::Out),
                    _ => return Err(ProgramError::Mode(format!("bad mode '{a}' in {atom}"))),
                }
            }
            let key = atom.key();
            if prog.modes.contains_key(&key) {
                return Err(ProgramError::Mode(format!("duplicate mode declaration for {key}")));
            }
            prog.modes.insert(key.clone(), ModeDecl { pred: key, modes });
        }
        "kind" => {
            let atom = p.goal()?;
            p.expect_end()?;
            let kind = match atom.args.as_slice() {
                [k] => match keyword(k).as_deref() {
                    Some("test") => Kind::Test,
                    Some("nontest") => Kind::NonTest,
                    _ => return p.error(format!("kind must be test or nontest in {atom}")),
                },
                _ => return p.error("expected kind p(test) or kind p(nontest)"),
            };
            prog.partition.set(&atom.pred, kind);
        }
        "delay" => {
            let atom = p.goal()?;
            match p.advance() {
                Tok::Name(w) if w == "until" => {}
                _ => {
                    p.pos -= 1;
                    return p.error("expected 'until' in delay declaration");
                }
            }
            let conditions = p.goals()?;
            p.expect_end()?;
            prog.warnings.push(format!("delay declaration for {} ignored", atom.key()));
            prog.delays.push(DelayDecl { atom, conditions });
        }
        other => return p.error(format!("unknown directive '{other}'")),
    }
    Ok(())
}

/// Parses a comma-separated goal sequence ending in `.`.
pub fn parse_query(text: &str) -> Result<Query, ProgramError> {
    let mut p = Parser::new(text)?;
    p.eat("?-");
    let atoms = p.goals()?;
    p.expect_end()?;
    if !p.at_eof() {
        return p.error("trailing input after query");
    }
    Ok(Query::from_atoms(atoms))
}

/// Source text for a program; parses back to an equal program.
pub fn print_program(prog: &Program) -> String {
    let mut out = String::new();
    for m in prog.modes.values() {
        out.push_str(":- mode ");
        let _ = write_atom(&mut out, &m.pred.name);
        if !m.modes.is_empty() {
            let ms: Vec<&str> =
                m.modes.iter().map(|m| if *m == Mode::In { "in" } else { "out" }).collect();
            let _ = write!(out, "({})", ms.join(","));
        }
        out.push_str(".\n");
    }
    for (name, kind) in prog.partition.explicit() {
        out.push_str(":- kind ");
        let _ = write_atom(&mut out, name);
        let _ = writeln!(out, "({kind}).");
    }
    for d in &prog.delays {
        let _ = write!(out, ":- delay {} until ", d.atom);
        let _ = write_goals(&mut out, &d.conditions);
        out.push_str(".\n");
    }
    for (_, c) in prog.all_clauses() {
        let _ = writeln!(out, "{c}");
    }
    for q in &prog.queries {
        let _ = writeln!(out, "?- {q}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const APPEND: &str = "
        :- mode append(in,in,out).
        append([],L,L).
        append([H|T],L,[H|R]) :- append(T,L,R).
    ";

    #[test]
    fn parses_append() {
        let p = parse_program(APPEND).unwrap();
        let key = PredKey::new("append", 3);
        assert_eq!(p.clauses(&key).len(), 2);
        assert_eq!(p.modes[&key].modes, vec![Mode::In, Mode::In, Mode::Out]);
        assert_eq!(p.kind(&key), Kind::Test);
    }

    #[test]
    fn empty_file() {
        let p = parse_program("").unwrap();
        assert_eq!(p.clause_count(), 0);
        assert!(p.modes.is_empty());
        let p = parse_program("% only a comment\n").unwrap();
        assert_eq!(p.clause_count(), 0);
    }

    #[test]
    fn malformed_clause() {
        let e = parse_program("p(X :-.").unwrap_err();
        assert!(matches!(e, ProgramError::Parse { line: 1, .. }), "{e:?}");
    }

    #[test]
    fn mode_errors() {
        assert!(matches!(parse_program("p(a)."), Err(ProgramError::Mode(_))));
        assert!(matches!(
            parse_program(":- mode p(in).\n:- mode p(in).\np(a)."),
            Err(ProgramError::Mode(_))
        ));
        let e = parse_program(":- mode p(in).\np(a,b).").unwrap_err();
        assert!(e.to_string().contains("arity"), "{e}");
        assert!(matches!(
            parse_program(":- mode p(in).\n:- mode q(in).\np(X) :- q(X)."),
            Err(ProgramError::Undefined(_))
        ));
    }

    #[test]
    fn anonymous_variables_are_distinct() {
        let p = parse_program(":- mode p(in,in).\np(_,_).").unwrap();
        let c = &p.clauses(&PredKey::new("p", 2))[0];
        let ids: Vec<u32> = c.head.args.iter().map(|t| t.as_var().unwrap().id).collect();
        assert_ne!(ids[0], ids[1]);
    }

    #[test]
    fn queries() {
        let q = parse_query("append([1,2],[3],X).").unwrap();
        assert_eq!(q.atoms.len(), 1);
        assert_eq!(q.vars.iter().map(|v| &*v.name).collect::<Vec<_>>(), ["X"]);

        let q = parse_query("del_max([3,1,3,2], Zs).").unwrap();
        assert_eq!(q.vars.iter().map(|v| &*v.name).collect::<Vec<_>>(), ["Zs"]);

        let q = parse_query("member(1,[2,1]), append(A,B,[1]).").unwrap();
        assert_eq!(q.atoms.len(), 2);
        assert_eq!(q.vars.iter().map(|v| &*v.name).collect::<Vec<_>>(), ["A", "B"]);

        assert!(parse_query("p(X)").is_err());
    }

    #[test]
    fn strings_are_atoms_and_builtins_are_infix() {
        let src = ":- mode p(in,out).\np(X, \"c\") :- X == \"b\", X \\== a, 1 =< 2.";
        let p = parse_program(src).unwrap();
        let c = &p.clauses(&PredKey::new("p", 2))[0];
        assert_eq!(c.head.args[1], Term::atom("c"));
        assert_eq!(c.body[0].builtin(), Some(Builtin::Eq));
        assert_eq!(c.body[1].builtin(), Some(Builtin::Neq));
        assert_eq!(c.body[2].builtin(), Some(Builtin::Le));
        assert_eq!(c.to_string(), "p(X,c) :- X == b, X \\== a, 1 =< 2.");
    }

    #[test]
    fn directives_and_round_trip() {
        let src = "
            :- mode sup(in,in,out).
            :- kind sup(nontest).
            :- delay sup(X,Y,_) until ground(X), ground(Y).
            sup(X,Y,X) :- X >= Y.
            sup(X,Y,Y) :- X < Y.
            ?- sup(3, -4, M).
        ";
        let p = parse_program(src).unwrap();
        assert_eq!(p.kind(&PredKey::new("sup", 3)), Kind::NonTest);
        assert_eq!(p.delays.len(), 1);
        assert_eq!(p.warnings.len(), 1);
        assert_eq!(p.queries.len(), 1);
        let printed = print_program(&p);
        assert_eq!(parse_program(&printed).unwrap(), p, "{printed}");
    }

    #[test]
    fn primed_variables() {
        let src = ":- mode app(in,in,out).\napp([H|T],L,[H|T']) :- app(T,L,T').";
        let p = parse_program(src).unwrap();
        let c = &p.clauses(&PredKey::new("app", 3))[0];
        assert_eq!(c.to_string(), "app([H|T],L,[H|T']) :- app(T,L,T').");
    }
}
