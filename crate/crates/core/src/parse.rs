//! Concrete syntax for ground programs.
//!
//! ```text
//! 0.3::smokes.                         % probabilistic fact
//! r(s).                                % certain fact (1.0)
//! cancer :- smokes, \+ healthy.        % clause
//! 0.1::trap(v1) :- p(s,v1).            % probabilistic clause
//! 0.5::h1; 0.3::h2 :- body.            % annotated disjunction
//! query(cancer).  evidence(smokes, true).  fix(b, true).  do(a, false).
//! ```
//!
//! Probabilistic clauses and annotated disjunctions are desugared into
//! facts and normal clauses while parsing.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::lpad::LpadClause;
use crate::names;
use crate::prob::Prob;
use crate::program::{Assignment, Item, Program, ProgramBuilder};

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Treat atoms that are never declared as probability-0 facts instead of
    /// rejecting them.
    pub implicit_false: bool,
    /// Accept `fixed__*` and `*__cf` atoms (needed to read back the output
    /// of the transformations).
    pub allow_reserved: bool,
}

/// A parsed program file: the program plus its directives.
#[derive(Clone, Debug)]
pub struct Source {
    pub program: Program,
    pub queries: Vec<String>,
    pub evidence: Assignment,
    pub fix: Assignment,
    pub do_: Assignment,
}

pub fn parse_program(text: &str) -> Result<Program> {
    parse_source(text, ParseOptions::default()).map(|s| s.program)
}

pub fn parse_program_with(text: &str, opts: ParseOptions) -> Result<Program> {
    parse_source(text, opts).map(|s| s.program)
}

pub fn parse_source(text: &str, opts: ParseOptions) -> Result<Source> {
    let tokens = lex(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        opts,
        builder: ProgramBuilder::new(),
        queries: Vec::new(),
        evidence: Assignment::new(),
        fix: Assignment::new(),
        do_: Assignment::new(),
        mentioned: Vec::new(),
    };
    while !p.at_end() {
        p.statement()?;
    }
    p.finish()
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Number(String),
    Atom(String),
    DoubleColon,
    Neck,
    Semi,
    Comma,
    Dot,
    Not,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, column, message: String| Error::Syntax {
        line,
        column,
        message,
    };
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let advance = |n: usize, i: &mut usize, line: &mut usize, col: &mut usize| {
            for _ in 0..n {
                if chars[*i] == '\n' {
                    *line += 1;
                    *col = 1;
                } else {
                    *col += 1;
                }
                *i += 1;
            }
        };
        let push = |out: &mut Vec<Token>, tok| {
            out.push(Token {
                tok,
                line: start_line,
                column: start_col,
            })
        };
        match c {
            c if c.is_whitespace() => advance(1, &mut i, &mut line, &mut col),
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    advance(1, &mut i, &mut line, &mut col);
                }
            }
            ':' if chars.get(i + 1) == Some(&':') => {
                push(&mut out, Tok::DoubleColon);
                advance(2, &mut i, &mut line, &mut col);
            }
            ':' if chars.get(i + 1) == Some(&'-') => {
                push(&mut out, Tok::Neck);
                advance(2, &mut i, &mut line, &mut col);
            }
            '\\' if chars.get(i + 1) == Some(&'+') => {
                push(&mut out, Tok::Not);
                advance(2, &mut i, &mut line, &mut col);
            }
            ';' => {
                push(&mut out, Tok::Semi);
                advance(1, &mut i, &mut line, &mut col);
            }
            ',' => {
                push(&mut out, Tok::Comma);
                advance(1, &mut i, &mut line, &mut col);
            }
            '.' => {
                push(&mut out, Tok::Dot);
                advance(1, &mut i, &mut line, &mut col);
            }
            '0'..='9' => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let decimal = chars.get(j) == Some(&'.') && chars.get(j + 1).is_some_and(char::is_ascii_digit);
                if decimal || chars.get(j) == Some(&'/') {
                    j += 1;
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                push(&mut out, Tok::Number(chars[i..j].iter().collect()));
                let n = j - i;
                advance(n, &mut i, &mut line, &mut col);
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let mut k = j;
                while k < chars.len() && chars[k].is_whitespace() && chars[k] != '\n' {
                    k += 1;
                }
                if chars.get(k) == Some(&'(') {
                    let mut depth = 0;
                    j = k;
                    loop {
                        match chars.get(j) {
                            None => return Err(err(start_line, start_col, "unclosed `(`".into())),
                            Some('(') => depth += 1,
                            Some(')') => {
                                depth -= 1;
                                if depth == 0 {
                                    j += 1;
                                    break;
                                }
                            }
                            Some('.') | Some('\n') if depth > 0 && !is_inside_number(&chars, j) => {
                                return Err(err(start_line, start_col, "unclosed `(`".into()))
                            }
                            _ => {}
                        }
                        j += 1;
                    }
                }
                push(&mut out, Tok::Atom(chars[i..j].iter().collect()));
                let n = j - i;
                advance(n, &mut i, &mut line, &mut col);
            }
            other => return Err(err(line, col, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

fn is_inside_number(chars: &[char], j: usize) -> bool {
    chars[j] == '.'
        && j > 0
        && chars[j - 1].is_ascii_digit()
        && chars.get(j + 1).is_some_and(char::is_ascii_digit)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    opts: ParseOptions,
    builder: ProgramBuilder,
    queries: Vec<String>,
    evidence: Assignment,
    fix: Assignment,
    do_: Assignment,
    /// Every atom named in the source, with its position, for the
    /// declaration check.
    mentioned: Vec<(String, usize, usize)>,
}

impl Parser {
    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn here(&self) -> (usize, usize) {
        self.tokens
            .get(self.pos)
            .or(self.tokens.last())
            .map_or((1, 1), |t| (t.line, t.column))
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        let (line, column) = self.here();
        Err(Error::Syntax {
            line,
            column,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn atom(&mut self) -> Result<String> {
        let (line, column) = self.here();
        match self.bump() {
            Some(Tok::Atom(raw)) => {
                let name = names::canonical_atom(&raw).ok_or(Error::Syntax {
                    line,
                    column,
                    message: format!("malformed atom `{raw}`"),
                })?;
                if !self.opts.allow_reserved && names::is_reserved(&name) {
                    return Err(Error::ReservedName(name));
                }
                self.mentioned.push((name.clone(), line, column));
                Ok(name)
            }
            _ => {
                self.pos -= 1;
                self.error("expected an atom")
            }
        }
    }

    fn prob(&mut self) -> Result<Prob> {
        let (line, column) = self.here();
        match self.bump() {
            Some(Tok::Number(s)) => s.parse().map_err(|e: Error| match e {
                Error::ProbabilityRange(_) => e,
                _ => Error::Syntax {
                    line,
                    column,
                    message: format!("bad probability `{s}`"),
                },
            }),
            _ => {
                self.pos -= 1;
                self.error("expected a probability")
            }
        }
    }

    fn body(&mut self) -> Result<Vec<(String, bool)>> {
        let mut body = Vec::new();
        loop {
            let positive = if self.peek() == Some(&Tok::Not) {
                self.pos += 1;
                false
            } else {
                true
            };
            // `true` is the empty conjunction
            if positive && matches!(self.peek(), Some(Tok::Atom(raw)) if raw == "true") {
                self.pos += 1;
            } else {
                body.push((self.atom()?, positive));
            }
            if self.peek() == Some(&Tok::Comma) {
                self.pos += 1;
            } else {
                return Ok(body);
            }
        }
    }

    fn statement(&mut self) -> Result<()> {
        match self.peek() {
            Some(Tok::Number(_)) => self.probabilistic_statement(),
            Some(Tok::Atom(raw)) => {
                let raw = raw.clone();
                if let Some(done) = self.directive(&raw)? {
                    return Ok(done);
                }
                let head = self.atom()?;
                match self.bump() {
                    Some(Tok::Dot) => {
                        self.builder.add_fact(&head, Prob::one())?;
                        Ok(())
                    }
                    Some(Tok::Neck) => {
                        let body = self.body()?;
                        self.expect(Tok::Dot, "`.` after clause body")?;
                        let refs: Vec<(&str, bool)> = body.iter().map(|(n, v)| (n.as_str(), *v)).collect();
                        self.builder.add_clause(&head, &refs);
                        Ok(())
                    }
                    _ => {
                        self.pos -= 1;
                        self.error("expected `.` or `:-`")
                    }
                }
            }
            _ => self.error("expected a fact, clause or directive"),
        }
    }

    fn probabilistic_statement(&mut self) -> Result<()> {
        let mut heads = Vec::new();
        loop {
            let p = self.prob()?;
            self.expect(Tok::DoubleColon, "`::`")?;
            heads.push((self.atom()?, p));
            if self.peek() == Some(&Tok::Semi) {
                self.pos += 1;
            } else {
                break;
            }
        }
        let body = if self.peek() == Some(&Tok::Neck) {
            self.pos += 1;
            self.body()?
        } else {
            Vec::new()
        };
        self.expect(Tok::Dot, "`.`")?;
        if heads.len() == 1 && body.is_empty() {
            let (name, p) = heads.pop().expect("one head");
            self.builder.add_fact(&name, p)?;
            return Ok(());
        }
        let clause = LpadClause::new(heads, body)?;
        crate::lpad::desugar_into(&mut self.builder, &clause)?;
        Ok(())
    }

    /// `query(a).`, `evidence(a, true).`, `fix(a, false).`, `do(a, true).`
    fn directive(&mut self, raw: &str) -> Result<Option<()>> {
        let Some((name, rest)) = raw.split_once('(') else {
            return Ok(None);
        };
        let name = name.trim();
        if !matches!(name, "query" | "evidence" | "fix" | "do") {
            return Ok(None);
        }
        if self.tokens.get(self.pos + 1).map(|t| &t.tok) != Some(&Tok::Dot) {
            return Ok(None);
        }
        let (line, column) = self.here();
        let inner = &rest[..rest.len() - 1];
        let args = crate::program::split_top_level(inner);
        let syntax = |message: String| Error::Syntax {
            line,
            column,
            message,
        };
        let atom = |s: &str| -> Result<String> {
            names::canonical_atom(s).ok_or_else(|| syntax(format!("malformed atom `{}`", s.trim())))
        };
        match (name, args.as_slice()) {
            ("query", [a]) => {
                let a = atom(a)?;
                self.mentioned.push((a.clone(), line, column));
                self.queries.push(a);
            }
            ("evidence" | "fix" | "do", [a, v]) => {
                let a = atom(a)?;
                let v = match v.trim() {
                    "true" => true,
                    "false" => false,
                    other => return Err(syntax(format!("expected true or false, got `{other}`"))),
                };
                self.mentioned.push((a.clone(), line, column));
                let target = match name {
                    "evidence" => &mut self.evidence,
                    "fix" => &mut self.fix,
                    _ => &mut self.do_,
                };
                target.insert(&a, v)?;
            }
            _ => return Err(syntax(format!("malformed `{name}` directive"))),
        }
        self.pos += 2;
        Ok(Some(()))
    }

    fn finish(mut self) -> Result<Source> {
        for (name, line, column) in std::mem::take(&mut self.mentioned) {
            if !self.builder.contains(&name) {
                if self.opts.implicit_false {
                    self.builder.add_fact(&name, Prob::zero())?;
                } else {
                    return Err(Error::Syntax {
                        line,
                        column,
                        message: format!("unknown atom `{name}` in directive"),
                    });
                }
            }
        }
        let undeclared: Vec<String> = {
            let b = &self.builder;
            let mut declared = vec![false; b.atom_len()];
            for f in b.facts() {
                declared[f.atom.index()] = true;
            }
            for c in b.clauses() {
                declared[c.head.index()] = true;
            }
            (0..declared.len())
                .filter(|&i| !declared[i])
                .map(|i| b.name(crate::program::AtomId(i as u32)).to_string())
                .collect()
        };
        for name in undeclared {
            if self.opts.implicit_false {
                self.builder.add_fact(&name, Prob::zero())?;
            } else {
                return Err(Error::UndeclaredAtom(name));
            }
        }
        let program = self.builder.build()?;
        program.topological_order()?;
        Ok(Source {
            program,
            queries: self.queries,
            evidence: self.evidence,
            fix: self.fix,
            do_: self.do_,
        })
    }
}

/// Prints facts and clauses in source order, one per line.
pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    for item in p.source_order() {
        match *item {
            Item::Fact(i) => {
                let f = &p.facts()[i];
                let _ = writeln!(out, "{}::{}.", f.prob, p.name(f.atom));
            }
            Item::Clause(i) => {
                let c = &p.clauses()[i];
                let body: Vec<String> = c.body.iter().map(|l| p.literal_text(l)).collect();
                let body = if body.is_empty() { "true".to_string() } else { body.join(", ") };
                let _ = writeln!(out, "{} :- {}.", p.name(c.head), body);
            }
        }
    }
    out
}

/// [`print_program`] followed by the directives.
pub fn print_source(s: &Source) -> String {
    let mut out = print_program(&s.program);
    for q in &s.queries {
        let _ = writeln!(out, "query({q}).");
    }
    for (kind, a) in [("evidence", &s.evidence), ("fix", &s.fix), ("do", &s.do_)] {
        for (n, v) in a.iter() {
            let _ = writeln!(out, "{kind}({n}, {v}).");
        }
    }
    out
}
