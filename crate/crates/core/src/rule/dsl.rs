//! Text syntax for rules and grammars.
//!
//! ```text
//! # comment
//! input-alphabet "zup" "fep" "lug"
//! output-alphabet "green" "rose"
//! class-domain WORD = {"zup", "fep"}
//! forall x1 in WORD, x2 in SIGMA+: T(x1 "lug" x2) = T(x2) T(x1) T(x2) T(x1) T(x1)
//! T("zup") = "green"
//! ```
//!
//! Statements end at a newline or `;` (newlines inside `(...)` and `{...}` are
//! ignored). A quoted string may hold several space-separated tokens. Builtin
//! domains are `SIGMA*`, `SIGMA+`, `SIGMA1` and their `LAMBDA` twins; either
//! spelling resolves against the alphabet of the side the variable lives on.
//! Variables inside `T(...)` are input variables, all others are output
//! variables. Without alphabet declarations, each alphabet is the set of tokens
//! seen on its side, in order of first appearance.

use std::fmt;
use std::sync::Arc;

use super::{validate_ggr, GgrRule, Grammar, GtrRule, Item, Pattern, Span, Sym, VarDecl};
use crate::alphabet::{Alphabet, TokenId};
use crate::automaton::regex_words;
use crate::domain::VariableDomain;
use crate::error::{Error, Result};

/// A domain as written in the DSL, before resolution against an alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DomainSpec {
    Star,
    Plus,
    One,
    Finite(Vec<Vec<String>>),
    Regex(String),
}

impl DomainSpec {
    fn spelled(&self, prefix: &str) -> String {
        match self {
            DomainSpec::Star => format!("{prefix}*"),
            DomainSpec::Plus => format!("{prefix}+"),
            DomainSpec::One => format!("{prefix}1"),
            DomainSpec::Finite(members) => {
                let items: Vec<String> = members
                    .iter()
                    .map(|m| format!("\"{}\"", m.join(" ")))
                    .collect();
                format!("{{{}}}", items.join(", "))
            }
            DomainSpec::Regex(p) => format!("regex({p})"),
        }
    }

    fn tokens(&self) -> Result<Vec<String>> {
        Ok(match self {
            DomainSpec::Finite(members) => members.iter().flatten().cloned().collect(),
            DomainSpec::Regex(p) => regex_words(p)?,
            _ => Vec::new(),
        })
    }

    /// Resolves against an alphabet. `pos` is used for error positions.
    pub fn resolve(
        &self,
        alphabet: &Arc<Alphabet>,
        pos: Span,
        which: &'static str,
    ) -> Result<VariableDomain> {
        Ok(match self {
            DomainSpec::Star => VariableDomain::all(Arc::clone(alphabet)),
            DomainSpec::Plus => VariableDomain::non_empty(Arc::clone(alphabet)),
            DomainSpec::One => VariableDomain::single(Arc::clone(alphabet)),
            DomainSpec::Finite(members) => {
                let mut encoded = Vec::with_capacity(members.len());
                for m in members {
                    let mut w = Vec::with_capacity(m.len());
                    for t in m {
                        w.push(alphabet.id(t).ok_or_else(|| Error::TokenNotInAlphabet {
                            line: pos.line,
                            col: pos.col,
                            token: t.clone(),
                            which,
                        })?);
                    }
                    encoded.push(w);
                }
                VariableDomain::finite(Arc::clone(alphabet), encoded)
            }
            DomainSpec::Regex(p) => {
                VariableDomain::regex(Arc::clone(alphabet), p).map_err(|e| Error::Syntax {
                    line: pos.line,
                    col: pos.col,
                    msg: e.to_string(),
                })?
            }
        })
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spelled("SIGMA"))
    }
}

/// A `class-domain NAME = ...` declaration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedDomain {
    pub name: String,
    pub spec: DomainSpec,
}

/// Everything a rule file declares. Rules are kept in file order.
#[derive(Debug, Clone)]
pub struct RuleFile {
    pub input: Arc<Alphabet>,
    pub output: Arc<Alphabet>,
    pub domains: Vec<NamedDomain>,
    pub rules: Vec<GtrRule>,
}

/// Parses a rule file, inferring any undeclared alphabet.
pub fn parse_rule_file(text: &str) -> Result<RuleFile> {
    RuleFile::parse_with(text, None, None)
}

/// Parses a rule file whose rules must all be grammar rules.
pub fn parse_grammar(text: &str) -> Result<Grammar> {
    parse_rule_file(text)?.into_grammar()
}

impl RuleFile {
    /// Parses with externally fixed alphabets. A fixed alphabet overrides
    /// inference; a declaration in the file must then agree with it.
    pub fn parse_with(
        text: &str,
        input: Option<Arc<Alphabet>>,
        output: Option<Arc<Alphabet>>,
    ) -> Result<RuleFile> {
        let raw = Parser::new(text).file()?;
        resolve(raw, input, output)
    }

    /// Validates every rule as a grammar rule.
    pub fn ggr_rules(&self) -> Result<Vec<GgrRule>> {
        self.rules
            .iter()
            .map(|r| {
                validate_ggr(r).map_err(|v| {
                    let msgs: Vec<String> = v.iter().map(ToString::to_string).collect();
                    Error::InvalidRule(format!(
                        "{}:{}: {}",
                        r.span.line,
                        r.span.col,
                        msgs.join("; ")
                    ))
                })
            })
            .collect()
    }

    pub fn into_grammar(self) -> Result<Grammar> {
        let rules = self.ggr_rules()?;
        Grammar::new(self.input, self.output, self.domains, rules)
    }
}

// ---------------------------------------------------------------------------
// Lexing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Str(String),
    Regex(String),
    Punct(char),
    End,
    Eof,
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
    depth: usize,
    peeked: Option<(Tok, Span)>,
}

const PUNCT: &str = "():=,;{}";

impl Parser {
    fn new(text: &str) -> Self {
        Parser {
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
            depth: 0,
            peeked: None,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = *self.chars.get(self.pos)?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn here(&self) -> Span {
        Span {
            line: self.line,
            col: self.col,
        }
    }

    fn err(span: Span, msg: impl Into<String>) -> Error {
        Error::Syntax {
            line: span.line,
            col: span.col,
            msg: msg.into(),
        }
    }

    fn lex(&mut self) -> Result<(Tok, Span)> {
        loop {
            let span = self.here();
            let Some(&c) = self.chars.get(self.pos) else {
                return Ok((Tok::Eof, span));
            };
            match c {
                '#' => {
                    while matches!(self.chars.get(self.pos), Some(&ch) if ch != '\n') {
                        self.bump();
                    }
                }
                '\n' => {
                    self.bump();
                    if self.depth == 0 {
                        return Ok((Tok::End, span));
                    }
                }
                c if c.is_whitespace() => {
                    self.bump();
                }
                '"' => {
                    self.bump();
                    let mut s = String::new();
                    loop {
                        match self.bump() {
                            Some('"') => break,
                            Some('\n') | None => {
                                return Err(Self::err(span, "unterminated string"))
                            }
                            Some(ch) => s.push(ch),
                        }
                    }
                    return Ok((Tok::Str(s), span));
                }
                ';' => {
                    self.bump();
                    return Ok((Tok::End, span));
                }
                c if PUNCT.contains(c) => {
                    self.bump();
                    match c {
                        '(' | '{' => self.depth += 1,
                        ')' | '}' => self.depth = self.depth.saturating_sub(1),
                        _ => {}
                    }
                    return Ok((Tok::Punct(c), span));
                }
                _ => {
                    let mut w = String::new();
                    while let Some(&ch) = self.chars.get(self.pos) {
                        if ch.is_whitespace() || PUNCT.contains(ch) || ch == '"' || ch == '#' {
                            break;
                        }
                        w.push(ch);
                        self.bump();
                    }
                    if w == "regex" && self.chars.get(self.pos) == Some(&'(') {
                        return self.regex_body(span);
                    }
                    return Ok((Tok::Word(w), span));
                }
            }
        }
    }

    fn regex_body(&mut self, span: Span) -> Result<(Tok, Span)> {
        self.bump();
        let mut depth = 1;
        let mut body = String::new();
        let mut quoted = false;
        loop {
            let Some(c) = self.bump() else {
                return Err(Self::err(span, "unterminated regex(...)"));
            };
            match c {
                '"' => quoted = !quoted,
                '(' if !quoted => depth += 1,
                ')' if !quoted => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                }
                _ => {}
            }
            body.push(c);
        }
        Ok((Tok::Regex(body.trim().to_string()), span))
    }

    fn peek(&mut self) -> Result<&(Tok, Span)> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lex()?);
        }
        Ok(self.peeked.as_ref().expect("just filled"))
    }

    fn next(&mut self) -> Result<(Tok, Span)> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lex(),
        }
    }

    fn expect(&mut self, p: char) -> Result<Span> {
        match self.next()? {
            (Tok::Punct(c), s) if c == p => Ok(s),
            (t, s) => Err(Self::err(
                s,
                format!("expected `{p}`, found {}", describe(&t)),
            )),
        }
    }

    fn file(&mut self) -> Result<RawFile> {
        let mut f = RawFile::default();
        loop {
            let (tok, span) = self.peek()?.clone();
            match tok {
                Tok::Eof => return Ok(f),
                Tok::End => {
                    self.next()?;
                }
                Tok::Word(w) if w == "input-alphabet" || w == "output-alphabet" => {
                    self.next()?;
                    let tokens = self.alphabet_decl()?;
                    let slot = if w == "input-alphabet" {
                        &mut f.input
                    } else {
                        &mut f.output
                    };
                    if slot.is_some() {
                        return Err(Self::err(span, format!("duplicate {w} declaration")));
                    }
                    *slot = Some((tokens, span));
                }
                Tok::Word(w) if w == "class-domain" => {
                    self.next()?;
                    let (name, name_span) = match self.next()? {
                        (Tok::Word(n), s) => (n, s),
                        (t, s) => {
                            return Err(Self::err(
                                s,
                                format!("expected domain name, found {}", describe(&t)),
                            ))
                        }
                    };
                    if builtin(&name).is_some() {
                        return Err(Self::err(
                            name_span,
                            format!("`{name}` is a builtin domain"),
                        ));
                    }
                    if f.domains.iter().any(|(d, _)| d.name == name) {
                        return Err(Self::err(
                            name_span,
                            format!("domain `{name}` declared twice"),
                        ));
                    }
                    self.expect('=')?;
                    let spec = match self.domain_ref()? {
                        (RawDomain::Spec(s), _) => s,
                        (RawDomain::Named(n), s) => {
                            return Err(Self::err(
                                s,
                                format!("expected a domain definition, found `{n}`"),
                            ))
                        }
                    };
                    f.domains.push((NamedDomain { name, spec }, name_span));
                    self.end_statement()?;
                }
                _ => {
                    let r = self.rule()?;
                    f.rules.push(r);
                }
            }
        }
    }

    fn end_statement(&mut self) -> Result<()> {
        match self.next()? {
            (Tok::End | Tok::Eof, _) => Ok(()),
            (t, s) => Err(Self::err(
                s,
                format!("expected end of statement, found {}", describe(&t)),
            )),
        }
    }

    fn alphabet_decl(&mut self) -> Result<Vec<String>> {
        if self.peek()?.0 == Tok::Punct(':') {
            self.next()?;
        }
        let mut out = Vec::new();
        loop {
            match self.next()? {
                (Tok::End | Tok::Eof, _) => return Ok(out),
                (Tok::Word(w), _) => out.push(w),
                (Tok::Str(s), _) => out.extend(s.split_whitespace().map(String::from)),
                (t, s) => {
                    return Err(Self::err(
                        s,
                        format!("unexpected {} in alphabet", describe(&t)),
                    ))
                }
            }
        }
    }

    fn domain_ref(&mut self) -> Result<(RawDomain, Span)> {
        match self.next()? {
            (Tok::Word(w), s) => Ok((
                match builtin(&w) {
                    Some(spec) => RawDomain::Spec(spec),
                    None => RawDomain::Named(w),
                },
                s,
            )),
            (Tok::Regex(p), s) => Ok((RawDomain::Spec(DomainSpec::Regex(p)), s)),
            (Tok::Punct('{'), s) => {
                let mut members = Vec::new();
                loop {
                    match self.next()? {
                        (Tok::Punct('}'), _) if members.is_empty() => break,
                        (Tok::Str(m), _) => {
                            members.push(m.split_whitespace().map(String::from).collect())
                        }
                        (Tok::Word(m), _) => members.push(vec![m]),
                        (t, s) => {
                            return Err(Self::err(
                                s,
                                format!("expected a quoted string, found {}", describe(&t)),
                            ))
                        }
                    }
                    match self.next()? {
                        (Tok::Punct(','), _) => {}
                        (Tok::Punct('}'), _) => break,
                        (t, s) => {
                            return Err(Self::err(
                                s,
                                format!("expected `,` or `}}`, found {}", describe(&t)),
                            ))
                        }
                    }
                }
                Ok((RawDomain::Spec(DomainSpec::Finite(members)), s))
            }
            (t, s) => Err(Self::err(
                s,
                format!("expected a domain, found {}", describe(&t)),
            )),
        }
    }

    fn rule(&mut self) -> Result<RawRule> {
        let span = self.peek()?.1;
        let mut binds = Vec::new();
        if matches!(&self.peek()?.0, Tok::Word(w) if w == "forall") {
            self.next()?;
            loop {
                let (name, nspan) = match self.next()? {
                    (Tok::Word(n), s) if is_ident(&n) => (n, s),
                    (t, s) => {
                        return Err(Self::err(
                            s,
                            format!("expected a variable name, found {}", describe(&t)),
                        ))
                    }
                };
                match self.next()? {
                    (Tok::Word(w), _) if w == "in" || w == "∈" => {}
                    (t, s) => {
                        return Err(Self::err(
                            s,
                            format!("expected `in`, found {}", describe(&t)),
                        ))
                    }
                }
                let (dom, dspan) = self.domain_ref()?;
                if binds
                    .iter()
                    .any(|(n, _, _, _): &(String, RawDomain, Span, Span)| *n == name)
                {
                    return Err(Self::err(nspan, format!("variable `{name}` bound twice")));
                }
                binds.push((name, dom, nspan, dspan));
                match self.next()? {
                    (Tok::Punct(','), _) => {}
                    (Tok::Punct(':'), _) => break,
                    (t, s) => {
                        return Err(Self::err(
                            s,
                            format!("expected `,` or `:`, found {}", describe(&t)),
                        ))
                    }
                }
            }
        }
        let lhs = self.side()?;
        if lhs.is_empty() {
            return Err(Self::err(span, "empty left-hand side"));
        }
        self.expect('=')?;
        let rhs = self.side()?;
        self.end_statement()?;
        Ok(RawRule {
            span,
            binds,
            lhs,
            rhs,
        })
    }

    fn side(&mut self) -> Result<Vec<RawItem>> {
        let mut items = Vec::new();
        loop {
            let (tok, span) = self.peek()?.clone();
            match tok {
                Tok::Punct('=') | Tok::End | Tok::Eof => return Ok(items),
                Tok::Str(s) => {
                    self.next()?;
                    for t in s.split_whitespace() {
                        items.push(RawItem::Lit(t.to_string(), span));
                    }
                }
                Tok::Word(w) if w == "T" => {
                    self.next()?;
                    self.expect('(')?;
                    let mut syms = Vec::new();
                    loop {
                        match self.next()? {
                            (Tok::Punct(')'), _) => break,
                            (Tok::Str(s), sp) => syms.extend(
                                s.split_whitespace().map(|t| RawSym::Lit(t.to_string(), sp)),
                            ),
                            (Tok::Word(v), sp) if is_ident(&v) => syms.push(RawSym::Var(v, sp)),
                            (t, sp) => {
                                return Err(Self::err(
                                    sp,
                                    format!("unexpected {} in T(...)", describe(&t)),
                                ))
                            }
                        }
                    }
                    items.push(RawItem::Call(syms));
                }
                Tok::Word(w) if is_ident(&w) => {
                    self.next()?;
                    items.push(RawItem::Var(w, span));
                }
                t => return Err(Self::err(span, format!("unexpected {}", describe(&t)))),
            }
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Word(w) => format!("`{w}`"),
        Tok::Str(s) => format!("\"{s}\""),
        Tok::Regex(_) => "regex(...)".into(),
        Tok::Punct(c) => format!("`{c}`"),
        Tok::End => "end of statement".into(),
        Tok::Eof => "end of input".into(),
    }
}

fn is_ident(w: &str) -> bool {
    let mut cs = w.chars();
    matches!(cs.next(), Some(c) if c.is_alphabetic() || c == '_')
        && cs.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

fn builtin(w: &str) -> Option<DomainSpec> {
    let rest = w
        .strip_prefix("SIGMA")
        .or_else(|| w.strip_prefix("LAMBDA"))
        .or_else(|| w.strip_prefix('Σ'))
        .or_else(|| w.strip_prefix('Λ'))?;
    match rest {
        "*" => Some(DomainSpec::Star),
        "+" => Some(DomainSpec::Plus),
        "1" => Some(DomainSpec::One),
        _ => None,
    }
}

impl std::str::FromStr for DomainSpec {
    type Err = Error;

    /// Accepts `SIGMA*`, `SIGMA+`, `SIGMA1` (or `Σ`, `LAMBDA`, `Λ` spellings)
    /// and `regex(PATTERN)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(p) = s.strip_prefix("regex(").and_then(|r| r.strip_suffix(')')) {
            return Ok(DomainSpec::Regex(p.to_string()));
        }
        builtin(s).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "unknown domain `{s}`; expected SIGMA*, SIGMA+, SIGMA1 or regex(...)"
            ))
        })
    }
}

// ---------------------------------------------------------------------------
// Resolution

#[derive(Default)]
struct RawFile {
    input: Option<(Vec<String>, Span)>,
    output: Option<(Vec<String>, Span)>,
    domains: Vec<(NamedDomain, Span)>,
    rules: Vec<RawRule>,
}

enum RawDomain {
    Named(String),
    Spec(DomainSpec),
}

struct RawRule {
    span: Span,
    binds: Vec<(String, RawDomain, Span, Span)>,
    lhs: Vec<RawItem>,
    rhs: Vec<RawItem>,
}

enum RawItem {
    Lit(String, Span),
    Var(String, Span),
    Call(Vec<RawSym>),
}

enum RawSym {
    Lit(String, Span),
    Var(String, Span),
}

#[derive(Clone, Copy, PartialEq)]
enum Side {
    Input,
    Output,
}

impl RawRule {
    fn items(&self) -> impl Iterator<Item = &RawItem> {
        self.lhs.iter().chain(&self.rhs)
    }

    /// Which side each bound variable lives on.
    fn sides(&self) -> Result<Vec<Side>> {
        let mut sides = Vec::with_capacity(self.binds.len());
        for (name, _, span, _) in &self.binds {
            let inside = self.items().any(|i| match i {
                RawItem::Call(syms) => syms
                    .iter()
                    .any(|s| matches!(s, RawSym::Var(v, _) if v == name)),
                _ => false,
            });
            let outside = self
                .items()
                .any(|i| matches!(i, RawItem::Var(v, _) if v == name));
            if inside && outside {
                return Err(Parser::err(
                    *span,
                    format!("variable `{name}` is used both inside and outside T(...)"),
                ));
            }
            sides.push(if outside { Side::Output } else { Side::Input });
        }
        Ok(sides)
    }
}

fn resolve(
    raw: RawFile,
    input: Option<Arc<Alphabet>>,
    output: Option<Arc<Alphabet>>,
) -> Result<RuleFile> {
    let spec_of = |d: &RawDomain, span: Span| -> Result<DomainSpec> {
        match d {
            RawDomain::Spec(s) => Ok(s.clone()),
            RawDomain::Named(n) => raw
                .domains
                .iter()
                .find(|(nd, _)| nd.name == *n)
                .map(|(nd, _)| nd.spec.clone())
                .ok_or_else(|| Error::UnknownDomain {
                    line: span.line,
                    col: span.col,
                    name: n.clone(),
                }),
        }
    };

    // Side assignments and the tokens each side mentions.
    let mut seen_in: Vec<String> = Vec::new();
    let mut seen_out: Vec<String> = Vec::new();
    let push = |v: &mut Vec<String>, t: &str| {
        if !v.iter().any(|x| x == t) {
            v.push(t.to_string());
        }
    };
    let mut all_sides = Vec::with_capacity(raw.rules.len());
    for r in &raw.rules {
        let sides = r.sides()?;
        for ((_, d, _, span), side) in r.binds.iter().zip(&sides) {
            for t in spec_of(d, *span)?.tokens()? {
                match side {
                    Side::Input => push(&mut seen_in, &t),
                    Side::Output => push(&mut seen_out, &t),
                }
            }
        }
        for item in r.items() {
            match item {
                RawItem::Lit(t, _) => push(&mut seen_out, t),
                RawItem::Call(syms) => {
                    for s in syms {
                        if let RawSym::Lit(t, _) = s {
                            push(&mut seen_in, t);
                        }
                    }
                }
                RawItem::Var(..) => {}
            }
        }
        all_sides.push(sides);
    }
    // Named domains that no rule uses still need their tokens covered.
    for (nd, _) in &raw.domains {
        for t in nd.spec.tokens()? {
            if !seen_out.contains(&t) {
                push(&mut seen_in, &t);
            }
        }
    }

    let input = pick_alphabet(input, raw.input.as_ref(), seen_in, "input")?;
    let output = pick_alphabet(output, raw.output.as_ref(), seen_out, "output")?;

    let mut rules = Vec::with_capacity(raw.rules.len());
    for (r, sides) in raw.rules.iter().zip(&all_sides) {
        let mut in_vars: Vec<VarDecl> = Vec::new();
        let mut out_vars: Vec<VarDecl> = Vec::new();
        let mut index = Vec::with_capacity(r.binds.len());
        for ((name, d, _, span), side) in r.binds.iter().zip(sides) {
            let spec = spec_of(d, *span)?;
            let (alpha, which, prefix) = match side {
                Side::Input => (&input, "input", "SIGMA"),
                Side::Output => (&output, "output", "LAMBDA"),
            };
            let domain = Arc::new(spec.resolve(alpha, *span, which)?);
            let domain_name = match d {
                RawDomain::Named(n) => n.clone(),
                RawDomain::Spec(s) => s.spelled(prefix),
            };
            let decl = VarDecl {
                name: name.clone(),
                domain_name,
                domain,
            };
            match side {
                Side::Input => {
                    index.push(in_vars.len());
                    in_vars.push(decl);
                }
                Side::Output => {
                    index.push(out_vars.len());
                    out_vars.push(decl);
                }
            }
        }
        let lookup = |v: &str, span: Span| -> Result<usize> {
            r.binds
                .iter()
                .position(|(n, _, _, _)| n == v)
                .map(|i| index[i])
                .ok_or_else(|| Error::UndeclaredVariable {
                    line: span.line,
                    col: span.col,
                    name: v.to_string(),
                })
        };
        let tok = |alpha: &Alphabet, t: &str, span: Span, which: &'static str| -> Result<TokenId> {
            alpha.id(t).ok_or_else(|| Error::TokenNotInAlphabet {
                line: span.line,
                col: span.col,
                token: t.to_string(),
                which,
            })
        };
        let convert = |items: &[RawItem]| -> Result<Vec<Item>> {
            items
                .iter()
                .map(|i| {
                    Ok(match i {
                        RawItem::Lit(t, s) => Item::Lit(tok(&output, t, *s, "output")?),
                        RawItem::Var(v, s) => Item::OutVar(lookup(v, *s)?),
                        RawItem::Call(syms) => Item::Call(Pattern(
                            syms.iter()
                                .map(|sym| {
                                    Ok(match sym {
                                        RawSym::Lit(t, s) => Sym::Tok(tok(&input, t, *s, "input")?),
                                        RawSym::Var(v, s) => Sym::Var(lookup(v, *s)?),
                                    })
                                })
                                .collect::<Result<_>>()?,
                        )),
                    })
                })
                .collect()
        };
        let rule = GtrRule {
            input: Arc::clone(&input),
            output: Arc::clone(&output),
            input_vars: in_vars,
            output_vars: out_vars,
            lhs: convert(&r.lhs)?,
            rhs: convert(&r.rhs)?,
            span: r.span,
        };
        rule.check_well_formed()?;
        rules.push(rule);
    }
    // Unused domain definitions are still checked, so typos surface.
    for (nd, span) in &raw.domains {
        let used_by_output = raw.rules.iter().zip(&all_sides).any(|(r, sides)| {
            r.binds.iter().zip(sides).any(|((_, d, _, _), s)| {
                *s == Side::Output && matches!(d, RawDomain::Named(n) if *n == nd.name)
            })
        });
        let (alpha, which) = if used_by_output {
            (&output, "output")
        } else {
            (&input, "input")
        };
        nd.spec.resolve(alpha, *span, which)?;
    }
    Ok(RuleFile {
        input,
        output,
        domains: raw.domains.into_iter().map(|(d, _)| d).collect(),
        rules,
    })
}

fn pick_alphabet(
    given: Option<Arc<Alphabet>>,
    declared: Option<&(Vec<String>, Span)>,
    seen: Vec<String>,
    which: &'static str,
) -> Result<Arc<Alphabet>> {
    match (given, declared) {
        (Some(g), Some((tokens, span))) => {
            let d = Alphabet::new(tokens.iter().map(String::as_str))?;
            if d != *g {
                return Err(Parser::err(
                    *span,
                    format!("declared {which} alphabet differs from the one supplied"),
                ));
            }
            Ok(g)
        }
        (Some(g), None) => Ok(g),
        (None, Some((tokens, span))) => Alphabet::new(tokens.iter().map(String::as_str))
            .map(Arc::new)
            .map_err(|e| Parser::err(*span, e.to_string())),
        (None, None) => {
            if seen.is_empty() {
                return Err(Error::InvalidAlphabet(format!(
                    "no {which} tokens to infer the alphabet from; add an `{which}-alphabet` line"
                )));
            }
            Ok(Arc::new(Alphabet::new(seen.iter().map(String::as_str))?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn inferred_alphabets() {
        let f = parse_rule_file("T(\"zup\") = \"green\"\nT(\"fep\" \"zup\") = \"rose green\"\n")
            .unwrap();
        assert_eq!(f.input.tokens(), ["zup", "fep"]);
        assert_eq!(f.output.tokens(), ["green", "rose"]);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e =
            parse_rule_file("T(\"a\") = \"b\"\nforall x1 in SIGMA+ T(x1) = T(x1)\n").unwrap_err();
        match e {
            Error::Syntax { line, col, .. } => assert_eq!((line, col), (2, 21)),
            other => panic!("{other:?}"),
        }
        let e = parse_rule_file("T(\"a\") = \"b\"\nforall x1 in FOO: T(x1) = T(x1)\n").unwrap_err();
        assert!(
            matches!(
                e,
                Error::UnknownDomain {
                    line: 2,
                    col: 14,
                    ..
                }
            ),
            "{e:?}"
        );
        let e = parse_rule_file("T(\"a\") = \"b\"\nT(x9) = \"b\"\n").unwrap_err();
        assert!(
            matches!(
                e,
                Error::UndeclaredVariable {
                    line: 2,
                    col: 3,
                    ..
                }
            ),
            "{e:?}"
        );
        let e =
            parse_rule_file("input-alphabet a\noutput-alphabet b\nT(\"c\") = \"b\"\n").unwrap_err();
        assert!(
            matches!(
                e,
                Error::TokenNotInAlphabet {
                    line: 3,
                    which: "input",
                    ..
                }
            ),
            "{e:?}"
        );
        let e = parse_rule_file("T(\"a\") = \"b").unwrap_err();
        assert!(
            matches!(
                e,
                Error::Syntax {
                    line: 1,
                    col: 10,
                    ..
                }
            ),
            "{e:?}"
        );
    }

    #[test]
    fn domains_resolve() {
        let f = parse_rule_file(
            "input-alphabet RUN WALK LEFT AND\noutput-alphabet I_RUN\n\
             class-domain ACT = {\"RUN\", \"WALK LEFT\"}\n\
             class-domain DIR = regex((RUN | WALK) LEFT?)\n\
             forall x1 in ACT, x2 in DIR: T(x1 \"AND\" x2) = T(x1) T(x2)\n",
        )
        .unwrap();
        let r = &f.rules[0];
        assert_eq!(r.input_vars[0].domain_name, "ACT");
        assert_eq!(r.input_vars[0].domain.count(2), 1);
        assert_eq!(r.input_vars[1].domain.count(1), 2);
        assert_eq!(r.input_vars[1].domain.count(2), 2);
        assert_eq!(f.domains.len(), 2);
    }

    #[test]
    fn output_variables_use_lambda() {
        let f = parse_rule_file(
            "input-alphabet a\noutput-alphabet b\nforall x1 in SIGMA*, y1 in SIGMA*: T(x1) y1 = y1 T(x1)\n",
        )
        .unwrap();
        let r = &f.rules[0];
        assert_eq!(r.output_vars.len(), 1);
        assert_eq!(r.output_vars[0].domain_name, "LAMBDA*");
        assert_eq!(
            r.to_string(),
            "forall x1 in SIGMA*, y1 in LAMBDA*: T(x1) y1 = y1 T(x1)"
        );
        assert!(f.into_grammar().is_err());
    }

    #[test]
    fn grammar_round_trip() {
        let src = "\
input-alphabet \"zup\" \"fep\" \"lug\" \"blicket\"
output-alphabet \"green\" \"rose\"
class-domain WORD = {\"zup\", \"fep\"}
forall x1 in WORD, x2 in SIGMA1: T(x1 \"lug\" x2) = T(x2) T(x1) T(x2) T(x1) T(x1)
forall x1 in SIGMA1: T(x1 \"blicket\") = T(x1) \"rose\" T(x1)
T(\"zup\") = \"green\"; T(\"fep\") =
";
        let g = parse_grammar(src).unwrap();
        assert_eq!(g.rules().len(), 4);
        let text = g.to_dsl();
        let g2 = parse_grammar(&text).unwrap();
        assert_eq!(g2.to_dsl(), text);
        for (a, b) in g.rules().iter().zip(g2.rules()) {
            assert!(a.same_structure(b));
        }
    }

    fn arb_rule() -> impl Strategy<Value = String> {
        let sym = prop_oneof![
            (0usize..3).prop_map(|v| format!("x{}", v + 1)),
            prop::sample::select(vec!["a", "b", "c"]).prop_map(|t| format!("\"{t}\"")),
        ];
        let pat = prop::collection::vec(sym, 1..4);
        let rhs_item = prop_oneof![
            pat.clone().prop_map(|p| format!("T({})", p.join(" "))),
            prop::sample::select(vec!["p", "q"]).prop_map(|t| format!("\"{t}\"")),
        ];
        let dom = prop::sample::select(vec![
            "SIGMA*",
            "SIGMA+",
            "SIGMA1",
            "{\"a\", \"b c\"}",
            "regex(a* b)",
        ]);
        (
            prop::collection::vec(dom, 3),
            pat,
            prop::collection::vec(rhs_item, 0..4),
        )
            .prop_map(|(doms, lhs, rhs)| {
                let binds: Vec<String> = doms
                    .iter()
                    .enumerate()
                    .map(|(i, d)| format!("x{} in {d}", i + 1))
                    .collect();
                format!(
                    "forall {}: T({}) = {}",
                    binds.join(", "),
                    lhs.join(" "),
                    rhs.join(" ")
                )
            })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(src in arb_rule()) {
            let input = Arc::new(Alphabet::new(["a", "b", "c"]).unwrap());
            let output = Arc::new(Alphabet::new(["p", "q"]).unwrap());
            // Rules that leave a variable unused are rejected by the parser; skip those.
            let Ok(f) = RuleFile::parse_with(&src, Some(input.clone()), Some(output.clone())) else {
                return Ok(());
            };
            let printed = f.rules[0].to_string();
            let again = RuleFile::parse_with(&printed, Some(input), Some(output)).unwrap();
            prop_assert_eq!(again.rules[0].to_string(), printed);
            prop_assert_eq!(&again.rules[0].lhs, &f.rules[0].lhs);
            prop_assert_eq!(&again.rules[0].rhs, &f.rules[0].rhs);
            for (a, b) in again.rules[0].input_vars.iter().zip(&f.rules[0].input_vars) {
                prop_assert_eq!(&a.domain, &b.domain);
            }
        }
    }
}
