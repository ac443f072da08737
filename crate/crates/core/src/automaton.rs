//! Finite acceptors over token ids: complete DFAs, epsilon-NFAs, subset
//! construction and a small token-level regular expression compiler.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::alphabet::{Alphabet, TokenId};
use crate::error::{Error, Result};

pub type StateId = u32;

/// A complete deterministic finite acceptor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    symbols: usize,
    start: StateId,
    accepting: Vec<bool>,
    /// `trans[state * symbols + symbol]`
    trans: Vec<StateId>,
}

impl Dfa {
    pub fn from_parts(
        symbols: usize,
        start: StateId,
        accepting: Vec<bool>,
        trans: Vec<StateId>,
    ) -> Result<Self> {
        let n = accepting.len();
        if n == 0 || (start as usize) >= n {
            return Err(Error::InvalidTransducer("start state out of range".into()));
        }
        if trans.len() != n * symbols || trans.iter().any(|&t| (t as usize) >= n) {
            return Err(Error::InvalidTransducer(
                "transition table is not complete".into(),
            ));
        }
        Ok(Dfa {
            symbols,
            start,
            accepting,
            trans,
        })
    }

    /// Accepts every string.
    pub fn universal(symbols: usize) -> Self {
        Dfa {
            symbols,
            start: 0,
            accepting: vec![true],
            trans: vec![0; symbols],
        }
    }

    /// Accepts every non-empty string.
    pub fn non_empty(symbols: usize) -> Self {
        Dfa {
            symbols,
            start: 0,
            accepting: vec![false, true],
            trans: [vec![1; symbols], vec![1; symbols]].concat(),
        }
    }

    /// Accepts exactly the strings of length one.
    pub fn single_token(symbols: usize) -> Self {
        Dfa {
            symbols,
            start: 0,
            accepting: vec![false, true, false],
            trans: [vec![1; symbols], vec![2; symbols], vec![2; symbols]].concat(),
        }
    }

    /// Accepts exactly the given strings (a trie plus a sink state).
    pub fn finite<'a>(symbols: usize, words: impl IntoIterator<Item = &'a [TokenId]>) -> Self {
        let mut accepting = vec![false, false];
        // state 0 is the sink, state 1 the root
        let mut trans = vec![0; 2 * symbols];
        for w in words {
            let mut s = 1usize;
            for &t in w {
                let slot = s * symbols + t as usize;
                if trans[slot] == 0 {
                    let fresh = accepting.len();
                    accepting.push(false);
                    trans.resize(trans.len() + symbols, 0);
                    trans[slot] = fresh as StateId;
                }
                s = trans[slot] as usize;
            }
            accepting[s] = true;
        }
        Dfa {
            symbols,
            start: 1,
            accepting,
            trans,
        }
    }

    pub fn symbols(&self) -> usize {
        self.symbols
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn is_accepting(&self, s: StateId) -> bool {
        self.accepting[s as usize]
    }

    #[inline]
    pub fn step(&self, s: StateId, t: TokenId) -> StateId {
        self.trans[s as usize * self.symbols + t as usize]
    }

    pub fn run(&self, input: &[TokenId]) -> StateId {
        input.iter().fold(self.start, |s, &t| self.step(s, t))
    }

    pub fn accepts(&self, input: &[TokenId]) -> bool {
        self.is_accepting(self.run(input))
    }

    pub fn complement(&self) -> Dfa {
        Dfa {
            accepting: self.accepting.iter().map(|a| !a).collect(),
            ..self.clone()
        }
    }

    /// `table[r][s]`: number of strings of length `r` leading from `s` to acceptance.
    fn completions(&self, max: usize) -> Vec<Vec<u128>> {
        let n = self.num_states();
        let mut table = Vec::with_capacity(max + 1);
        table.push(
            self.accepting
                .iter()
                .map(|&a| u128::from(a))
                .collect::<Vec<_>>(),
        );
        for r in 1..=max {
            let prev: &Vec<u128> = &table[r - 1];
            let row = (0..n)
                .map(|s| {
                    (0..self.symbols).fold(0u128, |acc, t| {
                        acc.saturating_add(prev[self.trans[s * self.symbols + t] as usize])
                    })
                })
                .collect();
            table.push(row);
        }
        table
    }

    /// Number of accepted strings of length `len` (saturating at `u128::MAX`).
    pub fn count_len(&self, len: usize) -> u128 {
        self.completions(len)[len][self.start as usize]
    }

    /// Accepted strings of length `len` in lexicographic order.
    pub fn enumerate_len(&self, len: usize) -> Vec<Vec<TokenId>> {
        let live: Vec<Vec<bool>> = self
            .completions(len)
            .into_iter()
            .map(|row| row.into_iter().map(|c| c > 0).collect())
            .collect();
        let mut out = Vec::new();
        let mut buf = Vec::with_capacity(len);
        self.enumerate_rec(self.start, len, &live, &mut buf, &mut out);
        out
    }

    fn enumerate_rec(
        &self,
        s: StateId,
        remaining: usize,
        live: &[Vec<bool>],
        buf: &mut Vec<TokenId>,
        out: &mut Vec<Vec<TokenId>>,
    ) {
        if !live[remaining][s as usize] {
            return;
        }
        if remaining == 0 {
            out.push(buf.clone());
            return;
        }
        for t in 0..self.symbols as TokenId {
            buf.push(t);
            self.enumerate_rec(self.step(s, t), remaining - 1, live, buf, out);
            buf.pop();
        }
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut stack = vec![self.start];
        seen[self.start as usize] = true;
        while let Some(s) = stack.pop() {
            for t in 0..self.symbols as TokenId {
                let d = self.step(s, t);
                if !seen[d as usize] {
                    seen[d as usize] = true;
                    stack.push(d);
                }
            }
        }
        seen
    }

    /// States from which some accepting state is reachable.
    pub fn coreachable(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut rev: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for s in 0..n {
            for t in 0..self.symbols {
                rev[self.trans[s * self.symbols + t] as usize].push(s as StateId);
            }
        }
        let mut seen = self.accepting.clone();
        let mut stack: Vec<StateId> = (0..n as StateId).filter(|&s| seen[s as usize]).collect();
        while let Some(s) = stack.pop() {
            for &p in &rev[s as usize] {
                if !seen[p as usize] {
                    seen[p as usize] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// Length of the shortest accepted string, if any.
    pub fn min_len(&self) -> Option<usize> {
        let mut dist = vec![usize::MAX; self.num_states()];
        let mut queue = VecDeque::from([self.start]);
        dist[self.start as usize] = 0;
        while let Some(s) = queue.pop_front() {
            if self.is_accepting(s) {
                return Some(dist[s as usize]);
            }
            for t in 0..self.symbols as TokenId {
                let d = self.step(s, t);
                if dist[d as usize] == usize::MAX {
                    dist[d as usize] = dist[s as usize] + 1;
                    queue.push_back(d);
                }
            }
        }
        None
    }

    /// Length of the longest accepted string; `None` when the language is
    /// infinite or empty (see [`Dfa::is_finite`]).
    pub fn max_len(&self) -> Option<usize> {
        let reach = self.reachable();
        let co = self.coreachable();
        let useful: Vec<bool> = reach.iter().zip(&co).map(|(a, b)| *a && *b).collect();
        if !useful[self.start as usize] {
            return None;
        }
        // longest path in the useful subgraph; a cycle means infinite
        let n = self.num_states();
        let mut state = vec![0u8; n]; // 0 new, 1 on stack, 2 done
        let mut best = vec![0usize; n];
        fn dfs(d: &Dfa, s: usize, useful: &[bool], state: &mut [u8], best: &mut [usize]) -> bool {
            state[s] = 1;
            let mut b = 0usize;
            let mut any = d.accepting[s];
            for t in 0..d.symbols {
                let nx = d.trans[s * d.symbols + t] as usize;
                if !useful[nx] {
                    continue;
                }
                let seen = state[nx];
                if seen == 1 || (seen == 0 && !dfs(d, nx, useful, state, best)) {
                    return false;
                }
                b = b.max(best[nx] + 1);
                any = true;
            }
            debug_assert!(any);
            best[s] = b;
            state[s] = 2;
            true
        }
        if dfs(self, self.start as usize, &useful, &mut state, &mut best) {
            Some(best[self.start as usize])
        } else {
            None
        }
    }

    pub fn is_empty_language(&self) -> bool {
        self.min_len().is_none()
    }

    pub fn is_finite(&self) -> bool {
        self.is_empty_language() || self.max_len().is_some()
    }

    /// Shortest string accepted by `self` but not by `other`; ties are broken
    /// by the lexicographically smallest string.
    pub fn shortest_difference(&self, other: &Dfa) -> Option<Vec<TokenId>> {
        assert_eq!(self.symbols, other.symbols);
        let mut parent: HashMap<(StateId, StateId), ((StateId, StateId), TokenId)> = HashMap::new();
        let start = (self.start, other.start);
        let mut queue = VecDeque::from([start]);
        let mut seen = std::collections::HashSet::from([start]);
        while let Some(p) = queue.pop_front() {
            if self.is_accepting(p.0) && !other.is_accepting(p.1) {
                let mut word = Vec::new();
                let mut cur = p;
                while cur != start {
                    let (prev, t) = parent[&cur];
                    word.push(t);
                    cur = prev;
                }
                word.reverse();
                return Some(word);
            }
            for t in 0..self.symbols as TokenId {
                let q = (self.step(p.0, t), other.step(p.1, t));
                if seen.insert(q) {
                    parent.insert(q, (p, t));
                    queue.push_back(q);
                }
            }
        }
        None
    }
}

/// A nondeterministic acceptor with epsilon moves (`None` labels).
#[derive(Debug, Clone, Default)]
pub struct Nfa {
    pub symbols: usize,
    pub num_states: usize,
    pub start: Vec<StateId>,
    pub accepting: Vec<bool>,
    pub edges: Vec<Vec<(Option<TokenId>, StateId)>>,
}

impl Nfa {
    pub fn new(symbols: usize) -> Self {
        Nfa {
            symbols,
            ..Default::default()
        }
    }

    pub fn add_state(&mut self, accepting: bool) -> StateId {
        self.accepting.push(accepting);
        self.edges.push(Vec::new());
        self.num_states += 1;
        (self.num_states - 1) as StateId
    }

    pub fn add_edge(&mut self, from: StateId, label: Option<TokenId>, to: StateId) {
        self.edges[from as usize].push((label, to));
    }

    fn closure(&self, set: &mut BTreeSet<StateId>) {
        let mut stack: Vec<StateId> = set.iter().copied().collect();
        while let Some(s) = stack.pop() {
            for &(l, d) in &self.edges[s as usize] {
                if l.is_none() && set.insert(d) {
                    stack.push(d);
                }
            }
        }
    }

    pub fn accepts(&self, input: &[TokenId]) -> bool {
        let mut cur: BTreeSet<StateId> = self.start.iter().copied().collect();
        self.closure(&mut cur);
        for &t in input {
            let mut next = BTreeSet::new();
            for &s in &cur {
                for &(l, d) in &self.edges[s as usize] {
                    if l == Some(t) {
                        next.insert(d);
                    }
                }
            }
            self.closure(&mut next);
            cur = next;
        }
        cur.iter().any(|&s| self.accepting[s as usize])
    }

    /// Subset construction; fails once more than `cap` subsets are discovered.
    pub fn determinize(&self, cap: usize) -> Result<Dfa> {
        let mut init: BTreeSet<StateId> = self.start.iter().copied().collect();
        self.closure(&mut init);
        let mut ids: HashMap<BTreeSet<StateId>, StateId> = HashMap::new();
        let mut sets = vec![init.clone()];
        ids.insert(init, 0);
        let mut trans = Vec::new();
        let mut accepting = Vec::new();
        let mut i = 0;
        while i < sets.len() {
            let cur = sets[i].clone();
            accepting.push(cur.iter().any(|&s| self.accepting[s as usize]));
            for t in 0..self.symbols as TokenId {
                let mut next = BTreeSet::new();
                for &s in &cur {
                    for &(l, d) in &self.edges[s as usize] {
                        if l == Some(t) {
                            next.insert(d);
                        }
                    }
                }
                self.closure(&mut next);
                let id = match ids.get(&next) {
                    Some(&id) => id,
                    None => {
                        if sets.len() >= cap {
                            return Err(Error::StateCapExceeded(cap));
                        }
                        let id = sets.len() as StateId;
                        ids.insert(next.clone(), id);
                        sets.push(next);
                        id
                    }
                };
                trans.push(id);
            }
            i += 1;
        }
        Ok(Dfa {
            symbols: self.symbols,
            start: 0,
            accepting,
            trans,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Regex {
    Empty,
    Token(TokenId),
    Any,
    Concat(Vec<Regex>),
    Alt(Vec<Regex>),
    Star(Box<Regex>),
    Plus(Box<Regex>),
    Opt(Box<Regex>),
}

#[derive(Debug, Clone, PartialEq)]
enum Lex {
    Word(String),
    Op(char),
}

fn lex_regex(src: &str) -> Result<Vec<Lex>> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if "|*+?()".contains(c) {
            out.push(Lex::Op(c));
            chars.next();
        } else if c == '"' {
            chars.next();
            let mut w = String::new();
            loop {
                match chars.next() {
                    Some('"') => break,
                    Some(ch) => w.push(ch),
                    None => {
                        return Err(Error::InvalidArgument(format!(
                            "unterminated quote in regex `{src}`"
                        )))
                    }
                }
            }
            out.push(Lex::Word(w));
        } else {
            let mut w = String::new();
            while let Some(&ch) = chars.peek() {
                if ch.is_whitespace() || "|*+?()\"".contains(ch) {
                    break;
                }
                w.push(ch);
                chars.next();
            }
            out.push(Lex::Word(w));
        }
    }
    Ok(out)
}

struct RegexParser<'a> {
    toks: Vec<Lex>,
    pos: usize,
    alphabet: &'a Alphabet,
    src: &'a str,
}

impl RegexParser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::InvalidArgument(format!("regex `{}`: {msg}", self.src))
    }

    fn alt(&mut self) -> Result<Regex> {
        let mut branches = vec![self.concat()?];
        while self.toks.get(self.pos) == Some(&Lex::Op('|')) {
            self.pos += 1;
            branches.push(self.concat()?);
        }
        Ok(if branches.len() == 1 {
            branches.pop().unwrap()
        } else {
            Regex::Alt(branches)
        })
    }

    fn concat(&mut self) -> Result<Regex> {
        let mut items = Vec::new();
        while let Some(tok) = self.toks.get(self.pos) {
            if matches!(tok, Lex::Op('|') | Lex::Op(')')) {
                break;
            }
            items.push(self.postfix()?);
        }
        Ok(match items.len() {
            0 => Regex::Empty,
            1 => items.pop().unwrap(),
            _ => Regex::Concat(items),
        })
    }

    fn postfix(&mut self) -> Result<Regex> {
        let mut r = self.atom()?;
        while let Some(Lex::Op(c @ ('*' | '+' | '?'))) = self.toks.get(self.pos) {
            r = match c {
                '*' => Regex::Star(Box::new(r)),
                '+' => Regex::Plus(Box::new(r)),
                _ => Regex::Opt(Box::new(r)),
            };
            self.pos += 1;
        }
        Ok(r)
    }

    fn atom(&mut self) -> Result<Regex> {
        let tok = self.toks.get(self.pos).cloned();
        self.pos += 1;
        match tok {
            Some(Lex::Op('(')) => {
                let r = self.alt()?;
                if self.toks.get(self.pos) != Some(&Lex::Op(')')) {
                    return Err(self.err("missing `)`"));
                }
                self.pos += 1;
                Ok(r)
            }
            Some(Lex::Word(w)) if w == "." => Ok(Regex::Any),
            Some(Lex::Word(w)) => self
                .alphabet
                .id(&w)
                .map(Regex::Token)
                .ok_or_else(|| self.err(&format!("token `{w}` not in alphabet"))),
            Some(Lex::Op(c)) => Err(self.err(&format!("unexpected `{c}`"))),
            None => Err(self.err("unexpected end")),
        }
    }
}

fn thompson(r: &Regex, nfa: &mut Nfa) -> (StateId, StateId) {
    let s = nfa.add_state(false);
    let e = nfa.add_state(false);
    match r {
        Regex::Empty => nfa.add_edge(s, None, e),
        Regex::Token(t) => nfa.add_edge(s, Some(*t), e),
        Regex::Any => {
            for t in 0..nfa.symbols as TokenId {
                nfa.add_edge(s, Some(t), e);
            }
        }
        Regex::Concat(items) => {
            let mut cur = s;
            for it in items {
                let (a, b) = thompson(it, nfa);
                nfa.add_edge(cur, None, a);
                cur = b;
            }
            nfa.add_edge(cur, None, e);
        }
        Regex::Alt(items) => {
            for it in items {
                let (a, b) = thompson(it, nfa);
                nfa.add_edge(s, None, a);
                nfa.add_edge(b, None, e);
            }
        }
        Regex::Star(inner) | Regex::Plus(inner) | Regex::Opt(inner) => {
            let (a, b) = thompson(inner, nfa);
            nfa.add_edge(s, None, a);
            nfa.add_edge(b, None, e);
            if !matches!(r, Regex::Plus(_)) {
                nfa.add_edge(s, None, e);
            }
            if !matches!(r, Regex::Opt(_)) {
                nfa.add_edge(b, None, a);
            }
        }
    }
    (s, e)
}

/// Token words mentioned in a regex, in order of first appearance (`.` excluded).
pub fn regex_words(pattern: &str) -> Result<Vec<String>> {
    let mut out: Vec<String> = Vec::new();
    for l in lex_regex(pattern)? {
        if let Lex::Word(w) = l {
            if w != "." && !out.contains(&w) {
                out.push(w);
            }
        }
    }
    Ok(out)
}

/// Compiles a token-level regular expression (`a* b`, `(RUN | WALK) LEFT?`,
/// `.` for any token) into a complete DFA.
pub fn compile_regex(pattern: &str, alphabet: &Alphabet) -> Result<Dfa> {
    let mut p = RegexParser {
        toks: lex_regex(pattern)?,
        pos: 0,
        alphabet,
        src: pattern,
    };
    let ast = p.alt()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    let mut nfa = Nfa::new(alphabet.len());
    let (s, e) = thompson(&ast, &mut nfa);
    nfa.start = vec![s];
    nfa.accepting[e as usize] = true;
    nfa.determinize(1 << 16)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::all_strings;

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    #[test]
    fn regex_a_star_b() {
        let d = compile_regex("a* b", &ab()).unwrap();
        assert_eq!(d.enumerate_len(3), vec![vec![0, 0, 1]]);
        assert_eq!(d.count_len(3), 1);
        assert!(d.accepts(&[1]));
        assert!(!d.accepts(&[1, 0]));
        assert_eq!(d.min_len(), Some(1));
        assert_eq!(d.max_len(), None);
    }

    #[test]
    fn regex_operators() {
        let a = ab();
        let d = compile_regex("(a | b b)+ a?", &a).unwrap();
        let brute = |w: &[TokenId]| {
            // (a|bb)+ a? by hand
            fn parts(w: &[TokenId]) -> bool {
                if w.is_empty() {
                    return true;
                }
                (w[0] == 0 && parts(&w[1..]))
                    || (w.len() >= 2 && w[0] == 1 && w[1] == 1 && parts(&w[2..]))
            }
            (!w.is_empty() && parts(w))
                || (w.len() >= 2 && w.last() == Some(&0) && parts(&w[..w.len() - 1]))
        };
        for len in 0..=6 {
            for w in all_strings(2, len) {
                assert_eq!(d.accepts(&w), brute(&w), "{w:?}");
            }
        }
        assert!(compile_regex("(a", &a).is_err());
        assert!(compile_regex("c", &a).is_err());
        assert!(compile_regex(".", &a).unwrap().accepts(&[1]));
    }

    #[test]
    fn finite_and_builtin_languages() {
        let f = Dfa::finite(2, [&[0u32, 1][..], &[1][..]]);
        assert_eq!(f.max_len(), Some(2));
        assert_eq!(f.min_len(), Some(1));
        assert!(f.accepts(&[0, 1]) && !f.accepts(&[0]));
        assert_eq!(Dfa::universal(2).count_len(5), 32);
        assert_eq!(Dfa::non_empty(2).count_len(0), 0);
        assert_eq!(Dfa::single_token(3).max_len(), Some(1));
        assert!(Dfa::finite(2, std::iter::empty::<&[TokenId]>()).is_empty_language());
    }

    #[test]
    fn shortest_difference_is_lex_smallest() {
        let all = Dfa::universal(2);
        let ends_b = compile_regex(". * b", &ab()).unwrap();
        assert_eq!(all.shortest_difference(&ends_b), Some(vec![]));
        let nonempty = Dfa::non_empty(2);
        assert_eq!(nonempty.shortest_difference(&ends_b), Some(vec![0]));
        assert_eq!(ends_b.shortest_difference(&all), None);
    }
}
