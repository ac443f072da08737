//! Pattern matching and recursive interpretation of grammars.

mod augment;
mod growth;

pub use augment::{augment, write_pairs_tsv};
pub use growth::derive_growth_bound;

use std::collections::HashMap;
use std::ops::ControlFlow;
use std::sync::Arc;

use crate::alphabet::{Alphabet, TokenId, TokenString};
use crate::domain::VariableDomain;
use crate::error::{Error, Result};
use crate::map::{GrowthBound, TransductionMap};
use crate::rule::{Grammar, Pattern, RhsItem, Sym, VarDecl};

/// How to resolve inputs matched by more than one (rule, assignment) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AmbiguityMode {
    /// Earliest rule wins, then the first assignment in matching order.
    #[default]
    FirstMatch,
    /// Error when two or more candidates exist.
    RequireUnique,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineLimits {
    pub max_depth: usize,
    /// Every recursive argument must be strictly shorter than the input.
    pub require_strict_decrease: bool,
    pub ambiguity: AmbiguityMode,
}

impl Default for EngineLimits {
    fn default() -> Self {
        EngineLimits {
            max_depth: 512,
            require_strict_decrease: true,
            ambiguity: AmbiguityMode::FirstMatch,
        }
    }
}

impl EngineLimits {
    pub fn validate(&self) -> Result<()> {
        if self.max_depth == 0 {
            return Err(Error::InvalidArgument(
                "max depth must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// One way a pattern matches a string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchAssignment {
    /// Index of the matched rule, when matching through a grammar.
    pub rule: Option<usize>,
    /// Binding of each variable, by index.
    pub bindings: Vec<TokenString>,
    /// Start offset in the input of each pattern symbol.
    pub splits: Vec<usize>,
}

/// A variable's domain prepared for incremental matching.
#[derive(Debug, Clone)]
struct VarMatcher {
    domain: Arc<VariableDomain>,
    live: Vec<bool>,
    min_len: usize,
    max_len: Option<usize>,
}

impl VarMatcher {
    fn new(domain: &Arc<VariableDomain>) -> Self {
        VarMatcher {
            domain: Arc::clone(domain),
            live: domain.dfa().coreachable(),
            min_len: domain.min_len().unwrap_or(usize::MAX),
            max_len: domain.max_len(),
        }
    }
}

#[derive(Debug, Clone)]
struct CompiledPattern {
    syms: Vec<Sym>,
    /// Lower bound on the length consumed by `syms[i..]`.
    suffix_min: Vec<usize>,
}

impl CompiledPattern {
    fn new(p: &Pattern, vars: &[VarMatcher]) -> Self {
        let mut suffix_min = vec![0usize; p.len() + 1];
        for i in (0..p.len()).rev() {
            let here = match p.0[i] {
                Sym::Tok(_) => 1,
                Sym::Var(v) => vars[v].min_len,
            };
            suffix_min[i] = suffix_min[i + 1].saturating_add(here);
        }
        CompiledPattern {
            syms: p.0.clone(),
            suffix_min,
        }
    }

    /// Calls `f` with `(start, len)` per variable for every match, in order.
    fn for_each_match<F>(&self, vars: &[VarMatcher], s: &[TokenId], f: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[(usize, usize)], &[usize]) -> ControlFlow<()>,
    {
        if self.suffix_min[0] > s.len() || vars.iter().any(|v| v.min_len == usize::MAX) {
            return ControlFlow::Continue(());
        }
        let mut binds = vec![(usize::MAX, 0usize); vars.len()];
        let mut splits = vec![0usize; self.syms.len()];
        self.step(vars, s, 0, 0, &mut binds, &mut splits, f)
    }

    #[allow(clippy::too_many_arguments)]
    fn step<F>(
        &self,
        vars: &[VarMatcher],
        s: &[TokenId],
        pi: usize,
        pos: usize,
        binds: &mut [(usize, usize)],
        splits: &mut [usize],
        f: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&[(usize, usize)], &[usize]) -> ControlFlow<()>,
    {
        if pi == self.syms.len() {
            return if pos == s.len() {
                f(binds, splits)
            } else {
                ControlFlow::Continue(())
            };
        }
        if pos + self.suffix_min[pi] > s.len() {
            return ControlFlow::Continue(());
        }
        splits[pi] = pos;
        match self.syms[pi] {
            Sym::Tok(t) => {
                if s[pos] == t {
                    return self.step(vars, s, pi + 1, pos + 1, binds, splits, f);
                }
                ControlFlow::Continue(())
            }
            Sym::Var(v) => {
                let (start, len) = binds[v];
                if start != usize::MAX {
                    if pos + len <= s.len() && s[pos..pos + len] == s[start..start + len] {
                        return self.step(vars, s, pi + 1, pos + len, binds, splits, f);
                    }
                    return ControlFlow::Continue(());
                }
                let m = &vars[v];
                let dfa = m.domain.dfa();
                let room = s.len() - pos - self.suffix_min[pi + 1];
                let top = m.max_len.map_or(room, |mx| mx.min(room));
                let mut state = dfa.start();
                for len in 0..=top {
                    if len > 0 {
                        state = dfa.step(state, s[pos + len - 1]);
                    }
                    if !m.live[state as usize] {
                        break;
                    }
                    if len >= m.min_len && dfa.is_accepting(state) {
                        binds[v] = (pos, len);
                        self.step(vars, s, pi + 1, pos + len, binds, splits, f)?;
                        binds[v] = (usize::MAX, 0);
                    }
                }
                ControlFlow::Continue(())
            }
        }
    }
}

/// Every assignment of `vars` under which `pattern` instantiates to `s`.
/// Variables bind left to right, shorter bindings first.
pub fn match_pattern(pattern: &Pattern, s: &TokenString, vars: &[VarDecl]) -> Vec<MatchAssignment> {
    let matchers: Vec<VarMatcher> = vars.iter().map(|v| VarMatcher::new(&v.domain)).collect();
    let cp = CompiledPattern::new(pattern, &matchers);
    let mut out = Vec::new();
    let _ = cp.for_each_match(&matchers, s.ids(), &mut |binds, splits| {
        out.push(MatchAssignment {
            rule: None,
            bindings: binds
                .iter()
                .zip(vars)
                .map(|(&(st, len), decl)| {
                    // variables absent from the pattern stay empty
                    let ids = if st == usize::MAX {
                        Vec::new()
                    } else {
                        s.ids()[st..st + len].to_vec()
                    };
                    TokenString::from_ids(Arc::clone(decl.domain.alphabet()), ids)
                })
                .collect(),
            splits: splits.to_vec(),
        });
        ControlFlow::Continue(())
    });
    out
}

#[derive(Debug, Clone)]
struct CompiledRule {
    vars: Vec<VarMatcher>,
    lhs: CompiledPattern,
    rhs: Vec<RhsItem>,
}

/// A grammar with matching tables precomputed.
#[derive(Debug, Clone)]
pub struct CompiledGrammar {
    grammar: Arc<Grammar>,
    rules: Vec<CompiledRule>,
}

impl CompiledGrammar {
    pub fn new(grammar: Arc<Grammar>) -> Self {
        let rules = grammar
            .rules()
            .iter()
            .map(|r| {
                let vars: Vec<VarMatcher> = r
                    .vars()
                    .iter()
                    .map(|v| VarMatcher::new(&v.domain))
                    .collect();
                CompiledRule {
                    lhs: CompiledPattern::new(r.lhs(), &vars),
                    vars,
                    rhs: r.rhs().to_vec(),
                }
            })
            .collect();
        CompiledGrammar { grammar, rules }
    }

    pub fn grammar(&self) -> &Arc<Grammar> {
        &self.grammar
    }

    /// All (rule, assignment) candidates for `s`, in priority order.
    pub fn matches(&self, s: &TokenString) -> Vec<MatchAssignment> {
        let mut out = Vec::new();
        for (ri, rule) in self.rules.iter().enumerate() {
            let _ = rule
                .lhs
                .for_each_match(&rule.vars, s.ids(), &mut |binds, splits| {
                    out.push(MatchAssignment {
                        rule: Some(ri),
                        bindings: binds
                            .iter()
                            .map(|&(st, len)| {
                                TokenString::from_ids(
                                    Arc::clone(self.grammar.input_alphabet()),
                                    s.ids()[st..st + len].to_vec(),
                                )
                            })
                            .collect(),
                        splits: splits.to_vec(),
                    });
                    ControlFlow::Continue(())
                });
        }
        out
    }

    /// Interprets `s`, with a fresh memo table.
    pub fn interpret_ids(&self, s: &[TokenId], limits: &EngineLimits) -> Result<Vec<TokenId>> {
        limits.validate()?;
        let mut run = Run {
            g: self,
            limits,
            memo: HashMap::new(),
        };
        run.eval(s, 1)
    }

    pub fn interpret(&self, s: &TokenString, limits: &EngineLimits) -> Result<TokenString> {
        if !crate::alphabet::same_alphabet(s.alphabet(), self.grammar.input_alphabet()) {
            return Err(Error::AlphabetMismatch);
        }
        let out = self.interpret_ids(s.ids(), limits)?;
        Ok(TokenString::from_ids(
            Arc::clone(self.grammar.output_alphabet()),
            out,
        ))
    }

    fn render(&self, s: &[TokenId]) -> String {
        self.grammar.input_alphabet().render(s)
    }
}

struct Run<'a> {
    g: &'a CompiledGrammar,
    limits: &'a EngineLimits,
    memo: HashMap<Vec<TokenId>, Vec<TokenId>>,
}

impl Run<'_> {
    fn eval(&mut self, s: &[TokenId], depth: usize) -> Result<Vec<TokenId>> {
        // The empty input transduces to the empty output.
        if s.is_empty() {
            return Ok(Vec::new());
        }
        if let Some(out) = self.memo.get(s) {
            return Ok(out.clone());
        }
        if depth > self.limits.max_depth {
            return Err(Error::DepthExceeded(self.limits.max_depth));
        }
        let (ri, binds) = self.select(s)?;
        let rule = &self.g.rules[ri];
        let bindings: Vec<&[TokenId]> = binds.iter().map(|&(st, len)| &s[st..st + len]).collect();
        let mut out = Vec::new();
        for item in &rule.rhs {
            match item {
                RhsItem::Lit(t) => out.push(*t),
                RhsItem::Call(p) => {
                    let arg = p.instantiate(&bindings);
                    if self.limits.require_strict_decrease && arg.len() >= s.len() {
                        return Err(Error::NonDecreasingRecursion {
                            rule: ri + 1,
                            input: self.g.render(s),
                        });
                    }
                    let sub = self.eval(&arg, depth + 1)?;
                    out.extend_from_slice(&sub);
                }
            }
        }
        self.memo.insert(s.to_vec(), out.clone());
        Ok(out)
    }

    fn select(&self, s: &[TokenId]) -> Result<(usize, Vec<(usize, usize)>)> {
        let mut first: Option<(usize, Vec<(usize, usize)>)> = None;
        let mut count = 0usize;
        let unique = self.limits.ambiguity == AmbiguityMode::RequireUnique;
        for (ri, rule) in self.g.rules.iter().enumerate() {
            let flow = rule.lhs.for_each_match(&rule.vars, s, &mut |binds, _| {
                count += 1;
                if first.is_none() {
                    first = Some((ri, binds.to_vec()));
                }
                if unique && count < 2 {
                    ControlFlow::Continue(())
                } else {
                    ControlFlow::Break(())
                }
            });
            if flow.is_break() {
                break;
            }
        }
        if unique && count >= 2 {
            return Err(Error::AmbiguousMatch {
                input: self.g.render(s),
                candidates: count,
            });
        }
        first.ok_or_else(|| Error::NoRuleMatches(self.g.render(s)))
    }
}

/// Interprets `s` under `g` by first-match recursive rewriting.
pub fn interpret(g: &Grammar, s: &TokenString, limits: &EngineLimits) -> Result<TokenString> {
    CompiledGrammar::new(Arc::new(g.clone())).interpret(s, limits)
}

/// A grammar viewed as a transduction map. Inputs no rule matches, at any
/// recursion level, are outside the map's domain.
#[derive(Debug, Clone)]
pub struct GrammarMap {
    compiled: CompiledGrammar,
    limits: EngineLimits,
    bound: GrowthBound,
}

impl GrammarMap {
    /// Wraps `g`, deriving its growth bound.
    pub fn new(g: Arc<Grammar>, limits: EngineLimits) -> Result<Self> {
        limits.validate()?;
        let bound = derive_growth_bound(&g, &limits)?;
        Ok(GrammarMap {
            compiled: CompiledGrammar::new(g),
            limits,
            bound,
        })
    }

    /// Wraps `g` with a caller-supplied growth bound, checked on every output.
    pub fn with_growth_bound(
        g: Arc<Grammar>,
        limits: EngineLimits,
        bound: GrowthBound,
    ) -> Result<Self> {
        limits.validate()?;
        Ok(GrammarMap {
            compiled: CompiledGrammar::new(g),
            limits,
            bound,
        })
    }

    pub fn grammar(&self) -> &Arc<Grammar> {
        self.compiled.grammar()
    }

    pub fn compiled(&self) -> &CompiledGrammar {
        &self.compiled
    }

    pub fn limits(&self) -> &EngineLimits {
        &self.limits
    }
}

/// Convenience for [`GrammarMap::new`].
pub fn as_transduction_map(g: &Grammar, limits: EngineLimits) -> Result<GrammarMap> {
    GrammarMap::new(Arc::new(g.clone()), limits)
}

impl TransductionMap for GrammarMap {
    fn input_alphabet(&self) -> &Arc<Alphabet> {
        self.compiled.grammar.input_alphabet()
    }

    fn output_alphabet(&self) -> &Arc<Alphabet> {
        self.compiled.grammar.output_alphabet()
    }

    fn growth_bound(&self) -> Option<GrowthBound> {
        Some(self.bound)
    }

    fn eval_ids(&self, input: &[TokenId]) -> Result<Option<Vec<TokenId>>> {
        match self.compiled.interpret_ids(input, &self.limits) {
            Ok(out) => Ok(Some(out)),
            Err(Error::NoRuleMatches(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::all_strings;
    use crate::rule::parse_grammar;
    use proptest::prelude::*;

    fn ts(g: &Grammar, s: &str) -> TokenString {
        TokenString::parse(g.input_alphabet(), s).unwrap()
    }

    fn run(g: &Grammar, s: &str) -> Result<String> {
        interpret(g, &ts(g, s), &EngineLimits::default()).map(|o| o.to_string())
    }

    const LAKE: &str = "\
input-alphabet zup fep blicket kiki lug
output-alphabet green rose
forall x1 in SIGMA1, x2 in SIGMA1: T(x1 \"lug\" x2) = T(x2) T(x1) T(x2) T(x1) T(x1)
forall x1 in SIGMA1, x2 in SIGMA1: T(x1 \"kiki\" x2) = T(x1) T(x2)
forall x1 in SIGMA1: T(x1 \"blicket\") = T(x1) T(x1)
forall x1 in SIGMA1, x2 in SIGMA1: T(x1 x2) = T(x1) T(x2)
T(\"zup\") = \"green\"
T(\"fep\") = \"rose\"
";

    #[test]
    fn match_examples() {
        let g = parse_grammar(
            "input-alphabet RUN WALK LEFT AND a b c\noutput-alphabet o\n\
             forall x1 in SIGMA+, x2 in SIGMA+: T(x1 \"AND\" x2) = T(x1) T(x2)\n\
             forall x1 in SIGMA+, x2 in SIGMA+: T(x1 x2) = T(x1) T(x2)\n\
             forall x1 in SIGMA+: T(x1 x1) = T(x1)\n",
        )
        .unwrap();
        let r = g.rules();
        let m = match_pattern(r[0].lhs(), &ts(&g, "RUN LEFT AND WALK"), r[0].vars());
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].bindings[0].to_string(), "RUN LEFT");
        assert_eq!(m[0].bindings[1].to_string(), "WALK");
        assert_eq!(m[0].splits, [0, 2, 3]);

        let m = match_pattern(r[1].lhs(), &ts(&g, "a b c"), r[1].vars());
        let got: Vec<(String, String)> = m
            .iter()
            .map(|a| (a.bindings[0].to_string(), a.bindings[1].to_string()))
            .collect();
        assert_eq!(
            got,
            [("a".into(), "b c".into()), ("a b".into(), "c".into())]
        );

        let m = match_pattern(r[2].lhs(), &ts(&g, "a b a b"), r[2].vars());
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].bindings[0].to_string(), "a b");
        assert!(match_pattern(r[2].lhs(), &ts(&g, "a b a"), r[2].vars()).is_empty());
    }

    #[test]
    fn lake_interpretation() {
        let g = parse_grammar(LAKE).unwrap();
        assert_eq!(run(&g, "zup").unwrap(), "green");
        assert_eq!(
            run(&g, "zup lug fep").unwrap(),
            "rose green rose green green"
        );
        assert_eq!(run(&g, "zup kiki fep").unwrap(), "green rose");
        assert_eq!(run(&g, "fep blicket").unwrap(), "rose rose");
        assert!(matches!(run(&g, "kiki"), Err(Error::NoRuleMatches(_))));
        let e = TokenString::parse(g.input_alphabet(), "wug");
        assert!(e.is_err());
    }

    #[test]
    fn strict_decrease_and_depth() {
        let g = parse_grammar(
            "input-alphabet a b\noutput-alphabet a\nforall x1 in SIGMA+: T(x1 \"b\") = T(\"b\" x1)\nT(\"a\") = \"a\"\n",
        )
        .unwrap();
        let err = run(&g, "a b").unwrap_err();
        assert!(
            matches!(err, Error::NonDecreasingRecursion { rule: 1, .. }),
            "{err:?}"
        );
        let lax = EngineLimits {
            require_strict_decrease: false,
            max_depth: 8,
            ..EngineLimits::default()
        };
        // T(a b) -> T(b a) -> no rule for "b a"
        let err = interpret(&g, &ts(&g, "a b"), &lax).unwrap_err();
        assert!(matches!(err, Error::NoRuleMatches(_)), "{err:?}");
        let g = parse_grammar(
            "input-alphabet a\noutput-alphabet a\nforall x1 in SIGMA+: T(x1) = T(x1)\n",
        )
        .unwrap();
        let err = interpret(&g, &ts(&g, "a"), &lax).unwrap_err();
        assert!(matches!(err, Error::DepthExceeded(8)), "{err:?}");
    }

    #[test]
    fn ambiguity_modes() {
        let g = parse_grammar(
            "input-alphabet a b\noutput-alphabet a b\n\
             forall x1 in SIGMA+, x2 in SIGMA+: T(x1 x2) = T(x2) T(x1)\n\
             T(\"a\") = \"a\"; T(\"b\") = \"b\"\n",
        )
        .unwrap();
        // first split wins: (a | b a) -> T(b a) a -> (b | a) -> a b a
        assert_eq!(run(&g, "a b a").unwrap(), "a b a");
        assert_eq!(run(&g, "a b b").unwrap(), "b b a");
        let strict = EngineLimits {
            ambiguity: AmbiguityMode::RequireUnique,
            ..EngineLimits::default()
        };
        assert!(interpret(&g, &ts(&g, "a b"), &strict).is_ok());
        let err = interpret(&g, &ts(&g, "a b a"), &strict).unwrap_err();
        assert!(
            matches!(err, Error::AmbiguousMatch { candidates: 2, .. }),
            "{err:?}"
        );
    }

    #[test]
    fn grammar_map_undefined_points() {
        let g = Arc::new(parse_grammar(LAKE).unwrap());
        let m = GrammarMap::new(g.clone(), EngineLimits::default()).unwrap();
        assert_eq!(m.eval_ids(&[3]).unwrap(), None);
        assert_eq!(m.eval_ids(&[]).unwrap(), Some(vec![]));
        let out = m.apply(&ts(&g, "zup lug fep")).unwrap().unwrap();
        assert_eq!(out.len(), 5);
    }

    const HOMOMORPHISM: &str = "\
input-alphabet a b c
output-alphabet x y
forall x1 in SIGMA1, x2 in SIGMA+: T(x1 x2) = T(x1) T(x2)
T(\"a\") = \"x\"
T(\"b\") = \"y x\"
T(\"c\") =
";

    #[test]
    fn homomorphism_matches_tokenwise_oracle() {
        let g = parse_grammar(HOMOMORPHISM).unwrap();
        let image: [&[TokenId]; 3] = [&[0], &[1, 0], &[]];
        let cg = CompiledGrammar::new(Arc::new(g));
        for len in 0..=6 {
            for s in all_strings(3, len) {
                let expect: Vec<TokenId> = s
                    .iter()
                    .flat_map(|&t| image[t as usize].iter().copied())
                    .collect();
                assert_eq!(
                    cg.interpret_ids(&s, &EngineLimits::default()).unwrap(),
                    expect
                );
            }
        }
    }

    #[test]
    fn gordon_extension_by_composition() {
        let g = parse_grammar(
            "input-alphabet p q r\noutput-alphabet P Q R\n\
             forall x1 in SIGMA+, x2 in SIGMA+: T(x1 x2) = T(x1) T(x2)\n\
             T(\"p\") = \"P\"; T(\"q\") = \"Q\"; T(\"r\") = \"R\"\n",
        )
        .unwrap();
        let cg = CompiledGrammar::new(Arc::new(g));
        for k in 1..=6 {
            for s in all_strings(3, k) {
                assert_eq!(cg.interpret_ids(&s, &EngineLimits::default()).unwrap(), s);
            }
        }
    }

    /// Random grammars: ground rules for some tokens plus shorter-argument rules.
    fn arb_grammar() -> impl Strategy<Value = String> {
        let sym = prop_oneof![
            Just("x1".to_string()),
            Just("x2".to_string()),
            prop::sample::select(vec!["\"a\"", "\"b\""]).prop_map(String::from),
        ];
        let rule = (
            prop::collection::vec(sym.clone(), 2..4),
            prop::collection::vec(0usize..3, 0..4),
        )
            .prop_map(|(lhs, picks)| {
                let n = lhs.len();
                let calls: Vec<String> = picks
                    .iter()
                    .map(|&p| {
                        let take = 1 + p % (n - 1);
                        format!("T({})", lhs[..take].join(" "))
                    })
                    .collect();
                format!(
                    "forall x1 in SIGMA+, x2 in SIGMA+: T({}) = {} \"o\"",
                    lhs.join(" "),
                    calls.join(" ")
                )
            });
        (prop::collection::vec(rule, 1..4), any::<bool>()).prop_map(|(rules, ground_b)| {
            let mut s = String::from("input-alphabet a b\noutput-alphabet o\n");
            for r in rules {
                s.push_str(&r);
                s.push('\n');
            }
            s.push_str("T(\"a\") = \"o\"\n");
            if ground_b {
                s.push_str("T(\"b\") = \"o o\"\n");
            }
            s
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn interpretation_terminates_and_is_deterministic(src in arb_grammar(), input in prop::collection::vec(0u32..2, 1..7)) {
            // Rules whose variables are missing from the left side are rejected; skip those.
            let Ok(g) = parse_grammar(&src) else { return Ok(()); };
            let cg = CompiledGrammar::new(Arc::new(g));
            let lim = EngineLimits::default();
            let a = cg.interpret_ids(&input, &lim);
            let b = cg.interpret_ids(&input, &lim);
            match (&a, &b) {
                (Ok(x), Ok(y)) => prop_assert_eq!(x, y),
                (Err(x), Err(y)) => prop_assert_eq!(x.to_string(), y.to_string()),
                _ => prop_assert!(false, "nondeterministic"),
            }
            if let Err(e) = a {
                prop_assert!(matches!(e, Error::NoRuleMatches(_) | Error::NonDecreasingRecursion { .. }), "{}", e);
            }
        }

        #[test]
        fn matches_reproduce_input(input in prop::collection::vec(0u32..3, 0..8), pat in prop::collection::vec(0usize..5, 1..5)) {
            let g = parse_grammar(
                "input-alphabet a b c\noutput-alphabet o\nforall x1 in SIGMA*, x2 in SIGMA+, x3 in regex(a b*): T(x1 x2 x3) = \"o\"\n",
            ).unwrap();
            let r = &g.rules()[0];
            let syms: Vec<Sym> = pat.iter().map(|&p| if p < 3 { Sym::Var(p) } else { Sym::Tok((p - 3) as TokenId) }).collect();
            let p = Pattern(syms);
            let s = TokenString::new(g.input_alphabet().clone(), input.clone()).unwrap();
            let found = match_pattern(&p, &s, r.vars());
            // oracle: brute-force every binding triple of substrings
            let mut expected = 0usize;
            let subs: Vec<Vec<TokenId>> = {
                let mut v = vec![Vec::new()];
                for i in 0..input.len() { for j in i + 1..=input.len() { v.push(input[i..j].to_vec()); } }
                v.sort(); v.dedup(); v
            };
            let used: Vec<usize> = (0..3).filter(|&v| p.multiplicity(v) > 0).collect();
            let choices = |v: usize| -> Vec<Vec<TokenId>> {
                if used.contains(&v) { subs.iter().filter(|w| r.vars()[v].domain.contains(w)).cloned().collect() } else { vec![Vec::new()] }
            };
            for b0 in choices(0) { for b1 in choices(1) { for b2 in choices(2) {
                if p.instantiate(&[&b0, &b1, &b2]) == input { expected += 1; }
            }}}
            prop_assert_eq!(found.len(), expected);
            for m in &found {
                let ids: Vec<&[TokenId]> = m.bindings.iter().map(|b| b.ids()).collect();
                prop_assert_eq!(p.instantiate(&ids), input.clone());
                for (v, b) in m.bindings.iter().enumerate() {
                    if used.contains(&v) { prop_assert!(r.vars()[v].domain.contains(b.ids())); }
                }
            }
        }
    }
}
