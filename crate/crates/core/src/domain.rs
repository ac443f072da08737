//! Regular variable domains: the classes a quantified rule variable ranges over.

use std::fmt;
use std::sync::Arc;

use crate::alphabet::{Alphabet, TokenId, TokenString};
use crate::automaton::{compile_regex, Dfa};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DomainKind {
    /// All strings, including the empty one.
    All,
    /// All non-empty strings.
    NonEmpty,
    /// Strings of exactly one token.
    Single,
    /// An explicit finite set.
    Finite(Vec<Vec<TokenId>>),
    /// A token-level regular expression.
    Regex(String),
}

/// A regular language over an alphabet, recognized by a complete DFA.
#[derive(Clone)]
pub struct VariableDomain {
    alphabet: Arc<Alphabet>,
    kind: DomainKind,
    dfa: Dfa,
}

impl VariableDomain {
    pub fn all(alphabet: Arc<Alphabet>) -> Self {
        let dfa = Dfa::universal(alphabet.len());
        VariableDomain {
            alphabet,
            kind: DomainKind::All,
            dfa,
        }
    }

    pub fn non_empty(alphabet: Arc<Alphabet>) -> Self {
        let dfa = Dfa::non_empty(alphabet.len());
        VariableDomain {
            alphabet,
            kind: DomainKind::NonEmpty,
            dfa,
        }
    }

    pub fn single(alphabet: Arc<Alphabet>) -> Self {
        let dfa = Dfa::single_token(alphabet.len());
        VariableDomain {
            alphabet,
            kind: DomainKind::Single,
            dfa,
        }
    }

    /// A finite set of strings; duplicates collapse and members are stored in
    /// canonical order.
    pub fn finite(alphabet: Arc<Alphabet>, mut members: Vec<Vec<TokenId>>) -> Self {
        members.sort_by(|a, b| crate::alphabet::canonical_cmp(a, b));
        members.dedup();
        let dfa = Dfa::finite(alphabet.len(), members.iter().map(Vec::as_slice));
        VariableDomain {
            alphabet,
            kind: DomainKind::Finite(members),
            dfa,
        }
    }

    pub fn regex(alphabet: Arc<Alphabet>, pattern: &str) -> Result<Self> {
        let dfa = compile_regex(pattern, &alphabet)?;
        Ok(VariableDomain {
            alphabet,
            kind: DomainKind::Regex(pattern.trim().to_string()),
            dfa,
        })
    }

    /// Wraps an arbitrary recognizer over `alphabet`.
    pub fn from_dfa(alphabet: Arc<Alphabet>, dfa: Dfa, description: &str) -> Self {
        assert_eq!(dfa.symbols(), alphabet.len());
        VariableDomain {
            alphabet,
            kind: DomainKind::Regex(description.to_string()),
            dfa,
        }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    pub fn contains(&self, s: &[TokenId]) -> bool {
        self.dfa.accepts(s)
    }

    pub fn contains_string(&self, s: &TokenString) -> bool {
        crate::alphabet::same_alphabet(s.alphabet(), &self.alphabet) && self.contains(s.ids())
    }

    /// Members of length `len`, lexicographic by declared token order.
    pub fn enumerate(&self, len: usize) -> Vec<Vec<TokenId>> {
        match &self.kind {
            DomainKind::Finite(m) => m.iter().filter(|w| w.len() == len).cloned().collect(),
            _ => self.dfa.enumerate_len(len),
        }
    }

    pub fn enumerate_strings(&self, len: usize) -> Vec<TokenString> {
        self.enumerate(len)
            .into_iter()
            .map(|w| TokenString::from_ids(Arc::clone(&self.alphabet), w))
            .collect()
    }

    /// Number of members of length `len`, without materializing them.
    pub fn count(&self, len: usize) -> u128 {
        self.dfa.count_len(len)
    }

    pub fn min_len(&self) -> Option<usize> {
        self.dfa.min_len()
    }

    /// Longest member length; `None` for infinite (or empty) domains.
    pub fn max_len(&self) -> Option<usize> {
        self.dfa.max_len()
    }

    pub fn is_empty(&self) -> bool {
        self.dfa.is_empty_language()
    }

    pub fn is_finite(&self) -> bool {
        self.dfa.is_finite()
    }

    /// DSL spelling of this domain when it is anonymous. `sigma` is the
    /// builtin prefix (`SIGMA` for inputs, `LAMBDA` for outputs).
    pub fn describe(&self, sigma: &str) -> String {
        match &self.kind {
            DomainKind::All => format!("{sigma}*"),
            DomainKind::NonEmpty => format!("{sigma}+"),
            DomainKind::Single => format!("{sigma}1"),
            DomainKind::Finite(m) => {
                let items: Vec<String> = m
                    .iter()
                    .map(|w| format!("\"{}\"", self.alphabet.render(w)))
                    .collect();
                format!("{{{}}}", items.join(", "))
            }
            DomainKind::Regex(p) => format!("regex({p})"),
        }
    }
}

impl PartialEq for VariableDomain {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet && self.kind == other.kind
    }
}

impl fmt::Debug for VariableDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VariableDomain({})", self.describe("SIGMA"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::all_strings;
    use proptest::prelude::*;

    fn alpha(tokens: &[&str]) -> Arc<Alphabet> {
        Arc::new(Alphabet::new(tokens.iter().copied()).unwrap())
    }

    #[test]
    fn sigma_star_cube() {
        let d = VariableDomain::all(alpha(&["a", "b"]));
        let got: Vec<String> = d
            .enumerate_strings(2)
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(got, ["a a", "a b", "b a", "b b"]);
        assert_eq!(d.count(5), 32);
    }

    #[test]
    fn finite_set() {
        let a = alpha(&["zup", "fep"]);
        let d = VariableDomain::finite(Arc::clone(&a), vec![vec![1], vec![0]]);
        let got: Vec<String> = d
            .enumerate_strings(1)
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(got, ["zup", "fep"]);
        assert_eq!(d.count(2), 0);
        assert_eq!(d.max_len(), Some(1));
    }

    #[test]
    fn regex_domain_agrees_with_filter() {
        let a = alpha(&["a", "b"]);
        let d = VariableDomain::regex(Arc::clone(&a), "a* b").unwrap();
        let brute: Vec<Vec<TokenId>> = all_strings(2, 3)
            .filter(|w| w[..2].iter().all(|&t| t == 0) && w[2] == 1)
            .collect();
        assert_eq!(d.enumerate(3), brute);
        assert_eq!(d.count(3), 1);
    }

    #[test]
    fn non_empty_excludes_epsilon() {
        let d = VariableDomain::non_empty(alpha(&["a", "b"]));
        assert_eq!(d.count(0), 0);
        assert!(d.enumerate(0).is_empty());
    }

    #[test]
    fn geometric_total() {
        for k in 2..=4usize {
            let names: Vec<String> = (0..k).map(|i| format!("t{i}")).collect();
            let d = VariableDomain::all(Arc::new(Alphabet::new(names).unwrap()));
            for big_l in 0..=6u32 {
                let total: u128 = (0..=big_l as usize).map(|l| d.count(l)).sum();
                let k = k as u128;
                assert_eq!(total, (k.pow(big_l + 1) - 1) / (k - 1));
            }
        }
    }

    fn random_dfa() -> impl Strategy<Value = Dfa> {
        (1usize..=5, 1usize..=3).prop_flat_map(|(n, k)| {
            (
                Just(k),
                0..n as u32,
                prop::collection::vec(any::<bool>(), n),
                prop::collection::vec(0..n as u32, n * k),
            )
                .prop_map(|(k, s, acc, tr)| Dfa::from_parts(k, s, acc, tr).unwrap())
        })
    }

    proptest! {
        #[test]
        fn count_matches_enumeration(dfa in random_dfa()) {
            let k = dfa.symbols();
            let names: Vec<String> = (0..k).map(|i| format!("t{i}")).collect();
            let d = VariableDomain::from_dfa(Arc::new(Alphabet::new(names).unwrap()), dfa.clone(), "random");
            for len in 0..=6 {
                let e = d.enumerate(len);
                prop_assert_eq!(e.len() as u128, d.count(len));
                prop_assert!(e.len() as u128 <= (k as u128).pow(len as u32));
                prop_assert!(e.windows(2).all(|w| w[0] < w[1]));
                let brute: Vec<_> = all_strings(k, len).filter(|w| dfa.accepts(w)).collect();
                prop_assert_eq!(e, brute);
            }
        }
    }
}
