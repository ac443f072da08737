//! Alphabets and token strings.
//!
//! Tokens are atomic text units (`"zup"`, `"RUN"`, `"l1'"`), stored as indices
//! into their [`Alphabet`]. The declared order of an alphabet fixes the
//! canonical (lexicographic) order used by every enumeration in the crate.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type TokenId = u32;

/// Symbols reserved for machine notation; never valid tokens.
pub const RESERVED: &[&str] = &["@eps@", "⊳", "□", "←", "→"];

#[derive(Clone)]
pub struct Alphabet {
    tokens: Vec<String>,
    index: HashMap<String, TokenId>,
}

impl Alphabet {
    pub fn new<I, S>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        if tokens.is_empty() {
            return Err(Error::InvalidAlphabet("alphabet is empty".into()));
        }
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if t.is_empty() || t.chars().any(char::is_whitespace) {
                return Err(Error::InvalidAlphabet(format!("bad token {t:?}")));
            }
            if RESERVED.contains(&t.as_str()) {
                return Err(Error::InvalidAlphabet(format!("`{t}` is reserved")));
            }
            if index.insert(t.clone(), i as TokenId).is_some() {
                return Err(Error::InvalidAlphabet(format!("duplicate token `{t}`")));
            }
        }
        Ok(Alphabet { tokens, index })
    }

    /// Parses the one-token-per-line format; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        Alphabet::new(
            text.lines()
                .map(|l| l.split('#').next().unwrap_or("").trim())
                .filter(|l| !l.is_empty()),
        )
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.tokens {
            out.push_str(t);
            out.push('\n');
        }
        out
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<TokenId> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: TokenId) -> &str {
        &self.tokens[id as usize]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    /// Renders token ids as space-separated text.
    pub fn render(&self, ids: &[TokenId]) -> String {
        let mut out = String::new();
        for (i, &t) in ids.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(self.token(t));
        }
        out
    }

    /// Parses space-separated tokens into ids.
    pub fn encode(&self, text: &str) -> Result<Vec<TokenId>> {
        text.split_whitespace()
            .map(|t| self.id(t).ok_or_else(|| Error::UnknownToken(t.to_string())))
            .collect()
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.tokens == other.tokens
    }
}

impl Eq for Alphabet {}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Alphabet").field(&self.tokens).finish()
    }
}

pub(crate) fn same_alphabet(a: &Arc<Alphabet>, b: &Arc<Alphabet>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// A finite sequence of tokens drawn from one alphabet.
#[derive(Clone)]
pub struct TokenString {
    alphabet: Arc<Alphabet>,
    tokens: Vec<TokenId>,
}

impl TokenString {
    pub fn new(alphabet: Arc<Alphabet>, tokens: Vec<TokenId>) -> Result<Self> {
        let n = alphabet.len() as TokenId;
        if let Some(&bad) = tokens.iter().find(|&&t| t >= n) {
            return Err(Error::UnknownToken(format!("#{bad}")));
        }
        Ok(TokenString { alphabet, tokens })
    }

    pub(crate) fn from_ids(alphabet: Arc<Alphabet>, tokens: Vec<TokenId>) -> Self {
        debug_assert!(tokens.iter().all(|&t| (t as usize) < alphabet.len()));
        TokenString { alphabet, tokens }
    }

    pub fn parse(alphabet: &Arc<Alphabet>, text: &str) -> Result<Self> {
        Ok(TokenString {
            tokens: alphabet.encode(text)?,
            alphabet: Arc::clone(alphabet),
        })
    }

    pub fn empty(alphabet: Arc<Alphabet>) -> Self {
        TokenString {
            alphabet,
            tokens: Vec::new(),
        }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn ids(&self) -> &[TokenId] {
        &self.tokens
    }

    pub fn into_ids(self) -> Vec<TokenId> {
        self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> + '_ {
        self.tokens.iter().map(|&t| self.alphabet.token(t))
    }

    pub fn concat(&self, other: &TokenString) -> Result<TokenString> {
        if !same_alphabet(&self.alphabet, &other.alphabet) {
            return Err(Error::AlphabetMismatch);
        }
        let mut tokens = self.tokens.clone();
        tokens.extend_from_slice(&other.tokens);
        Ok(TokenString::from_ids(Arc::clone(&self.alphabet), tokens))
    }
}

impl PartialEq for TokenString {
    fn eq(&self, other: &Self) -> bool {
        self.tokens == other.tokens && same_alphabet(&self.alphabet, &other.alphabet)
    }
}

impl Eq for TokenString {}

impl std::hash::Hash for TokenString {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.tokens.hash(state);
    }
}

impl PartialOrd for TokenString {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: shorter first, then lexicographic by token index.
impl Ord for TokenString {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        canonical_cmp(&self.tokens, &other.tokens)
    }
}

pub fn canonical_cmp(a: &[TokenId], b: &[TokenId]) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

impl fmt::Display for TokenString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.alphabet.render(&self.tokens))
    }
}

impl fmt::Debug for TokenString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_string())
    }
}

/// Every string over an alphabet of `size` tokens with exactly `len` tokens,
/// in lexicographic order.
pub fn all_strings(size: usize, len: usize) -> impl Iterator<Item = Vec<TokenId>> {
    let total = (size as u128).checked_pow(len as u32);
    let mut cur: Option<Vec<TokenId>> = match total {
        Some(0) => None,
        _ => Some(vec![0; len]),
    };
    std::iter::from_fn(move || {
        let out = cur.take()?;
        let mut next = out.clone();
        let mut i = len;
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            if (next[i] as usize) + 1 < size {
                next[i] += 1;
                cur = Some(next);
                break;
            }
            next[i] = 0;
        }
        Some(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_reserved() {
        assert!(Alphabet::new(["a", "a"]).is_err());
        assert!(Alphabet::new(["a", "@eps@"]).is_err());
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
        assert!(Alphabet::new(["a b"]).is_err());
    }

    #[test]
    fn parses_one_token_per_line() {
        let a = Alphabet::parse("zup\nfep # comment\n\nl1'\n").unwrap();
        assert_eq!(a.tokens(), ["zup", "fep", "l1'"]);
        assert_eq!(Alphabet::parse(&a.to_text()).unwrap(), a);
    }

    #[test]
    fn token_strings_roundtrip_text() {
        let a = Arc::new(Alphabet::new(["RUN", "LEFT", "AND"]).unwrap());
        let s = TokenString::parse(&a, "RUN  LEFT AND").unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.to_string(), "RUN LEFT AND");
        assert!(TokenString::parse(&a, "RUN JUMP").is_err());
        assert!(TokenString::new(a, vec![7]).is_err());
    }

    #[test]
    fn all_strings_is_lexicographic() {
        let v: Vec<_> = all_strings(2, 2).collect();
        assert_eq!(v, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(all_strings(3, 0).count(), 1);
        assert_eq!(all_strings(3, 4).count(), 81);
    }
}
