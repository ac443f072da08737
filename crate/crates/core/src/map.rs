//! Transduction maps: deterministic, possibly partial functions from input
//! strings to output strings, each carrying a length-growth guarantee.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::alphabet::{all_strings, same_alphabet, Alphabet, TokenId, TokenString};
use crate::error::{Error, Result};

/// Guarantee `len(T(s)) <= c * len(s)^d` for every input `s` in the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthBound {
    pub c: f64,
    pub d: u32,
}

impl GrowthBound {
    pub fn new(c: f64, d: u32) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) || d == 0 {
            return Err(Error::InvalidArgument(format!(
                "growth bound needs c > 0 and d >= 1, got c={c}, d={d}"
            )));
        }
        Ok(GrowthBound { c, d })
    }

    pub fn linear(c: f64) -> Self {
        GrowthBound::new(c, 1).expect("positive constant")
    }

    pub fn limit(&self, input_len: usize) -> f64 {
        self.c * (input_len as f64).powi(self.d as i32)
    }

    pub fn admits(&self, input_len: usize, output_len: usize) -> bool {
        // relative slack absorbs rounding in c for rational constants like 5/3
        output_len as f64 <= self.limit(input_len) * (1.0 + 1e-12)
    }

    pub(crate) fn check(&self, input_len: usize, output_len: usize) -> Result<()> {
        if self.admits(input_len, output_len) {
            Ok(())
        } else {
            Err(Error::GrowthBoundViolation {
                input_len,
                output_len,
                bound: self.limit(input_len),
            })
        }
    }
}

impl fmt::Display for GrowthBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C={} D={}", self.c, self.d)
    }
}

/// A deterministic map `Σ* -> Λ*`, possibly undefined on some inputs.
///
/// Implementors provide [`eval_ids`](TransductionMap::eval_ids); callers use
/// [`apply_ids`](TransductionMap::apply_ids) or [`apply`](TransductionMap::apply),
/// which enforce the declared growth bound on every evaluation.
pub trait TransductionMap: Send + Sync {
    fn input_alphabet(&self) -> &Arc<Alphabet>;
    fn output_alphabet(&self) -> &Arc<Alphabet>;
    fn growth_bound(&self) -> Option<GrowthBound>;

    /// `Ok(None)` means the map is undefined on `input`.
    fn eval_ids(&self, input: &[TokenId]) -> Result<Option<Vec<TokenId>>>;

    fn apply_ids(&self, input: &[TokenId]) -> Result<Option<Vec<TokenId>>> {
        let out = self.eval_ids(input)?;
        if let (Some(o), Some(b)) = (&out, self.growth_bound()) {
            b.check(input.len(), o.len())?;
        }
        Ok(out)
    }

    fn apply(&self, input: &TokenString) -> Result<Option<TokenString>> {
        if !same_alphabet(input.alphabet(), self.input_alphabet()) {
            return Err(Error::AlphabetMismatch);
        }
        Ok(self
            .apply_ids(input.ids())?
            .map(|o| TokenString::from_ids(Arc::clone(self.output_alphabet()), o)))
    }
}

impl<T: TransductionMap + ?Sized> TransductionMap for Arc<T> {
    fn input_alphabet(&self) -> &Arc<Alphabet> {
        (**self).input_alphabet()
    }
    fn output_alphabet(&self) -> &Arc<Alphabet> {
        (**self).output_alphabet()
    }
    fn growth_bound(&self) -> Option<GrowthBound> {
        (**self).growth_bound()
    }
    fn eval_ids(&self, input: &[TokenId]) -> Result<Option<Vec<TokenId>>> {
        (**self).eval_ids(input)
    }
}

impl<T: TransductionMap + ?Sized> TransductionMap for &T {
    fn input_alphabet(&self) -> &Arc<Alphabet> {
        (**self).input_alphabet()
    }
    fn output_alphabet(&self) -> &Arc<Alphabet> {
        (**self).output_alphabet()
    }
    fn growth_bound(&self) -> Option<GrowthBound> {
        (**self).growth_bound()
    }
    fn eval_ids(&self, input: &[TokenId]) -> Result<Option<Vec<TokenId>>> {
        (**self).eval_ids(input)
    }
}

/// A finite lookup table; undefined outside its entries.
#[derive(Debug, Clone)]
pub struct TableMap {
    input: Arc<Alphabet>,
    output: Arc<Alphabet>,
    entries: HashMap<Vec<TokenId>, Vec<TokenId>>,
    bound: Option<GrowthBound>,
}

impl TableMap {
    /// Builds a table; conflicting outputs for one input are rejected. The
    /// growth bound is the tightest linear one the entries admit.
    pub fn new(
        input: Arc<Alphabet>,
        output: Arc<Alphabet>,
        pairs: impl IntoIterator<Item = (Vec<TokenId>, Vec<TokenId>)>,
    ) -> Result<Self> {
        let mut entries = HashMap::new();
        for (i, o) in pairs {
            if let Some(prev) = entries.insert(i.clone(), o.clone()) {
                if prev != o {
                    return Err(Error::InvalidArgument(format!(
                        "conflicting outputs for `{}`",
                        input.render(&i)
                    )));
                }
            }
        }
        let bound = linear_fit(entries.iter().map(|(i, o)| (i.len(), o.len())));
        Ok(TableMap {
            input,
            output,
            entries,
            bound,
        })
    }

    pub fn from_strings(pairs: &[(TokenString, TokenString)]) -> Result<Self> {
        let (first_in, first_out) = pairs.first().ok_or(Error::EmptyDataset)?;
        let input = Arc::clone(first_in.alphabet());
        let output = Arc::clone(first_out.alphabet());
        for (i, o) in pairs {
            if !same_alphabet(i.alphabet(), &input) || !same_alphabet(o.alphabet(), &output) {
                return Err(Error::AlphabetMismatch);
            }
        }
        TableMap::new(
            input,
            output,
            pairs
                .iter()
                .map(|(i, o)| (i.ids().to_vec(), o.ids().to_vec())),
        )
    }

    /// Parses `input<TAB>output` lines. Without explicit alphabets, they are
    /// collected from the data in order of first appearance.
    pub fn from_tsv(
        text: &str,
        input: Option<Arc<Alphabet>>,
        output: Option<Arc<Alphabet>>,
    ) -> Result<Self> {
        let mut raw = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (i, o) = line.split_once('\t').ok_or_else(|| Error::Format {
                line: n + 1,
                msg: "expected `input<TAB>output`".into(),
            })?;
            raw.push((n + 1, i, o));
        }
        if raw.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let collect = |output_side: bool| -> Result<Arc<Alphabet>> {
            let mut seen = Vec::<String>::new();
            for r in &raw {
                let text = if output_side { r.2 } else { r.1 };
                for t in text.split_whitespace() {
                    if !seen.iter().any(|s| s == t) {
                        seen.push(t.to_string());
                    }
                }
            }
            Ok(Arc::new(Alphabet::new(seen)?))
        };
        let input = match input {
            Some(a) => a,
            None => collect(false)?,
        };
        let output = match output {
            Some(a) => a,
            None => collect(true)?,
        };
        let mut pairs = Vec::with_capacity(raw.len());
        for (n, i, o) in &raw {
            let wrap = |e: Error| Error::Format {
                line: *n,
                msg: e.to_string(),
            };
            pairs.push((
                input.encode(i).map_err(wrap)?,
                output.encode(o).map_err(wrap)?,
            ));
        }
        TableMap::new(input, output, pairs)
    }

    pub fn with_growth_bound(mut self, bound: GrowthBound) -> Self {
        self.bound = Some(bound);
        self
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Tightest `c` with `out <= c * in` over the given length pairs.
pub(crate) fn linear_fit(pairs: impl Iterator<Item = (usize, usize)>) -> Option<GrowthBound> {
    let mut c: f64 = 0.0;
    for (i, o) in pairs {
        if i == 0 {
            if o > 0 {
                return None;
            }
            continue;
        }
        c = c.max(o as f64 / i as f64);
    }
    Some(GrowthBound::linear(if c > 0.0 { c } else { 1.0 }))
}

impl TransductionMap for TableMap {
    fn input_alphabet(&self) -> &Arc<Alphabet> {
        &self.input
    }
    fn output_alphabet(&self) -> &Arc<Alphabet> {
        &self.output
    }
    fn growth_bound(&self) -> Option<GrowthBound> {
        self.bound
    }
    fn eval_ids(&self, input: &[TokenId]) -> Result<Option<Vec<TokenId>>> {
        Ok(self.entries.get(input).cloned())
    }
}

type MapFn = dyn Fn(&[TokenId]) -> Option<Vec<TokenId>> + Send + Sync;

/// A map given by a Rust closure.
pub struct FnMap {
    input: Arc<Alphabet>,
    output: Arc<Alphabet>,
    bound: Option<GrowthBound>,
    f: Box<MapFn>,
}

impl FnMap {
    pub fn new<F>(
        input: Arc<Alphabet>,
        output: Arc<Alphabet>,
        bound: Option<GrowthBound>,
        f: F,
    ) -> Self
    where
        F: Fn(&[TokenId]) -> Option<Vec<TokenId>> + Send + Sync + 'static,
    {
        FnMap {
            input,
            output,
            bound,
            f: Box::new(f),
        }
    }
}

impl TransductionMap for FnMap {
    fn input_alphabet(&self) -> &Arc<Alphabet> {
        &self.input
    }
    fn output_alphabet(&self) -> &Arc<Alphabet> {
        &self.output
    }
    fn growth_bound(&self) -> Option<GrowthBound> {
        self.bound
    }
    fn eval_ids(&self, input: &[TokenId]) -> Result<Option<Vec<TokenId>>> {
        Ok((self.f)(input))
    }
}

/// Outcome of a bounded meaning-preservation check.
#[derive(Debug, Clone, PartialEq)]
pub struct MeaningReport {
    pub checked: usize,
    /// Inputs on which some map was undefined.
    pub skipped: usize,
    /// Inputs `s` with `i2m(t12(s)) != i1m(s)`, in canonical order.
    pub counterexamples: Vec<TokenString>,
}

impl MeaningReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Checks `i2m ∘ t12 = i1m` on every input of length at most `max_len`.
pub fn check_meaning_preservation(
    t12: &dyn TransductionMap,
    i1m: &dyn TransductionMap,
    i2m: &dyn TransductionMap,
    max_len: usize,
) -> Result<MeaningReport> {
    if t12.input_alphabet() != i1m.input_alphabet()
        || t12.output_alphabet() != i2m.input_alphabet()
        || i1m.output_alphabet() != i2m.output_alphabet()
    {
        return Err(Error::AlphabetMismatch);
    }
    let sigma = t12.input_alphabet();
    let mut report = MeaningReport {
        checked: 0,
        skipped: 0,
        counterexamples: Vec::new(),
    };
    for len in 0..=max_len {
        for s in all_strings(sigma.len(), len) {
            let direct = i1m.apply_ids(&s)?;
            let via = match t12.apply_ids(&s)? {
                Some(mid) => i2m.apply_ids(&mid)?,
                None => None,
            };
            match (direct, via) {
                (Some(a), Some(b)) => {
                    report.checked += 1;
                    if a != b {
                        report
                            .counterexamples
                            .push(TokenString::from_ids(Arc::clone(sigma), s));
                    }
                }
                _ => report.skipped += 1,
            }
        }
    }
    Ok(report)
}
