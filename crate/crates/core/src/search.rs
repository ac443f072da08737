//! Exhaustive enumeration and `Err_beta` ranking of small grammar rules.

use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;

use crate::alphabet::{Alphabet, TokenId};
use crate::domain::VariableDomain;
use crate::err::{err_estimate, ErrEstimate, ErrOptions, UndefinedPolicy};
use crate::error::{Error, Result};
use crate::map::{TableMap, TransductionMap};
use crate::rule::{DomainSpec, GgrRule, Pattern, RhsItem, Sym, VarDecl};

/// Bounds on the candidate space and the scoring parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchCaps {
    pub min_h: usize,
    pub max_h: usize,
    pub max_k: usize,
    pub max_pattern_len: usize,
    /// Largest total number of literal output tokens on the right.
    pub max_literal_len: usize,
    pub domain_menu: Vec<DomainSpec>,
    pub beta: f64,
    pub truncation_len: usize,
}

impl Default for SearchCaps {
    fn default() -> Self {
        SearchCaps {
            min_h: 0,
            max_h: 2,
            max_k: 2,
            max_pattern_len: 3,
            max_literal_len: 1,
            domain_menu: vec![DomainSpec::Plus],
            beta: 1.0,
            truncation_len: 4,
        }
    }
}

impl SearchCaps {
    pub fn validate(&self) -> Result<()> {
        if self.min_h > self.max_h {
            return Err(Error::InvalidArgument(format!(
                "min-h {} exceeds max-h {}",
                self.min_h, self.max_h
            )));
        }
        if self.max_h > 0 && self.domain_menu.is_empty() {
            return Err(Error::InvalidArgument("domain menu is empty".into()));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidBeta(self.beta));
        }
        if self.domain_menu.len() > u8::MAX as usize {
            return Err(Error::InvalidArgument(
                "domain menu holds at most 255 entries".into(),
            ));
        }
        if self.max_pattern_len == 0 {
            return Err(Error::InvalidArgument(
                "max pattern length must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// A candidate before it is turned into a rule.
#[derive(Debug, Clone)]
struct Shape {
    domains: Vec<u8>,
    lhs: Vec<Sym>,
    rhs: Vec<RhsItem>,
}

/// All patterns of exactly `len` symbols over `h` variables and `sigma` tokens,
/// in lexicographic order (variables before tokens).
fn patterns(len: usize, h: usize, sigma: usize) -> Vec<Vec<Sym>> {
    let syms: Vec<Sym> = (0..h)
        .map(Sym::Var)
        .chain((0..sigma as TokenId).map(Sym::Tok))
        .collect();
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * syms.len());
        for p in &out {
            for &s in &syms {
                let mut q = p.clone();
                q.push(s);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Left patterns using every variable, numbered in order of first occurrence.
fn lhs_patterns(len: usize, h: usize, sigma: usize) -> Vec<Vec<Sym>> {
    patterns(len, h, sigma)
        .into_iter()
        .filter(|p| {
            let mut next = 0;
            for s in p {
                if let Sym::Var(v) = *s {
                    if v > next {
                        return false;
                    }
                    if v == next {
                        next += 1;
                    }
                }
            }
            next == h
        })
        .collect()
}

/// Every tuple of length `n` over `0..base`, lexicographic.
fn tuples(n: usize, base: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..base).map(move |x| {
                    let mut u = t.clone();
                    u.push(x);
                    u
                })
            })
            .collect();
    }
    out
}

/// Ways to split `n` literal tokens over `slots` gaps, lexicographic.
fn distributions(n: usize, slots: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() + 1 == slots {
            cur.push(n);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for x in 0..=n {
            cur.push(x);
            go(n - x, slots, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, slots, &mut Vec::new(), &mut out);
    out
}

fn shapes(sigma: usize, lambda: usize, caps: &SearchCaps) -> Vec<Shape> {
    let mut out = Vec::new();
    for h in caps.min_h..=caps.max_h {
        let domain_choices = tuples(h, caps.domain_menu.len());
        let lit_blocks: Vec<Vec<Vec<usize>>> = (0..=caps.max_literal_len)
            .map(|n| tuples(n, lambda))
            .collect();
        for len_a in h.max(1)..=caps.max_pattern_len {
            let args: Vec<Vec<Sym>> = (1..=len_a).flat_map(|l| patterns(l, h, sigma)).collect();
            for lhs in lhs_patterns(len_a, h, sigma) {
                for doms in &domain_choices {
                    for k in 0..=caps.max_k {
                        for call_idx in tuples(k, args.len()) {
                            for (n, blocks) in lit_blocks.iter().enumerate() {
                                for dist in distributions(n, k + 1) {
                                    for toks in blocks {
                                        let mut rhs = Vec::with_capacity(k + n);
                                        let mut t = toks.iter();
                                        for (slot, &cnt) in dist.iter().enumerate() {
                                            for _ in 0..cnt {
                                                rhs.push(RhsItem::Lit(
                                                    *t.next().expect("n tokens") as TokenId,
                                                ));
                                            }
                                            if slot < k {
                                                rhs.push(RhsItem::Call(Pattern(
                                                    args[call_idx[slot]].clone(),
                                                )));
                                            }
                                        }
                                        out.push(Shape {
                                            domains: doms.iter().map(|&d| d as u8).collect(),
                                            lhs: lhs.clone(),
                                            rhs,
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Largest candidate space [`search_rules`] accepts.
pub const MAX_CANDIDATES: u128 = 1_000_000;

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Number of candidates within `caps`, without enumerating them.
///
/// Left patterns of length `l` with `h` variables in first-occurrence order
/// number `sum_j C(l, j) S(j, h) sigma^(l - j)`, with `S` the Stirling numbers
/// of the second kind; `n` literals fall into `k + 1` gaps in `C(n + k, k)` ways.
#[allow(clippy::needless_range_loop)]
pub fn count_candidates(sigma: usize, lambda: usize, caps: &SearchCaps) -> u128 {
    let top = caps.max_pattern_len.max(caps.max_h);
    // stirling[j][h]
    let mut stirling = vec![vec![0u128; top + 1]; top + 1];
    stirling[0][0] = 1;
    for j in 1..=top {
        for h in 1..=j {
            stirling[j][h] = (h as u128)
                .saturating_mul(stirling[j - 1][h])
                .saturating_add(stirling[j - 1][h - 1]);
        }
    }
    let pow = |b: usize, e: usize| (b as u128).saturating_pow(e as u32);
    let mut total: u128 = 0;
    for h in caps.min_h..=caps.max_h {
        let doms = pow(caps.domain_menu.len(), h);
        for len_a in h.max(1)..=caps.max_pattern_len {
            let lhs: u128 = (h..=len_a)
                .map(|j| {
                    binomial(len_a as u128, j as u128)
                        .saturating_mul(stirling[j][h])
                        .saturating_mul(pow(sigma, len_a - j))
                })
                .fold(0, u128::saturating_add);
            let args: u128 = (1..=len_a)
                .map(|l| pow(h + sigma, l))
                .fold(0, u128::saturating_add);
            let rhs: u128 = (0..=caps.max_k)
                .map(|k| {
                    let lits: u128 = (0..=caps.max_literal_len)
                        .map(|n| {
                            binomial((n + k) as u128, k as u128).saturating_mul(pow(lambda, n))
                        })
                        .fold(0, u128::saturating_add);
                    args.saturating_pow(k as u32).saturating_mul(lits)
                })
                .fold(0, u128::saturating_add);
            total = total.saturating_add(lhs.saturating_mul(doms).saturating_mul(rhs));
        }
    }
    total
}

fn check_space(sigma: usize, lambda: usize, caps: &SearchCaps) -> Result<()> {
    let n = count_candidates(sigma, lambda, caps);
    if n > MAX_CANDIDATES {
        return Err(Error::InvalidArgument(format!(
            "caps admit {n} candidates, above the limit of {MAX_CANDIDATES}; lower max-pattern-len, max-k or max-h"
        )));
    }
    Ok(())
}

struct Builder {
    input: Arc<Alphabet>,
    output: Arc<Alphabet>,
    menu: Vec<(String, Arc<VariableDomain>)>,
}

impl Builder {
    fn new(input: &Arc<Alphabet>, output: &Arc<Alphabet>, caps: &SearchCaps) -> Result<Self> {
        let menu = caps
            .domain_menu
            .iter()
            .map(|spec| {
                let d = spec.resolve(input, Default::default(), "input")?;
                Ok((spec.to_string(), Arc::new(d)))
            })
            .collect::<Result<_>>()?;
        Ok(Builder {
            input: Arc::clone(input),
            output: Arc::clone(output),
            menu,
        })
    }

    fn build(&self, s: &Shape) -> Result<GgrRule> {
        let vars = s
            .domains
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let (name, dom) = &self.menu[d as usize];
                VarDecl {
                    name: format!("x{}", i + 1),
                    domain_name: name.clone(),
                    domain: Arc::clone(dom),
                }
            })
            .collect();
        GgrRule::new(
            Arc::clone(&self.input),
            Arc::clone(&self.output),
            vars,
            Pattern(s.lhs.clone()),
            s.rhs.clone(),
        )
    }
}

/// Every grammar rule within `caps`, in canonical order: by number of
/// variables, left pattern length, left pattern, domains, number of calls,
/// call arguments, literal count, literal placement, literal tokens.
pub fn enumerate_candidates(
    input: &Arc<Alphabet>,
    output: &Arc<Alphabet>,
    caps: &SearchCaps,
) -> Result<impl Iterator<Item = GgrRule>> {
    caps.validate()?;
    check_space(input.len(), output.len(), caps)?;
    let b = Builder::new(input, output, caps)?;
    let all = shapes(input.len(), output.len(), caps);
    Ok(all.into_iter().map(move |s| {
        b.build(&s)
            .expect("enumerated shapes satisfy the rule conditions")
    }))
}

/// One scored candidate.
#[derive(Debug, Clone)]
pub struct RankedRule {
    pub rule: GgrRule,
    pub estimate: ErrEstimate,
    pub complexity: usize,
    /// Position in canonical enumeration order.
    pub index: usize,
}

impl RankedRule {
    /// At least one term could be evaluated.
    pub fn supported(&self) -> bool {
        self.estimate.term_count > 0
    }
}

/// Outcome of a search.
#[derive(Debug, Clone)]
pub struct SearchResult {
    /// Non-tautological candidates in rank order.
    pub ranked: Vec<RankedRule>,
    /// Candidates whose right side is literally their left side; they hold
    /// for every map and are left out of the ranking.
    pub tautologies: usize,
    pub candidates: usize,
}

/// Scores every candidate within `caps` against `t` and ranks them.
///
/// Order: candidates with at least one evaluated term first, then by upper
/// bound, complexity, and canonical enumeration order. Undefined terms are
/// handled by `opts.undefined`; for a dataset they are skipped. Per-length
/// breakdowns are dropped from the stored estimates.
pub fn search_rules<M: TransductionMap + ?Sized>(
    t: &M,
    caps: &SearchCaps,
    opts: &ErrOptions,
) -> Result<SearchResult> {
    caps.validate()?;
    check_space(t.input_alphabet().len(), t.output_alphabet().len(), caps)?;
    let b = Builder::new(t.input_alphabet(), t.output_alphabet(), caps)?;
    let all = shapes(t.input_alphabet().len(), t.output_alphabet().len(), caps);
    let candidates = all.len();
    let scored: Vec<Result<Option<RankedRule>>> = all
        .par_iter()
        .enumerate()
        .map(|(index, s)| {
            let rule = b.build(s)?;
            if rule.is_tautology() {
                return Ok(None);
            }
            let mut estimate = err_estimate(t, &rule, caps.beta, 0.0, caps.truncation_len, opts)?;
            estimate.levels = Vec::new();
            Ok(Some(RankedRule {
                complexity: rule.complexity(),
                rule,
                estimate,
                index,
            }))
        })
        .collect();
    let mut ranked = Vec::with_capacity(candidates);
    let mut tautologies = 0;
    for s in scored {
        match s? {
            Some(r) => ranked.push(r),
            None => tautologies += 1,
        }
    }
    ranked.sort_by(|a, b| {
        b.supported()
            .cmp(&a.supported())
            .then(a.estimate.upper().total_cmp(&b.estimate.upper()))
            .then(a.complexity.cmp(&b.complexity))
            .then(a.index.cmp(&b.index))
    });
    Ok(SearchResult {
        ranked,
        tautologies,
        candidates,
    })
}

/// Searches against a dataset viewed as a partial map; undefined terms are skipped.
pub fn search_dataset(data: &TableMap, caps: &SearchCaps) -> Result<SearchResult> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let opts = ErrOptions {
        undefined: UndefinedPolicy::Skip,
        ..ErrOptions::default()
    };
    search_rules(data, caps, &opts)
}

/// Shortest exact decimal form that parses back to the same value; `0` for zero.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x:?}")
    }
}

/// Writes `rank, rule, lower, upper, complexity, skipped` rows.
pub fn write_ranking_tsv<W: Write>(
    mut w: W,
    result: &SearchResult,
    top: Option<usize>,
) -> Result<()> {
    writeln!(w, "rank\trule\tlower\tupper\tcomplexity\tskipped")?;
    let n = top.unwrap_or(result.ranked.len()).min(result.ranked.len());
    for (i, r) in result.ranked[..n].iter().enumerate() {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}\t{}",
            i + 1,
            r.rule,
            format_number(r.estimate.lower()),
            format_number(r.estimate.upper()),
            r.complexity,
            r.estimate.skipped
        )?;
    }
    Ok(())
}
