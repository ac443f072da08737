//! The `Err_beta` functional of a grammar rule against a transduction map.
//!
//! For a rule `forall x_i in C_i: T(A) = B0 T(A1) B1 ... T(Ak) Bk`,
//!
//! ```text
//! Err_beta(T, R) = sum over a_i in C_i of
//!     exp((-beta - ln #Sigma) * sum_i len(a_i)) * dist(T(A sigma), B0 T(A1 sigma) ... Bk)
//! ```
//!
//! The sum is computed exactly up to a total substituted length `L` and the
//! rest is bounded by a certified tail, giving an interval `[lower, upper]`.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::alphabet::TokenId;
use crate::distance::EditMetric;
use crate::error::{Error, Result};
use crate::map::{GrowthBound, TransductionMap};
use crate::rule::{GgrRule, RhsItem};

/// What to do with a term whose transduction is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UndefinedPolicy {
    #[default]
    Error,
    /// Skip and count the term; the result is an empirical score.
    Skip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ErrOptions {
    pub metric: EditMetric,
    pub undefined: UndefinedPolicy,
}

/// Exact contribution of all assignments with total length `length`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSum {
    pub length: usize,
    /// Sum of distances over the level's evaluated terms.
    pub distance_sum: u128,
    pub terms: u64,
    pub skipped: u64,
    /// Common weight `exp((-beta - ln #Sigma) * length)`.
    pub weight: f64,
}

impl LevelSum {
    pub fn subtotal(&self) -> f64 {
        self.weight * self.distance_sum as f64
    }
}

/// Partial sum up to a truncation length, with per-length breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialSum {
    pub value: f64,
    pub levels: Vec<LevelSum>,
}

impl PartialSum {
    pub fn terms(&self) -> u64 {
        self.levels.iter().map(|l| l.terms).sum()
    }

    pub fn skipped(&self) -> u64 {
        self.levels.iter().map(|l| l.skipped).sum()
    }
}

/// A certified enclosure of `Err_beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrEstimate {
    pub partial_sum: f64,
    pub tail_bound: f64,
    /// Upper end of the interval; never above `partial_sum + tail_bound`.
    pub upper: f64,
    pub truncation_len: usize,
    pub beta: f64,
    pub term_count: u64,
    pub skipped: u64,
    /// Whether the requested width was reached before the length cap.
    pub converged: bool,
    pub levels: Vec<LevelSum>,
}

impl ErrEstimate {
    pub fn lower(&self) -> f64 {
        self.partial_sum
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.partial_sum
    }

    pub fn contains(&self, x: f64) -> bool {
        self.partial_sum <= x && x <= self.upper
    }
}

/// Neumaier-compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// The weight shared by every term at total length `m`.
pub fn level_weight(beta: f64, sigma_size: usize, m: usize) -> f64 {
    ((-beta - (sigma_size as f64).ln()) * m as f64).exp()
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidBeta(beta))
    }
}

fn check_alphabets<M: TransductionMap + ?Sized>(t: &M, r: &GgrRule) -> Result<()> {
    if **t.input_alphabet() != **r.input_alphabet()
        || **t.output_alphabet() != **r.output_alphabet()
    {
        return Err(Error::AlphabetMismatch);
    }
    Ok(())
}

/// Domain members per variable and length, filled on demand.
struct Members {
    by_len: Vec<Vec<Vec<Vec<TokenId>>>>,
}

impl Members {
    fn new(h: usize) -> Self {
        Members {
            by_len: vec![Vec::new(); h],
        }
    }

    fn extend_to(&mut self, r: &GgrRule, len: usize) {
        for (v, decl) in r.vars().iter().enumerate() {
            while self.by_len[v].len() <= len {
                let l = self.by_len[v].len();
                self.by_len[v].push(decl.domain.enumerate(l));
            }
        }
    }
}

/// All length vectors summing to `m` with non-empty member lists, lexicographic.
fn compositions(members: &Members, h: usize, m: usize) -> Vec<Vec<usize>> {
    fn go(
        members: &Members,
        v: usize,
        h: usize,
        left: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if v == h {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for l in 0..=left {
            if members.by_len[v][l].is_empty() {
                continue;
            }
            cur.push(l);
            go(members, v + 1, h, left - l, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(members, 0, h, m, &mut Vec::with_capacity(h), &mut out);
    out
}

struct Evaluator<'a, M: ?Sized> {
    t: &'a M,
    memo: HashMap<Vec<TokenId>, Option<Vec<TokenId>>>,
}

impl<M: TransductionMap + ?Sized> Evaluator<'_, M> {
    fn eval(&mut self, s: Vec<TokenId>) -> Result<Option<Vec<TokenId>>> {
        if let Some(v) = self.memo.get(&s) {
            return Ok(v.clone());
        }
        let out = self.t.apply_ids(&s)?;
        self.memo.insert(s, out.clone());
        Ok(out)
    }
}

#[derive(Default)]
struct Tally {
    distance: u128,
    terms: u64,
    skipped: u64,
}

fn describe_assignment(r: &GgrRule, binds: &[&[TokenId]]) -> String {
    r.vars()
        .iter()
        .zip(binds)
        .map(|(v, b)| format!("{}=\"{}\"", v.name, r.input_alphabet().render(b)))
        .collect::<Vec<_>>()
        .join(", ")
}

fn score_composition<M: TransductionMap + ?Sized>(
    t: &M,
    r: &GgrRule,
    members: &Members,
    lens: &[usize],
    opts: &ErrOptions,
) -> Result<Tally> {
    let h = r.h();
    let lists: Vec<&Vec<Vec<TokenId>>> = (0..h).map(|v| &members.by_len[v][lens[v]]).collect();
    let mut idx = vec![0usize; h];
    let mut ev = Evaluator {
        t,
        memo: HashMap::new(),
    };
    let mut tally = Tally::default();
    'outer: loop {
        let binds: Vec<&[TokenId]> = (0..h).map(|v| lists[v][idx[v]].as_slice()).collect();
        let lhs = ev.eval(r.lhs().instantiate(&binds))?;
        let mut rhs: Option<Vec<TokenId>> = Some(Vec::new());
        if lhs.is_some() {
            for item in r.rhs() {
                match item {
                    RhsItem::Lit(tok) => rhs.as_mut().expect("defined so far").push(*tok),
                    RhsItem::Call(p) => match ev.eval(p.instantiate(&binds))? {
                        Some(o) => rhs.as_mut().expect("defined so far").extend_from_slice(&o),
                        None => {
                            rhs = None;
                            break;
                        }
                    },
                }
            }
        }
        match (lhs, rhs) {
            (Some(a), Some(b)) => {
                tally.distance += opts.metric.distance(&a, &b) as u128;
                tally.terms += 1;
            }
            _ => match opts.undefined {
                UndefinedPolicy::Error => {
                    return Err(Error::UndefinedPoint(describe_assignment(r, &binds)));
                }
                UndefinedPolicy::Skip => tally.skipped += 1,
            },
        }
        let mut v = h;
        loop {
            if v == 0 {
                break 'outer;
            }
            v -= 1;
            idx[v] += 1;
            if idx[v] < lists[v].len() {
                break;
            }
            idx[v] = 0;
        }
    }
    Ok(tally)
}

fn level<M: TransductionMap + ?Sized>(
    t: &M,
    r: &GgrRule,
    members: &Members,
    m: usize,
    beta: f64,
    opts: &ErrOptions,
) -> Result<LevelSum> {
    let comps = compositions(members, r.h(), m);
    let tallies: Vec<Result<Tally>> = comps
        .par_iter()
        .map(|lens| score_composition(t, r, members, lens, opts))
        .collect();
    let mut out = LevelSum {
        length: m,
        distance_sum: 0,
        terms: 0,
        skipped: 0,
        weight: level_weight(beta, r.input_alphabet().len(), m),
    };
    for tally in tallies {
        let tally = tally?;
        out.distance_sum += tally.distance;
        out.terms += tally.terms;
        out.skipped += tally.skipped;
    }
    Ok(out)
}

fn sum_levels(levels: &[LevelSum]) -> f64 {
    let mut acc = CompensatedSum::default();
    for l in levels {
        acc.add(l.subtotal());
    }
    acc.value()
}

/// Exact sum over all assignments of total length at most `max_len`.
pub fn err_partial_sum<M: TransductionMap + ?Sized>(
    t: &M,
    r: &GgrRule,
    beta: f64,
    max_len: usize,
    opts: &ErrOptions,
) -> Result<PartialSum> {
    check_beta(beta)?;
    check_alphabets(t, r)?;
    let mut members = Members::new(r.h());
    members.extend_to(r, max_len);
    let mut levels = Vec::with_capacity(max_len + 1);
    for m in 0..=max_len {
        levels.push(level(t, r, &members, m, beta, opts)?);
    }
    Ok(PartialSum {
        value: sum_levels(&levels),
        levels,
    })
}

/// Rule and growth constants entering the tail bound.
#[derive(Debug, Clone, PartialEq)]
pub struct TailConstants {
    pub c_t: f64,
    pub d_exp: u32,
    pub h: usize,
    /// Largest multiplicity of any variable in `A` or any `A_i`.
    pub d_max: usize,
    pub len_a: usize,
    pub lens_abar: Vec<usize>,
    pub sum_len_b: usize,
    pub sigma_size: usize,
    /// Largest total substituted length, when every domain is finite.
    pub max_total: Option<usize>,
}

impl TailConstants {
    pub fn new(r: &GgrRule, bound: GrowthBound) -> Self {
        let max_total = r
            .vars()
            .iter()
            .map(|v| v.domain.max_len())
            .try_fold(0usize, |acc, m| m.map(|m| acc + m));
        TailConstants {
            c_t: bound.c,
            d_exp: bound.d,
            h: r.h(),
            d_max: if r.h() == 0 {
                0
            } else {
                r.max_multiplicity().max(1)
            },
            len_a: r.lhs().len(),
            lens_abar: r.calls().map(|p| p.len()).collect(),
            sum_len_b: r.literal_len(),
            sigma_size: r.input_alphabet().len(),
            max_total,
        }
    }

    /// Majorant of `dist` for any term at total length `m`.
    pub fn poly(&self, m: usize) -> f64 {
        let d = self.d_exp as i32;
        let grow = |base: usize| self.c_t * ((base + self.d_max * m) as f64).powi(d);
        grow(self.len_a)
            + self.sum_len_b as f64
            + self.lens_abar.iter().map(|&b| grow(b)).sum::<f64>()
    }

    fn ln_term(&self, m: usize, beta: f64) -> f64 {
        let p = self.poly(m);
        if p <= 0.0 {
            return f64::NEG_INFINITY;
        }
        (self.h as f64 - 1.0) * ((m + 1) as f64).ln() - beta * m as f64 + p.ln()
    }

    /// Upper bound on `term(m + 1) / term(j + 1)`-style ratios for every `j >= m`.
    fn ratio(&self, m: usize, beta: f64) -> f64 {
        let d = self.d_exp as i32;
        let dm = self.d_max as f64;
        let mf = m as f64;
        let piece = |base: usize| {
            let b = base as f64;
            if b + dm * mf == 0.0 {
                f64::INFINITY
            } else {
                ((b + dm * (mf + 1.0)) / (b + dm * mf)).powi(d)
            }
        };
        let mut worst: f64 = if self.sum_len_b > 0 { 1.0 } else { 0.0 };
        if self.c_t > 0.0 {
            worst = worst.max(piece(self.len_a));
            for &b in &self.lens_abar {
                worst = worst.max(piece(b));
            }
        }
        (-beta).exp() * ((mf + 2.0) / (mf + 1.0)).powi(self.h as i32 - 1) * worst
    }

    /// `sum_{m >= start} term(m)`, certified from above.
    fn tail_from(&self, start: usize, beta: f64) -> f64 {
        if self.h == 0 {
            return if start == 0 { self.poly(0) } else { 0.0 };
        }
        if let Some(max) = self.max_total {
            let mut acc = CompensatedSum::default();
            for m in start..=max {
                acc.add(self.ln_term(m, beta).exp());
            }
            return acc.value();
        }
        const MAX_TERMS: usize = 50_000_000;
        let mut acc = CompensatedSum::default();
        let mut m = start;
        loop {
            let term = self.ln_term(m, beta).exp();
            acc.add(term);
            let rho = self.ratio(m, beta);
            if rho < 1.0 {
                let closure = term * rho / (1.0 - rho);
                let total = acc.value();
                if closure <= 1e-17 * total || total == 0.0 && closure == 0.0 {
                    acc.add(closure);
                    return acc.value();
                }
            }
            m += 1;
            if m - start > MAX_TERMS {
                if rho < 1.0 {
                    acc.add(term * rho / (1.0 - rho));
                    return acc.value();
                }
                return f64::INFINITY;
            }
        }
    }
}

/// Certified bound on the mass of all terms with total length above `l`.
pub fn tail_bound(tc: &TailConstants, beta: f64, l: usize) -> Result<f64> {
    check_beta(beta)?;
    Ok(tc.tail_from(l + 1, beta))
}

/// The full series bound, a constant `C` with `Err_beta <= C`.
pub fn prop1_constant(tc: &TailConstants, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    Ok(tc.tail_from(0, beta))
}

/// Grows the truncation length until the interval is narrower than
/// `target_width` or `max_len` is reached. Successive intervals are nested.
pub fn err_estimate<M: TransductionMap + ?Sized>(
    t: &M,
    r: &GgrRule,
    beta: f64,
    target_width: f64,
    max_len: usize,
    opts: &ErrOptions,
) -> Result<ErrEstimate> {
    let mut est = None;
    err_estimate_each(t, r, beta, target_width, max_len, opts, |e| {
        est = Some(e.clone())
    })?;
    Ok(est.expect("at least one level"))
}

/// Like [`err_estimate`], calling `each` with the interval at every length.
pub fn err_estimate_each<M: TransductionMap + ?Sized>(
    t: &M,
    r: &GgrRule,
    beta: f64,
    target_width: f64,
    max_len: usize,
    opts: &ErrOptions,
    mut each: impl FnMut(&ErrEstimate),
) -> Result<()> {
    check_beta(beta)?;
    check_alphabets(t, r)?;
    if target_width.is_nan() || target_width < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "target width must be >= 0, got {target_width}"
        )));
    }
    let bound = t.growth_bound().ok_or(Error::MissingGrowthBound)?;
    let tc = TailConstants::new(r, bound);
    let mut members = Members::new(r.h());
    let mut levels = Vec::new();
    let mut upper = f64::INFINITY;
    for l in 0..=max_len {
        members.extend_to(r, l);
        levels.push(level(t, r, &members, l, beta, opts)?);
        let partial = sum_levels(&levels);
        let tail = tc.tail_from(l + 1, beta);
        upper = upper.min(partial + tail).max(partial);
        let converged = tail <= target_width;
        let est = ErrEstimate {
            partial_sum: partial,
            tail_bound: tail,
            upper,
            truncation_len: l,
            beta,
            term_count: levels.iter().map(|x| x.terms).sum(),
            skipped: levels.iter().map(|x| x.skipped).sum(),
            converged,
            levels: levels.clone(),
        };
        each(&est);
        if converged {
            break;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::map::FnMap;
    use crate::rule::parse_grammar;
    use std::sync::Arc;

    fn ab() -> Arc<Alphabet> {
        Arc::new(Alphabet::new(["a", "b"]).unwrap())
    }

    fn reversal() -> FnMap {
        FnMap::new(
            ab(),
            ab(),
            Some(GrowthBound::linear(1.0)),
            |s: &[TokenId]| Some(s.iter().rev().copied().collect()),
        )
    }

    fn concat_rule(domains: &str) -> GgrRule {
        let g = parse_grammar(&format!(
            "input-alphabet a b\noutput-alphabet a b\nforall x1 in {domains}, x2 in {domains}: T(x1 x2) = T(x1) T(x2)\n"
        ))
        .unwrap();
        g.rules()[0].clone()
    }

    #[test]
    fn reversal_partial_sum() {
        let r = concat_rule("SIGMA+");
        for beta in [0.5, 1.0, 2.0] {
            let p = err_partial_sum(&reversal(), &r, beta, 2, &ErrOptions::default()).unwrap();
            assert!((p.value - (-2.0 * beta).exp()).abs() < 1e-15);
            assert_eq!(p.levels[2].terms, 4);
            assert_eq!(p.levels[2].distance_sum, 4);
        }
    }

    #[test]
    fn weight_ratio_identity() {
        for m in 0..20 {
            let r = level_weight(1.3, 5, m + 1) / level_weight(1.3, 5, m);
            assert!((r - (-1.3f64 - 5f64.ln()).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn identity_rule_is_zero() {
        let id = FnMap::new(
            ab(),
            ab(),
            Some(GrowthBound::linear(1.0)),
            |s: &[TokenId]| Some(s.to_vec()),
        );
        let r = concat_rule("SIGMA*");
        let p = err_partial_sum(&id, &r, 1.0, 6, &ErrOptions::default()).unwrap();
        assert_eq!(p.value, 0.0);
        assert_eq!(p.terms(), (0..=6).map(|m| (m as u64 + 1) << m).sum::<u64>());
    }

    #[test]
    fn finite_single_violation() {
        let g = parse_grammar(
            "input-alphabet zup fep\noutput-alphabet g r\n\
             forall x1 in {\"zup\"}, x2 in {\"fep\"}: T(x1 x2) = T(x1) T(x2)\n",
        )
        .unwrap();
        let r = &g.rules()[0];
        let ins = Arc::clone(g.input_alphabet());
        let outs = Arc::clone(g.output_alphabet());
        let t = FnMap::new(
            ins,
            outs,
            Some(GrowthBound::linear(2.0)),
            |s: &[TokenId]| {
                Some(if s.len() == 2 {
                    vec![1, 1, 1]
                } else {
                    vec![s[0]]
                })
            },
        );
        // T(zup fep) = r r r vs T(zup) T(fep) = g r: lcs 1, indel 3
        let est = err_estimate(&t, r, 0.7, 0.0, 5, &ErrOptions::default()).unwrap();
        let expect = ((-0.7 - 2f64.ln()) * 2.0).exp() * 3.0;
        assert!((est.partial_sum - expect).abs() < 1e-15);
        assert_eq!(est.truncation_len, 2);
        assert_eq!(est.tail_bound, 0.0);
        assert!(est.converged);
    }

    #[test]
    fn undefined_points() {
        let partial = FnMap::new(
            ab(),
            ab(),
            Some(GrowthBound::linear(1.0)),
            |s: &[TokenId]| {
                if s.len() <= 1 {
                    Some(s.to_vec())
                } else {
                    None
                }
            },
        );
        let r = concat_rule("SIGMA+");
        let e = err_partial_sum(&partial, &r, 1.0, 2, &ErrOptions::default()).unwrap_err();
        assert!(
            matches!(e, Error::UndefinedPoint(ref s) if s == "x1=\"a\", x2=\"a\""),
            "{e}"
        );
        let skip = ErrOptions {
            undefined: UndefinedPolicy::Skip,
            ..ErrOptions::default()
        };
        let p = err_partial_sum(&partial, &r, 1.0, 3, &skip).unwrap();
        assert_eq!(p.skipped(), 4 + 16);
        assert_eq!(p.terms(), 0);
        assert!(err_partial_sum(&partial, &r, 0.0, 3, &skip).is_err());
    }

    fn tc_example() -> TailConstants {
        TailConstants {
            c_t: 1.0,
            d_exp: 1,
            h: 1,
            d_max: 1,
            len_a: 2,
            lens_abar: vec![1],
            sum_len_b: 0,
            sigma_size: 2,
            max_total: None,
        }
    }

    #[test]
    fn tail_matches_long_direct_sum() {
        let tc = tc_example();
        for l in [0usize, 3, 10] {
            let direct = {
                let mut acc = CompensatedSum::default();
                for m in (l + 1..l + 10_001).rev() {
                    acc.add(tc.ln_term(m, 1.0).exp());
                }
                acc.value()
            };
            let got = tail_bound(&tc, 1.0, l).unwrap();
            assert!(got >= direct);
            assert!(
                (got - direct).abs() <= 1e-12 * direct.max(1.0),
                "{got} vs {direct}"
            );
        }
    }

    #[test]
    fn tail_decreases_to_zero() {
        let tc = TailConstants {
            h: 2,
            d_max: 2,
            lens_abar: vec![1, 2],
            ..tc_example()
        };
        let mut prev = f64::INFINITY;
        for l in 0..=30 {
            let t = tail_bound(&tc, 1.0, l).unwrap();
            assert!(t < prev);
            prev = t;
        }
        assert!(prev < 1e-6);
    }

    #[test]
    fn finite_domain_tail_covers_discarded_mass() {
        let g = parse_grammar(
            "input-alphabet a b\noutput-alphabet a b\n\
             forall x1 in {\"a\", \"a b\", \"b b a\"}, x2 in SIGMA1: T(x1 x2) = T(x2) T(x1)\n",
        )
        .unwrap();
        let r = &g.rules()[0];
        let id = FnMap::new(
            ab(),
            ab(),
            Some(GrowthBound::linear(1.0)),
            |s: &[TokenId]| Some(s.to_vec()),
        );
        let full = err_partial_sum(&id, r, 0.8, 4, &ErrOptions::default()).unwrap();
        let tc = TailConstants::new(r, GrowthBound::linear(1.0));
        assert_eq!(tc.max_total, Some(4));
        for l in 0..=4 {
            let upto = err_partial_sum(&id, r, 0.8, l, &ErrOptions::default()).unwrap();
            let discarded = full.value - upto.value;
            assert!(tail_bound(&tc, 0.8, l).unwrap() >= discarded - 1e-15);
        }
        assert_eq!(tail_bound(&tc, 0.8, 4).unwrap(), 0.0);
    }

    #[test]
    fn estimates_nest() {
        let r = concat_rule("SIGMA+");
        let mut prev: Option<ErrEstimate> = None;
        err_estimate_each(&reversal(), &r, 1.0, 0.0, 7, &ErrOptions::default(), |e| {
            if let Some(p) = &prev {
                assert!(p.lower() <= e.lower());
                assert!(e.upper() <= p.upper());
                assert!(e.tail_bound <= p.tail_bound);
            }
            prev = Some(e.clone());
        })
        .unwrap();
        let last = prev.unwrap();
        assert_eq!(last.truncation_len, 7);
        assert!(!last.converged);
        let total: u64 = (2..=7).map(|m| (m as u64 - 1) * (1u64 << m)).sum();
        assert_eq!(last.term_count, total);
    }
}
