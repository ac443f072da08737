//! Data augmentation by instantiating rule left sides with known fragments.

use std::collections::BTreeSet;
use std::io::Write;
use std::sync::Arc;

use crate::alphabet::{canonical_cmp, TokenId, TokenString};
use crate::error::Result;
use crate::rule::{GgrRule, Grammar, Sym};

use super::{CompiledGrammar, EngineLimits};

/// Generates up to `budget` pairs `(input, interpret(input))`.
///
/// Inputs are built level by level in increasing length, by substituting
/// fragments into rule left sides. Fragments are the interpretable seeds,
/// every input generated at an earlier level, and the members of finite or
/// single-token domains. Within a level, inputs are emitted in canonical order;
/// seeds are emitted at their own level. Each emitted output is recomputed by
/// the interpreter, so every pair satisfies `output = interpret(input)`.
pub fn augment(
    g: &Grammar,
    seeds: &[TokenString],
    budget: usize,
    max_len: usize,
    limits: &EngineLimits,
) -> Result<Vec<(TokenString, TokenString)>> {
    if budget == 0 {
        return Ok(Vec::new());
    }
    let cg = CompiledGrammar::new(Arc::new(g.clone()));
    let input_alpha = Arc::clone(g.input_alphabet());
    let output_alpha = Arc::clone(g.output_alphabet());

    let mut known: BTreeSet<Vec<TokenId>> = BTreeSet::new();
    let mut pool: Vec<Vec<TokenId>> = Vec::new();
    let seed_ids: BTreeSet<Vec<TokenId>> = seeds
        .iter()
        .filter(|s| {
            s.len() <= max_len && crate::alphabet::same_alphabet(s.alphabet(), &input_alpha)
        })
        .map(|s| s.ids().to_vec())
        .collect();

    let explicit: Vec<Vec<Vec<TokenId>>> = g
        .rules()
        .iter()
        .map(|r| explicit_members(r, max_len))
        .collect();
    let mut out = Vec::new();

    for level in 0..=max_len {
        let mut found: BTreeSet<Vec<TokenId>> = BTreeSet::new();
        for s in seed_ids.iter().filter(|s| s.len() == level) {
            found.insert(s.clone());
        }
        for (r, extra) in g.rules().iter().zip(&explicit) {
            if r.h() == 0 {
                if r.lhs().len() == level {
                    found.insert(r.lhs().instantiate::<&[TokenId]>(&[]));
                }
                continue;
            }
            let candidates: Vec<Vec<&[TokenId]>> = r
                .vars()
                .iter()
                .map(|v| {
                    let mut c: Vec<&[TokenId]> = pool
                        .iter()
                        .chain(extra.iter())
                        .map(Vec::as_slice)
                        .filter(|w| v.domain.contains(w))
                        .collect();
                    c.sort_by(|a, b| canonical_cmp(a, b));
                    c.dedup();
                    c
                })
                .collect();
            let mut chosen: Vec<&[TokenId]> = Vec::with_capacity(r.h());
            fill(r, &candidates, level, &mut chosen, &mut found);
        }
        let mut level_pairs = Vec::new();
        for input in found {
            if known.contains(&input) {
                continue;
            }
            if let Ok(output) = cg.interpret_ids(&input, limits) {
                known.insert(input.clone());
                level_pairs.push((input, output));
            }
        }
        // found is a BTreeSet of equal-length strings, so this is canonical order
        for (input, output) in level_pairs {
            pool.push(input.clone());
            if out.len() < budget {
                out.push((
                    TokenString::from_ids(Arc::clone(&input_alpha), input),
                    TokenString::from_ids(Arc::clone(&output_alpha), output),
                ));
            }
        }
        if out.len() >= budget {
            break;
        }
    }
    Ok(out)
}

/// Members of finite or single-token domains, up to `max_len`.
fn explicit_members(r: &GgrRule, max_len: usize) -> Vec<Vec<TokenId>> {
    let mut out = Vec::new();
    for v in r.vars() {
        if let Some(m) = v.domain.max_len() {
            for len in 0..=m.min(max_len) {
                out.extend(v.domain.enumerate(len));
            }
        }
    }
    out
}

fn fill<'a>(
    r: &GgrRule,
    candidates: &[Vec<&'a [TokenId]>],
    level: usize,
    chosen: &mut Vec<&'a [TokenId]>,
    found: &mut BTreeSet<Vec<TokenId>>,
) {
    let v = chosen.len();
    if v == r.h() {
        let s = r.lhs().instantiate(chosen);
        if s.len() == level {
            found.insert(s);
        }
        return;
    }
    // length already committed by literals and chosen variables
    let used: usize = r
        .lhs()
        .0
        .iter()
        .map(|s| match *s {
            Sym::Tok(_) => 1,
            Sym::Var(u) if u < v => chosen[u].len(),
            Sym::Var(_) => 0,
        })
        .sum();
    let mult = r.lhs().multiplicity(v);
    for &c in &candidates[v] {
        if used + mult * c.len() > level {
            continue;
        }
        chosen.push(c);
        fill(r, candidates, level, chosen, found);
        chosen.pop();
    }
}

/// Writes pairs as `input<TAB>output`, one per line.
pub fn write_pairs_tsv<W: Write>(mut w: W, pairs: &[(TokenString, TokenString)]) -> Result<()> {
    for (i, o) in pairs {
        writeln!(w, "{i}\t{o}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rule::parse_grammar;

    const AND_AFTER: &str = "\
input-alphabet RUN WALK LEFT AND AFTER
output-alphabet RUN WALK LTURN
forall x1 in SIGMA+, x2 in SIGMA+: T(x1 \"AND\" x2) = T(x1) T(x2)
forall x1 in SIGMA+, x2 in SIGMA+: T(x1 \"AFTER\" x2) = T(x2) T(x1)
forall x1 in SIGMA1: T(x1 \"LEFT\") = \"LTURN\" T(x1)
T(\"RUN\") = \"RUN\"
T(\"WALK\") = \"WALK\"
";

    fn seeds(g: &Grammar, items: &[&str]) -> Vec<TokenString> {
        items
            .iter()
            .map(|s| TokenString::parse(g.input_alphabet(), s).unwrap())
            .collect()
    }

    #[test]
    fn and_after_pairs_are_generated() {
        let g = parse_grammar(AND_AFTER).unwrap();
        let pairs = augment(
            &g,
            &seeds(&g, &["RUN LEFT", "WALK"]),
            1000,
            4,
            &EngineLimits::default(),
        )
        .unwrap();
        let text: Vec<(String, String)> = pairs
            .iter()
            .map(|(i, o)| (i.to_string(), o.to_string()))
            .collect();
        assert!(text.contains(&("RUN LEFT AND WALK".into(), "LTURN RUN WALK".into())));
        assert!(text.contains(&("RUN LEFT AFTER WALK".into(), "WALK LTURN RUN".into())));
        let cg = CompiledGrammar::new(Arc::new(g.clone()));
        let mut inputs: Vec<&TokenString> = pairs.iter().map(|(i, _)| i).collect();
        for (i, o) in &pairs {
            assert_eq!(&cg.interpret(i, &EngineLimits::default()).unwrap(), o);
        }
        let n = inputs.len();
        inputs.sort();
        inputs.dedup();
        assert_eq!(inputs.len(), n);
        // breadth-first: nondecreasing lengths
        assert!(pairs.windows(2).all(|w| w[0].0.len() <= w[1].0.len()));
    }

    #[test]
    fn zero_budget_is_empty() {
        let g = parse_grammar(AND_AFTER).unwrap();
        assert!(
            augment(&g, &seeds(&g, &["WALK"]), 0, 5, &EngineLimits::default())
                .unwrap()
                .is_empty()
        );
    }

    #[test]
    fn budget_is_a_prefix() {
        let g = parse_grammar(AND_AFTER).unwrap();
        let s = seeds(&g, &["RUN LEFT", "WALK"]);
        let all = augment(&g, &s, 1000, 4, &EngineLimits::default()).unwrap();
        let some = augment(&g, &s, 7, 4, &EngineLimits::default()).unwrap();
        assert_eq!(&all[..7], &some[..]);
    }

    #[test]
    fn tsv_output() {
        let g = parse_grammar(AND_AFTER).unwrap();
        let pairs = augment(&g, &seeds(&g, &["WALK"]), 2, 1, &EngineLimits::default()).unwrap();
        let mut buf = Vec::new();
        write_pairs_tsv(&mut buf, &pairs).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "RUN\tRUN\nWALK\tWALK\n");
    }
}
