//! Linear growth bounds `len(T(s)) <= c * len(s)` for grammar-induced maps.
//!
//! When every variable ranges over strings of bounded length, the grammar is
//! defined only on inputs up to some length `N`, and the largest possible
//! output length `U(n)` for each `n <= N` follows from a recurrence over rules
//! and length assignments. Then `c = max U(n) / n`.
//!
//! Otherwise the bound is proved by induction over derivations: we look for
//! `c, e` with `0 <= e <= c` such that `len(T(s)) <= c * len(s) - e` is
//! preserved by every rule. Writing `g(l)` for `len(A) - sum len(A_i)` as a
//! linear function of the variable lengths `l`, a rule with `k` calls and `b`
//! literal output tokens preserves the claim iff `b <= c * g(l) + (k - 1) * e`
//! for every admissible `l`. Minimising `g` over the box of variable lengths
//! turns this into a two-variable linear program, solved by checking vertices.

use crate::error::{Error, Result};
use crate::map::GrowthBound;
use crate::rule::{GgrRule, Grammar};

use super::EngineLimits;

/// Derives a linear growth bound for the map induced by `g`.
pub fn derive_growth_bound(g: &Grammar, limits: &EngineLimits) -> Result<GrowthBound> {
    let rules: Vec<&GgrRule> = g
        .rules()
        .iter()
        .filter(|r| r.vars().iter().all(|v| !v.domain.is_empty()))
        .collect();
    let bounded = rules
        .iter()
        .all(|r| r.vars().iter().all(|v| v.domain.max_len().is_some()));
    let c = if bounded {
        bounded_recurrence(&rules, limits)?
    } else {
        inductive_bound(&rules)?
    };
    Ok(GrowthBound::linear(if c > 0.0 { c } else { 1.0 }))
}

fn length_sets(r: &GgrRule) -> Vec<Vec<usize>> {
    r.vars()
        .iter()
        .map(|v| {
            let max = v.domain.max_len().expect("bounded domains only");
            (0..=max).filter(|&l| v.domain.count(l) > 0).collect()
        })
        .collect()
}

/// Calls `f` on every combination of one element per set.
fn for_each_tuple(sets: &[Vec<usize>], f: &mut impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    let mut idx = vec![0usize; sets.len()];
    if sets.iter().any(Vec::is_empty) {
        return Ok(());
    }
    let mut cur: Vec<usize> = sets.iter().map(|s| s[0]).collect();
    loop {
        f(&cur)?;
        let mut i = sets.len();
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < sets[i].len() {
                cur[i] = sets[i][idx[i]];
                break;
            }
            idx[i] = 0;
            cur[i] = sets[i][0];
        }
    }
}

fn bounded_recurrence(rules: &[&GgrRule], limits: &EngineLimits) -> Result<f64> {
    let sets: Vec<Vec<Vec<usize>>> = rules.iter().map(|r| length_sets(r)).collect();
    let mut max_n = 0;
    for (r, s) in rules.iter().zip(&sets) {
        let top: Vec<usize> = s.iter().map(|l| l.last().copied().unwrap_or(0)).collect();
        max_n = max_n.max(r.lhs().instantiated_len(&top));
    }
    // u[n] = largest output length over inputs of length n, None if undefined
    let mut u: Vec<Option<usize>> = vec![None; max_n + 1];
    u[0] = Some(0);
    for n in 1..=max_n {
        let mut best: Option<usize> = None;
        for (ri, (r, s)) in rules.iter().zip(&sets).enumerate() {
            for_each_tuple(s, &mut |lens| {
                if r.lhs().instantiated_len(lens) != n {
                    return Ok(());
                }
                let mut total = r.literal_len();
                for p in r.calls() {
                    let m = p.instantiated_len(lens);
                    if m >= n {
                        if limits.require_strict_decrease {
                            // the engine rejects this derivation
                            return Ok(());
                        }
                        return Err(Error::BoundDerivation(format!(
                            "rule {} recurses without shrinking the input",
                            ri + 1
                        )));
                    }
                    match u[m] {
                        Some(x) => total += x,
                        None => return Ok(()),
                    }
                }
                best = Some(best.map_or(total, |b| b.max(total)));
                Ok(())
            })?;
        }
        u[n] = best;
    }
    Ok((1..=max_n)
        .filter_map(|n| u[n].map(|x| x as f64 / n as f64))
        .fold(0.0, f64::max))
}

/// `a * c + b * e >= r`
#[derive(Debug, Clone, Copy)]
struct Constraint {
    a: f64,
    b: f64,
    r: f64,
}

fn inductive_bound(rules: &[&GgrRule]) -> Result<f64> {
    let mut cons = vec![
        // e >= 0
        Constraint {
            a: 0.0,
            b: 1.0,
            r: 0.0,
        },
        // c - e >= 0
        Constraint {
            a: 1.0,
            b: -1.0,
            r: 0.0,
        },
    ];
    let mut empty_args = false;
    for (ri, r) in rules.iter().enumerate() {
        let h = r.h();
        let mut g_min = r.lhs().literal_count() as i64
            - r.calls().map(|p| p.literal_count() as i64).sum::<i64>();
        for v in 0..h {
            let coef = r.lhs().multiplicity(v) as i64
                - r.calls().map(|p| p.multiplicity(v) as i64).sum::<i64>();
            let dom = &r.vars()[v].domain;
            let len = if coef >= 0 {
                dom.min_len().expect("non-empty domain")
            } else {
                match dom.max_len() {
                    Some(m) => m,
                    None => {
                        return Err(Error::BoundDerivation(format!(
                            "rule {} (`{r}`) duplicates the unbounded variable `{}`; output may grow faster than linearly",
                            ri + 1,
                            r.vars()[v].name
                        )))
                    }
                }
            };
            g_min += coef * len as i64;
        }
        for p in r.calls() {
            if p.literal_count() == 0 && p.vars().all(|v| r.vars()[v].domain.min_len() == Some(0)) {
                empty_args = true;
            }
        }
        cons.push(Constraint {
            a: g_min as f64,
            b: r.k() as f64 - 1.0,
            r: r.literal_len() as f64,
        });
    }
    if empty_args {
        // T(empty) = empty, so the claim at length 0 forces e <= 0
        cons.push(Constraint {
            a: 0.0,
            b: -1.0,
            r: 0.0,
        });
    }
    let feasible = |c: f64, e: f64| {
        cons.iter()
            .all(|k| k.a * c + k.b * e >= k.r - 1e-9 * (1.0 + k.r.abs()))
    };
    let mut best: Option<f64> = None;
    for i in 0..cons.len() {
        for j in i + 1..cons.len() {
            let (p, q) = (cons[i], cons[j]);
            let det = p.a * q.b - p.b * q.a;
            if det.abs() < 1e-12 {
                continue;
            }
            let c = (p.r * q.b - p.b * q.r) / det;
            let e = (p.a * q.r - p.r * q.a) / det;
            if c >= -1e-12 && feasible(c, e) {
                let c = c.max(0.0);
                best = Some(best.map_or(c, |b: f64| b.min(c)));
            }
        }
    }
    best.ok_or_else(|| {
        Error::BoundDerivation(
            "no linear bound is preserved by every rule; supply one explicitly".into(),
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::all_strings;
    use crate::engine::CompiledGrammar;
    use crate::rule::parse_grammar;
    use std::sync::Arc;

    fn bound(src: &str) -> Result<f64> {
        derive_growth_bound(&parse_grammar(src).unwrap(), &EngineLimits::default()).map(|b| b.c)
    }

    /// Largest observed output/input ratio over all inputs up to `max_len`.
    fn observed(src: &str, max_len: usize) -> f64 {
        let g = parse_grammar(src).unwrap();
        let n = g.input_alphabet().len();
        let cg = CompiledGrammar::new(Arc::new(g));
        let mut best: f64 = 0.0;
        for len in 1..=max_len {
            for s in all_strings(n, len) {
                if let Ok(o) = cg.interpret_ids(&s, &EngineLimits::default()) {
                    best = best.max(o.len() as f64 / len as f64);
                }
            }
        }
        best
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
    fn lake_bound_is_tight() {
        let c = bound(LAKE).unwrap();
        assert!((c - 5.0 / 3.0).abs() < 1e-12, "{c}");
        assert!((observed(LAKE, 4) - c).abs() < 1e-12);
    }

    #[test]
    fn single_ground_rule() {
        assert_eq!(bound("T(\"zup\") = \"green\"\n").unwrap(), 1.0);
    }

    #[test]
    fn homomorphism_gets_max_image_length() {
        let src = "input-alphabet a b c\noutput-alphabet x y\n\
                   forall x1 in SIGMA1, x2 in SIGMA+: T(x1 x2) = T(x1) T(x2)\n\
                   T(\"a\") = \"x\"; T(\"b\") = \"y x y\"; T(\"c\") = \"x\"\n";
        assert_eq!(bound(src).unwrap(), 3.0);
        assert!(observed(src, 5) <= 3.0);
    }

    #[test]
    fn affine_slack_handles_unbounded_concatenation() {
        let src = LAKE.replace(
            "forall x1 in SIGMA1, x2 in SIGMA1: T(x1 x2)",
            "forall x1 in SIGMA1, x2 in SIGMA+: T(x1 x2)",
        );
        let c = bound(&src).unwrap();
        assert!((c - 2.0).abs() < 1e-9, "{c}");
        assert!(observed(&src, 5) <= c + 1e-12);
    }

    #[test]
    fn duplicating_unbounded_variable_fails() {
        let src = "input-alphabet a blicket\noutput-alphabet o\n\
                   forall x1 in SIGMA+: T(x1 \"blicket\") = T(x1) T(x1)\nT(\"a\") = \"o\"\n";
        assert!(matches!(bound(src), Err(Error::BoundDerivation(_))));
    }

    #[test]
    fn empty_arguments_force_plain_linear_claim() {
        let src = "input-alphabet a b\noutput-alphabet o\n\
                   forall x1 in SIGMA*, x2 in SIGMA*: T(x1 \"b\" x2) = T(x1) \"o\" T(x2)\nT(\"a\") = \"o o\"\n";
        let c = bound(src).unwrap();
        assert!((c - 2.0).abs() < 1e-9, "{c}");
        assert!(observed(src, 6) <= c + 1e-12);
    }
}
