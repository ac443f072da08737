//! Certified error intervals for a correct and an incorrect rule about
//! Gordon's permutation language.
//!
//! `cargo run --release --example err_certificate`

use std::sync::Arc;

use ggr::corpus::build_gordon_grammar;
use ggr::engine::{derive_growth_bound, EngineLimits, GrammarMap};
use ggr::err::{err_estimate_each, ErrOptions};
use ggr::rule::RuleFile;

const RULES: &str = "\
forall x1 in SIGMA+, x2 in SIGMA+: T(x1 x2) = T(x1) T(x2)
forall x1 in SIGMA+, x2 in SIGMA+: T(x1 x2) = T(x2) T(x1)
";

fn main() -> ggr::error::Result<()> {
    let g = Arc::new(build_gordon_grammar(&[
        ("jump", "walk"),
        ("walk", "jump"),
        ("run", "run"),
    ])?);
    let bound = derive_growth_bound(&g, &EngineLimits::default())?;
    let m = GrammarMap::with_growth_bound(g.clone(), EngineLimits::default(), bound)?;
    println!("growth bound |T(s)| <= {} |s|^{}", bound.c, bound.d);
    let rules = RuleFile::parse_with(
        RULES,
        Some(g.input_alphabet().clone()),
        Some(g.output_alphabet().clone()),
    )?
    .ggr_rules()?;
    for r in &rules {
        println!("{r}");
        err_estimate_each(&m, r, 1.0, 0.0, 6, &ErrOptions::default(), |e| {
            println!(
                "  L={}  [{:.6e}, {:.6e}]  terms={}",
                e.truncation_len,
                e.lower(),
                e.upper(),
                e.term_count
            );
        })?;
    }
    Ok(())
}
