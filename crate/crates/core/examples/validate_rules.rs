//! Checks candidate rules for grammar-rule shape and reports their
//! size measures and the growth bound of a grammar.
//!
//! `cargo run --example validate_rules`

use ggr::engine::{derive_growth_bound, EngineLimits};
use ggr::rule::{parse_grammar, validate_ggr, RuleFile};

const GRAMMAR: &str = "\
input-alphabet dax wif lug fep
output-alphabet RED BLUE
T(\"dax\") = \"RED\"
T(\"wif\") = \"BLUE\"
forall x1 in SIGMA1: T(x1 \"fep\") = T(x1) T(x1) T(x1)
forall x1 in SIGMA+, x2 in SIGMA+: T(x1 \"lug\" x2) = T(x2) T(x1)
";

const CANDIDATES: &str = "\
forall x1 in SIGMA+: T(x1 \"fep\") = T(x1) T(x1)
forall x1 in SIGMA+, x2 in SIGMA+: T(x1 x2) = T(x1) T(x2)
forall x1 in SIGMA*: T(x1) = T(x1 \"fep\")
forall x1 in SIGMA+, x2 in SIGMA+: T(x1) = T(x2)
";

fn main() -> ggr::error::Result<()> {
    let g = parse_grammar(GRAMMAR)?;
    let b = derive_growth_bound(&g, &EngineLimits::default())?;
    println!("growth bound: |T(s)| <= {} |s|^{}", b.c, b.d);
    let file = RuleFile::parse_with(
        CANDIDATES,
        Some(g.input_alphabet().clone()),
        Some(g.output_alphabet().clone()),
    )?;
    for r in &file.rules {
        match validate_ggr(r) {
            Ok(r) => println!(
                "ok       h={} k={} complexity={}  {r}",
                r.h(),
                r.k(),
                r.complexity()
            ),
            Err(v) => {
                let why: Vec<String> = v.iter().map(ToString::to_string).collect();
                println!("invalid  {}  ({})", r, why.join("; "))
            }
        }
    }
    Ok(())
}
