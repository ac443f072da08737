//! Recovers the AND rule from data generated by it.
//!
//! `cargo run --release --example planted_rule_search`

use std::time::Instant;

use ggr::corpus::generate_dataset;
use ggr::engine::EngineLimits;
use ggr::map::TableMap;
use ggr::rule::{parse_grammar, DomainSpec};
use ggr::search::{format_number, search_dataset, SearchCaps};

const AND_GRAMMAR: &str = "\
input-alphabet RUN WALK AND
output-alphabet RUN WALK
forall x1 in SIGMA+, x2 in SIGMA+: T(x1 \"AND\" x2) = T(x1) T(x2)
T(\"RUN\") = \"RUN\"
T(\"WALK\") = \"WALK\"
";

fn main() -> ggr::error::Result<()> {
    let g = parse_grammar(AND_GRAMMAR)?;
    let pairs = generate_dataset(&g, 7, usize::MAX, 0, &EngineLimits::default())?;
    let data = TableMap::from_strings(&pairs)?;
    let caps = SearchCaps {
        min_h: 2,
        max_h: 2,
        max_k: 2,
        max_pattern_len: 3,
        max_literal_len: 0,
        domain_menu: vec![DomainSpec::Plus],
        beta: 20.0,
        truncation_len: 4,
    };
    let start = Instant::now();
    let result = search_dataset(&data, &caps)?;
    println!(
        "{} pairs, {} candidates, {} tautologies, {:.1?}",
        pairs.len(),
        result.candidates,
        result.tautologies,
        start.elapsed()
    );
    for (i, r) in result.ranked.iter().take(10).enumerate() {
        println!(
            "{:>2}  [{}, {}]  terms={} skipped={}  {}",
            i + 1,
            format_number(r.estimate.lower()),
            format_number(r.estimate.upper()),
            r.estimate.term_count,
            r.estimate.skipped,
            r.rule
        );
    }
    let unsupported = result.ranked.iter().filter(|r| !r.supported()).count();
    let zero = result
        .ranked
        .iter()
        .filter(|r| r.supported() && r.estimate.lower() == 0.0)
        .count();
    println!("supported with zero lower bound: {zero}; unsupported: {unsupported}");
    Ok(())
}
