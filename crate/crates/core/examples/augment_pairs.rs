//! Generates new input/output pairs from the AND/AFTER grammar.
//!
//! `cargo run --example augment_pairs`

use ggr::alphabet::TokenString;
use ggr::corpus::{build_and_after_grammar, AND_AFTER_GROUND};
use ggr::engine::{augment, write_pairs_tsv, EngineLimits};

fn main() -> ggr::error::Result<()> {
    let g = build_and_after_grammar(&AND_AFTER_GROUND)?;
    let seeds = ["RUN LEFT", "WALK"]
        .iter()
        .map(|s| TokenString::parse(g.input_alphabet(), s))
        .collect::<Result<Vec<_>, _>>()?;
    let pairs = augment(&g, &seeds, 25, 5, &EngineLimits::default())?;
    write_pairs_tsv(std::io::stdout().lock(), &pairs)
}
