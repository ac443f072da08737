//! Samples reproducible datasets from each built-in grammar.
//!
//! `cargo run --example corpus_dataset`

use ggr::corpus::{generate_dataset, CorpusSpec};
use ggr::engine::EngineLimits;

fn main() -> ggr::error::Result<()> {
    for name in CorpusSpec::NAMES {
        let g = CorpusSpec::named(name)?.build()?;
        let pairs = generate_dataset(&g, 4, 3, 7, &EngineLimits::default())?;
        println!("{name}: {} rules", g.rules().len());
        for (i, o) in &pairs {
            println!("  {i}\t{o}");
        }
    }
    Ok(())
}
