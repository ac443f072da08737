//! Interprets phrases of the Lake language with the three built-in readings.
//!
//! `cargo run --example lake_transduce`

use ggr::alphabet::TokenString;
use ggr::corpus::{build_lake_grammar, LakeOptions};
use ggr::engine::{interpret, EngineLimits};
use ggr::error::Error;

fn main() -> ggr::error::Result<()> {
    let readings = [
        ("literal", LakeOptions::default()),
        (
            "generalized",
            LakeOptions {
                generalized: true,
                tagged: false,
            },
        ),
    ];
    let phrases = [
        "zup",
        "zup lug fep",
        "fep blicket",
        "zup kiki gazzer",
        "zup fep lug tufa",
        "tufa kiki",
    ];
    let limits = EngineLimits::default();
    for (name, options) in readings {
        let g = build_lake_grammar(options)?;
        println!("{name}:");
        for p in phrases {
            let s = TokenString::parse(g.input_alphabet(), p)?;
            match interpret(&g, &s, &limits) {
                Ok(o) => println!("  {p:<20} -> {o}"),
                Err(Error::NoRuleMatches(_)) => println!("  {p:<20} -> <undefined>"),
                Err(e) => return Err(e),
            }
        }
    }
    let g = build_lake_grammar(LakeOptions {
        generalized: false,
        tagged: true,
    })?;
    let s = TokenString::parse(g.input_alphabet(), "l zup l' l lug l' l fep l'")?;
    println!("tagged:\n  {s} -> {}", interpret(&g, &s, &limits)?);
    Ok(())
}
